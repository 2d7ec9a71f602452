#include "qwsi/indices.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qwsi {

namespace {
constexpr double kPi = std::numbers::pi;

Mat select_columns(const Mat& basis, const std::vector<int>& cols) {
  Mat out(basis.rows(), cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(i) = basis.col(cols[i]);
  return out;
}
}  // namespace

IndexTable make_index_table(TaggedIndex plus_left, TaggedIndex plus_right,
                            TaggedIndex minus_left, TaggedIndex minus_right,
                            DecouplingKind kind) {
  IndexTable t;
  t.si_plus_left = plus_left;
  t.si_plus_right = plus_right;
  t.si_minus_left = minus_left;
  t.si_minus_right = minus_right;
  t.si_plus = plus_left + plus_right;
  t.si_minus = minus_left + minus_right;
  t.si_left = plus_left + minus_left;
  t.si_right = plus_right + minus_right;
  t.si_total = t.si_left + t.si_right;
  t.decoupling_kind = kind;
  return t;
}

WindingResult bulk_winding(const TIWalkSymbol& s, const Mat& gamma_cell,
                           int initial_samples, double min_modulus_threshold) {
  if (s.coin_dim != 2 || gamma_cell.rows() != 2 || gamma_cell.cols() != 2)
    throw std::invalid_argument("bulk_winding: two-dimensional coins only");
  if ((gamma_cell - gamma_cell.adjoint()).cwiseAbs().maxCoeff() > 1e-12 ||
      (gamma_cell * gamma_cell - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() > 1e-12 ||
      std::abs(gamma_cell.trace()) > 1e-12)
    throw std::invalid_argument(
        "bulk_winding: gamma must be hermitian, square to one, and be traceless");
  if (initial_samples < 16)
    throw std::invalid_argument("bulk_winding: need at least 16 samples");

  // Chiral basis with the +1 eigenvector first.
  Eigen::SelfAdjointEigenSolver<Mat> es(gamma_cell);
  Mat v(2, 2);
  v.col(0) = es.eigenvectors().col(1);  // eigenvalue +1 (ascending order)
  v.col(1) = es.eigenvectors().col(0);  // eigenvalue -1

  // Precondition: the symbol is chirally admissible.
  for (int j = 0; j < 8; ++j) {
    const double k = 2.0 * kPi * j / 8.0;
    Mat w = s.at(k);
    if ((gamma_cell * w * gamma_cell - w.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
      throw std::invalid_argument("bulk_winding: symbol is not chirally admissible");
  }

  auto off_diagonal = [&](double k) { return (v.adjoint() * s.at(k) * v)(1, 0); };

  double total = 0.0;
  double min_mod = std::numeric_limits<double>::infinity();
  int used = 0;

  std::function<void(double, cplx, double, cplx, int)> march =
      [&](double k0, cplx a0, double k1, cplx a1, int depth) {
        const double step = std::arg(a1 / a0);
        if (std::abs(step) < kPi / 2.0) {
          total += step;
          return;
        }
        if (depth >= 40)
          throw WindingUndefinedError(
              "bulk_winding: phase step would not refine; curve passes the origin");
        const double km = 0.5 * (k0 + k1);
        const cplx am = off_diagonal(km);
        ++used;
        min_mod = std::min(min_mod, std::abs(am));
        march(k0, a0, km, am, depth + 1);
        march(km, am, k1, a1, depth + 1);
      };

  std::vector<cplx> a(initial_samples + 1);
  for (int j = 0; j <= initial_samples; ++j) {
    const double k = 2.0 * kPi * j / initial_samples;
    a[j] = off_diagonal(k);
    ++used;
    min_mod = std::min(min_mod, std::abs(a[j]));
  }
  if (min_mod <= min_modulus_threshold)
    throw WindingUndefinedError("bulk_winding: off-diagonal element vanishes on the grid");

  for (int j = 0; j < initial_samples; ++j) {
    const double k0 = 2.0 * kPi * j / initial_samples;
    const double k1 = 2.0 * kPi * (j + 1) / initial_samples;
    march(k0, a[j], k1, a[j + 1], 0);
  }
  if (min_mod <= min_modulus_threshold)
    throw WindingUndefinedError("bulk_winding: off-diagonal element vanishes under refinement");

  WindingResult r;
  const double turns = total / (2.0 * kPi);
  r.winding = static_cast<int>(std::lround(turns));
  r.residue = std::abs(turns - r.winding);
  r.min_modulus = min_mod;
  r.samples_used = used;
  if (r.residue >= 1e-6) {
    std::ostringstream os;
    os << "bulk_winding: accumulated phase " << turns << " is not an integer";
    throw std::runtime_error(os.str());
  }
  return r;
}

TaggedIndex si_point(const EigenspaceReport& report, const SymmetryRep& rep) {
  return rep_index(rep, report.basis);
}

double spectral_ambiguity_radius(const WalkWindow& w, double lambda, double tol_eig) {
  const double gap = lambda > 0 ? w.bulk_gap_plus : w.bulk_gap_minus;
  if (gap <= 0) return 0.0;
  const double r = std::min(0.45 * gap, 0.05);
  return r > 10.0 * tol_eig ? r : 0.0;
}

namespace {

struct GroupSums {
  double left = 0.0, right = 0.0, middle = 0.0;
};

// Chirality-trace shares of the in-gap cluster around ±1, split by
// localization after a joint position rotation.  On a finite window a pair
// of exact ±1 edge states hybridizes across the window into eigenvalues
// e^{±iφ} with exponentially small φ, invisible to an exact-eigenvalue
// search.  Chiral symmetry maps the e^{iφ} eigenspace onto the e^{-iφ} one
// without moving mass between cells, so the cluster trace splits by
// location: a genuine in-gap pair living at one edge contributes zero to
// its group, while a hybridized pair of exact edge states contributes ±1 to
// the two groups it straddles.  Each group sum is therefore an integer up
// to exponentially small corrections; non-integral sums or unattributable
// states signal a too-small window (AttributionError).
GroupSums suspicious_group_sums(const BandedUnitary& block, const SymmetryRep& rep,
                                double lambda, double band, double share) {
  const CellStructure& st = block.structure();
  Mat dense = block.to_dense();
  Eigen::ComplexSchur<Mat> schur(dense, /*computeU=*/true);
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("suspicious_group_sums: Schur decomposition failed");

  std::vector<int> members;
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    const double arc = std::abs(std::arg(schur.matrixT()(i, i) * cplx(lambda, 0.0)));
    if (arc <= band) members.push_back(static_cast<int>(i));
  }
  GroupSums sums;
  if (members.empty()) return sums;

  Mat basis(st.total(), members.size());
  for (std::size_t c = 0; c < members.size(); ++c)
    basis.col(c) = schur.matrixU().col(members[c]);

  Eigen::VectorXd pos(st.total());
  for (int x = st.x_min; x <= st.x_max(); ++x)
    pos.segment(st.offset(x), st.dim(x)).setConstant(x);
  if (members.size() > 1) {
    Mat m = basis.adjoint() * (pos.asDiagonal() * basis);
    Eigen::SelfAdjointEigenSolver<Mat> es((m + m.adjoint()) / 2.0);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("suspicious_group_sums: position rotation failed");
    basis = basis * es.eigenvectors();
  }

  const Mat gamma = rep.window_op(Gen::Gamma).matrix;
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    const Vec v = basis.col(c);
    const double chi = (v.adjoint() * gamma * v).real()(0, 0);
    LocalizationProfile p = localization_profile(StateVector{st, v});
    if (p.edge_mass_left > share) {
      sums.left += chi;
    } else if (p.edge_mass_right > share) {
      sums.right += chi;
    } else if (p.middle_mass > share) {
      sums.middle += chi;
    } else {
      std::ostringstream os;
      os << "in-gap cluster state at lambda=" << lambda << " (center " << p.center
         << ") could not be attributed to a window region";
      throw AttributionError(os.str());
    }
  }
  return sums;
}

int round_group_sum(double sum, const char* which, double lambda) {
  const long v = std::lround(sum);
  if (std::abs(sum - static_cast<double>(v)) > 1e-3) {
    std::ostringstream os;
    os << "chirality sum " << sum << " of the " << which << "-attributed in-gap cluster at "
       << "lambda=" << lambda << " is not integral";
    throw AttributionError(os.str());
  }
  return static_cast<int>(v);
}

// Index of the states of one decoupled block that localize at the side of
// the block facing the cut.  When eigenvalues sit suspiciously deep in the
// gap (hybridized pairs), falls back to the chirality group sums.
TaggedIndex block_cut_index(const BandedUnitary& block, const SymmetryRep& rep,
                            double lambda, EdgeSide cut_side, double tol_eig,
                            double suspect_radius) {
  try {
    EigenspaceReport rpt = eigenspace_near(block, lambda, tol_eig, &rep, suspect_radius);
    std::vector<int> at_cut;
    for (int c = 0; c < rpt.dimension; ++c) {
      if (rpt.edge_attribution[c] == EdgeSide::Ambiguous) {
        std::ostringstream os;
        os << "eigenvector at lambda=" << lambda << " (center " << rpt.centers[c]
           << ") could not be attributed to an edge";
        throw AttributionError(os.str());
      }
      if (rpt.edge_attribution[c] == cut_side) at_cut.push_back(c);
    }
    return rep_index(rep, select_columns(rpt.basis, at_cut));
  } catch (const ClusterAmbiguityError&) {
    if (!rep.type().has(Gen::Gamma)) throw;
    const double band = std::max(10.0 * tol_eig, suspect_radius);
    GroupSums sums = suspicious_group_sums(block, rep, lambda, band, 0.9);
    round_group_sum(sums.left, "left", lambda);
    round_group_sum(sums.right, "right", lambda);
    round_group_sum(sums.middle, "middle", lambda);
    const double s = cut_side == EdgeSide::Left ? sums.left : sums.right;
    return TaggedIndex::make(rep.type().group, round_group_sum(s, "cut", lambda));
  }
}

}  // namespace

TaggedIndex si_gap_interior(const WalkWindow& w, double lambda, double tol_eig,
                            double share) {
  const double radius = spectral_ambiguity_radius(w, lambda, tol_eig);
  try {
    EigenspaceReport rpt = eigenspace_near(w.walk, lambda, tol_eig, &w.rep, radius);
    std::vector<int> interior;
    for (int c = 0; c < rpt.dimension; ++c) {
      LocalizationProfile p = localization_profile(rpt.vector(c));
      if (p.middle_mass > share) interior.push_back(c);
    }
    return rep_index(w.rep, select_columns(rpt.basis, interior));
  } catch (const ClusterAmbiguityError&) {
    if (!w.rep.type().has(Gen::Gamma)) throw;
    const double band = std::max(10.0 * tol_eig, radius);
    GroupSums sums = suspicious_group_sums(w.walk, w.rep, lambda, band, share);
    round_group_sum(sums.left, "left", lambda);
    round_group_sum(sums.right, "right", lambda);
    return TaggedIndex::make(w.rep.type().group,
                             round_group_sum(sums.middle, "middle", lambda));
  }
}

IndexTable half_line_indices(const WalkWindow& w, int cut, double tol_eig) {
  if (w.rep.type().label == SymClass::DIII)
    throw std::invalid_argument(
        "half_line_indices: not defined for the fifth symmetry type");
  const DecouplingKind kind = w.kind_of_cut(cut);
  const CellStructure& st = w.walk.structure();

  BandedUnitary left = w.walk.slice(st.x_min, cut - 1);
  BandedUnitary right = w.walk.slice(cut, st.x_max());
  SymmetryRep rep_l = w.rep.slice(st.x_min, cut - 1);
  SymmetryRep rep_r = w.rep.slice(cut, st.x_max());

  const double rad_p = spectral_ambiguity_radius(w, +1.0, tol_eig);
  const double rad_m = spectral_ambiguity_radius(w, -1.0, tol_eig);
  TaggedIndex pl = block_cut_index(left, rep_l, +1.0, EdgeSide::Right, tol_eig, rad_p);
  TaggedIndex ml = block_cut_index(left, rep_l, -1.0, EdgeSide::Right, tol_eig, rad_m);
  TaggedIndex pr = block_cut_index(right, rep_r, +1.0, EdgeSide::Left, tol_eig, rad_p);
  TaggedIndex mr = block_cut_index(right, rep_r, -1.0, EdgeSide::Left, tol_eig, rad_m);
  return make_index_table(pl, pr, ml, mr, kind);
}

IndexTable half_line_indices(const WindowBuilder& build, int initial_half_width, int cut,
                             double tol_eig) {
  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= 3; ++attempt) {
    const int hw = initial_half_width << attempt;
    WalkWindow w = build(hw);
    try {
      return half_line_indices(w, cut, tol_eig);
    } catch (const ClusterAmbiguityError& e) {
      last_error = e.what();
    } catch (const AttributionError& e) {
      last_error = e.what();
    }
  }
  throw EscalationError("window escalation exhausted: " + last_error);
}

CutIndependenceReport verify_cut_independence(const RecipeWindowBuilder& build, int x0,
                                              int x1, int half_width, double tol_eig) {
  if (x0 >= x1) throw std::invalid_argument("verify_cut_independence: need x0 < x1");

  CutIndependenceReport rpt;
  rpt.x0 = x0;
  rpt.x1 = x1;

  const auto gentle = DecouplingKind::Gentle;
  WalkWindow w0 = build(x0 - half_width, x0 + half_width, {{x0, gentle}});
  rpt.si_right_at_x0 = half_line_indices(w0, x0, tol_eig).si_right;

  WalkWindow w1 = build(x1 - half_width, x1 + half_width, {{x1, gentle}});
  rpt.si_right_at_x1 = half_line_indices(w1, x1, tol_eig).si_right;

  // Doubly decoupled window around both cuts; its middle block [x0, x1-1]
  // is a finite walk of balanced cells, so its total index vanishes.  The
  // block's boundary states sit at both of its ends and hybridize through
  // the short interior, displacing their eigenvalues from ±1 by roughly
  // exp(-gap·(x1-x0)) — far beyond tol_eig for nearby cuts.  The cluster
  // tolerance is therefore sized from the bulk gap: displaced pairs are
  // included whole and cancel in the index (opposite chirality), while
  // genuine band states stay outside the suspicion band at gap/10 · 10.
  WalkWindow wm = build(x0 - half_width, x1 + half_width, {{x0, gentle}, {x1, gentle}});
  const double gap_min = std::min(wm.bulk_gap_plus, wm.bulk_gap_minus);
  const double cluster = gap_min > 0.0 ? std::min(gap_min / 10.0, 0.02) : tol_eig;
  BandedUnitary middle = wm.walk.slice(x0, x1 - 1);
  SymmetryRep rep_m = wm.rep.slice(x0, x1 - 1);
  EigenspaceReport plus = eigenspace_near(middle, +1.0, cluster, &rep_m);
  EigenspaceReport minus = eigenspace_near(middle, -1.0, cluster, &rep_m);
  rpt.si_middle = si_point(plus, rep_m) + si_point(minus, rep_m);

  rpt.ok = rpt.si_middle.is_zero() && rpt.si_right_at_x0 == rpt.si_right_at_x1;
  return rpt;
}

GentleLocalComparison compare_gentle_vs_local(const RecipeWindowBuilder& build, int cut,
                                              int half_width, double tol_eig) {
  GentleLocalComparison cmp;
  WalkWindow wg = build(cut - half_width, cut + half_width, {{cut, DecouplingKind::Gentle}});
  WalkWindow wl = build(cut - half_width, cut + half_width, {{cut, DecouplingKind::Local}});
  cmp.gentle = half_line_indices(wg, cut, tol_eig);
  cmp.local = half_line_indices(wl, cut, tol_eig);
  cmp.columns_match = cmp.gentle.si_left == cmp.local.si_left &&
                      cmp.gentle.si_right == cmp.local.si_right &&
                      cmp.gentle.si_total == cmp.local.si_total;
  cmp.rows_differ = !(cmp.gentle.si_plus_left == cmp.local.si_plus_left) ||
                    !(cmp.gentle.si_plus_right == cmp.local.si_plus_right) ||
                    !(cmp.gentle.si_minus_left == cmp.local.si_minus_left) ||
                    !(cmp.gentle.si_minus_right == cmp.local.si_minus_right);
  return cmp;
}

}  // namespace qwsi
