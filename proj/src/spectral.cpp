#include "qwsi/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qwsi {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string to_string(EdgeSide s) {
  switch (s) {
    case EdgeSide::Left: return "left";
    case EdgeSide::Right: return "right";
    default: return "ambiguous";
  }
}

BandStructure band_structure(const TIWalkSymbol& s, int n_k) {
  if (n_k < 16) throw std::invalid_argument("band_structure: need n_k >= 16");
  BandStructure b;
  b.k_grid.reserve(n_k);
  b.eigenphases.reserve(n_k);
  for (int j = 0; j < n_k; ++j) {
    const double k = 2.0 * kPi * j / n_k;
    Mat m = s.at(k);
    Eigen::ComplexEigenSolver<Mat> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("band_structure: eigensolver failed");
    std::vector<double> phases;
    phases.reserve(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const cplx ev = es.eigenvalues()(i);
      if (std::abs(std::abs(ev) - 1.0) > 1e-10)
        throw std::runtime_error("band_structure: symbol eigenvalue off the unit circle");
      phases.push_back(std::arg(ev));
    }
    std::sort(phases.begin(), phases.end());
    b.k_grid.push_back(k);
    b.eigenphases.push_back(std::move(phases));
  }
  return b;
}

GapReport essential_gap(const BandStructure& b, double threshold) {
  GapReport g;
  g.threshold = threshold;
  double to_plus = kPi;   // largest possible arc distance to phase 0
  double to_minus = kPi;  // ... to phase ±π
  for (const auto& phases : b.eigenphases) {
    for (double p : phases) {
      to_plus = std::min(to_plus, std::abs(p));
      to_minus = std::min(to_minus, kPi - std::abs(p));
    }
  }
  g.gap_at_plus = to_plus;
  g.gap_at_minus = to_minus;
  g.closed_plus = to_plus < threshold;
  g.closed_minus = to_minus < threshold;
  return g;
}

GapReport essential_gap(const TIWalkSymbol& s, int n_k, double threshold) {
  return essential_gap(band_structure(s, n_k), threshold);
}

LocalizationProfile localization_profile(const StateVector& v) {
  const CellStructure& s = v.structure;
  const int n = s.cells();
  LocalizationProfile p;
  double total = 0.0;
  for (int x = s.x_min; x <= s.x_max(); ++x) {
    const double m = v.cell_mass(x);
    const int idx = x - s.x_min;
    total += m;
    p.center += m * x;
    if (3 * idx < n)
      p.edge_mass_left += m;
    else if (3 * idx >= 2 * n)
      p.edge_mass_right += m;
    else
      p.middle_mass += m;
  }
  if (total > 0.0) p.center /= total;
  return p;
}

EdgeSide attribute_edge(const LocalizationProfile& p, double share) {
  if (p.edge_mass_left > share) return EdgeSide::Left;
  if (p.edge_mass_right > share) return EdgeSide::Right;
  return EdgeSide::Ambiguous;
}

EigenspaceReport eigenspace_near(const BandedUnitary& w, double lambda_target,
                                 double tol_eig, const SymmetryRep* rep,
                                 double suspect_radius) {
  if (std::abs(std::abs(lambda_target) - 1.0) > 1e-12)
    throw std::invalid_argument("eigenspace_near: target must lie on the unit circle");
  if (tol_eig <= 0) throw std::invalid_argument("eigenspace_near: tol_eig must be positive");

  const CellStructure& st = w.structure();
  Mat dense = w.to_dense();

  Eigen::ComplexSchur<Mat> schur(dense, /*computeU=*/true);
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("eigenspace_near: Schur decomposition failed");
  const Mat& q = schur.matrixU();
  const Mat& t = schur.matrixT();

  // W is unitary (normal), so T is diagonal up to roundoff and the columns
  // of Q are orthonormal eigenvectors; residuals are re-checked below.
  std::vector<int> cluster;
  const double ambiguous_band = std::max(10.0 * tol_eig, suspect_radius);
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    const cplx ev = t(i, i);
    const double arc = std::abs(std::arg(ev * cplx(lambda_target, 0.0)));
    if (arc <= tol_eig) {
      cluster.push_back(static_cast<int>(i));
    } else if (arc <= ambiguous_band) {
      std::ostringstream os;
      os << "eigenvalue at arc distance " << arc << " from target " << lambda_target
         << " lies inside the ambiguity band (cluster tol " << tol_eig << ", band "
         << ambiguous_band << ")";
      throw ClusterAmbiguityError(os.str());
    }
  }

  EigenspaceReport rpt;
  rpt.eigenvalue_target = lambda_target;
  rpt.structure = st;
  rpt.dimension = static_cast<int>(cluster.size());
  rpt.basis = Mat(st.total(), cluster.size());
  for (std::size_t c = 0; c < cluster.size(); ++c) rpt.basis.col(c) = q.col(cluster[c]);

  // Position operator diagonal: cell coordinate per component.
  Eigen::VectorXd pos(st.total());
  for (int x = st.x_min; x <= st.x_max(); ++x)
    pos.segment(st.offset(x), st.dim(x)).setConstant(x);

  if (rpt.dimension > 1) {
    // Rotate the (numerically degenerate) cluster to diagonalize the
    // position expectation; this separates localized states at different
    // edges that the eigensolver returned in arbitrary mixtures.
    Mat m = rpt.basis.adjoint() * (pos.asDiagonal() * rpt.basis);
    Eigen::SelfAdjointEigenSolver<Mat> es((m + m.adjoint()) / 2.0);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("eigenspace_near: position rotation failed");
    rpt.basis = rpt.basis * es.eigenvectors();
  }

  const double residual_tol = tol_eig + 1e-9;
  for (int c = 0; c < rpt.dimension; ++c) {
    const Vec v = rpt.basis.col(c);
    const double r = (dense * v - cplx(lambda_target, 0.0) * v).norm();
    if (r > residual_tol) {
      std::ostringstream os;
      os << "eigenspace_near: residual " << r << " exceeds tolerance " << residual_tol;
      throw std::runtime_error(os.str());
    }
    rpt.residuals.push_back(r);
    rpt.centers.push_back((pos.array() * v.cwiseAbs2().array()).sum());
    rpt.edge_attribution.push_back(
        attribute_edge(localization_profile(StateVector{st, v})));
  }

  if (rep != nullptr && rep->type().has(Gen::Gamma)) {
    const AntiUnitaryOp gamma = rep->window_op(Gen::Gamma);
    rpt.chirality_trace = (rpt.basis.adjoint() * gamma.matrix * rpt.basis).trace().real();
  }
  return rpt;
}

}  // namespace qwsi
