#include "qwsi/schur.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace qwsi {

namespace {
constexpr double kPi = std::numbers::pi;
}

int SchurContext::h0_dim() const {
  int d = 0;
  for (const auto& [cell, sel] : h0) d += static_cast<int>(sel.size());
  return d;
}

std::vector<int> SchurContext::h0_global_indices() const {
  const CellStructure& s = walk.structure();
  if (h0.empty()) throw std::invalid_argument("schur: H0 is empty");
  std::vector<int> idx;
  std::set<int> seen_cells;
  for (const auto& [cell, sel] : h0) {
    if (!s.contains(cell)) throw std::invalid_argument("schur: H0 cell outside window");
    if (!seen_cells.insert(cell).second)
      throw std::invalid_argument("schur: duplicate H0 cell");
    if (sel.empty()) throw std::invalid_argument("schur: empty component selector");
    std::set<int> seen(sel.begin(), sel.end());
    if (seen.size() != sel.size())
      throw std::invalid_argument("schur: duplicate component in selector");
    for (int c : sel) {
      if (c < 0 || c >= s.dim(cell))
        throw std::invalid_argument("schur: selector component out of range");
      idx.push_back(s.offset(cell) + c);
    }
  }
  return idx;
}

int SchurContext::effective_trunc() const {
  return trunc_n > 0 ? trunc_n : 4 * walk.structure().cells();
}

SchurContext make_schur_context(BandedUnitary walk, const std::vector<int>& cells,
                                int trunc_n, double tol_series) {
  SchurContext ctx{std::move(walk), {}, trunc_n, tol_series, std::nullopt};
  for (int c : cells) {
    std::vector<int> all(ctx.walk.structure().dim(c));
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    ctx.h0.emplace_back(c, std::move(all));
  }
  ctx.h0_global_indices();  // validate
  return ctx;
}

namespace {

Mat embed_columns(const CellStructure& s, const std::vector<int>& idx) {
  Mat e = Mat::Zero(s.total(), idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) e(idx[j], j) = 1.0;
  return e;
}

Mat take_rows(const Mat& x, const std::vector<int>& idx) {
  Mat out(idx.size(), x.cols());
  for (std::size_t j = 0; j < idx.size(); ++j) out.row(j) = x.row(idx[j]);
  return out;
}

void zero_rows(Mat& x, const std::vector<int>& idx) {
  for (int i : idx) x.row(i).setZero();
}

double spectral_norm(const Mat& m) {
  return m.jacobiSvd().singularValues()(0);
}

}  // namespace

Mat schur_eval(const SchurContext& ctx, cplx z) {
  if (std::abs(z) > 1.0 + 1e-12)
    throw std::invalid_argument("schur_eval: z outside the closed unit disc");
  if (ctx.bulk_gap && std::abs(std::abs(z) - 1.0) <= 1e-12) {
    // On the circle the series converges only in a gap; certify via the
    // attached report (arcs around +1 and −1 are the certified regions).
    const double to_plus = std::abs(std::arg(z));
    const double to_minus = kPi - to_plus;
    const bool in_plus_gap = !ctx.bulk_gap->closed_plus && to_plus < ctx.bulk_gap->gap_at_plus;
    const bool in_minus_gap =
        !ctx.bulk_gap->closed_minus && to_minus < ctx.bulk_gap->gap_at_minus;
    if (!in_plus_gap && !in_minus_gap) {
      std::ostringstream os;
      os << "schur_eval: z = (" << z.real() << ", " << z.imag()
         << ") on the circle is not inside a certified essential gap";
      throw std::invalid_argument(os.str());
    }
  }

  const std::vector<int> idx = ctx.h0_global_indices();
  const int d0 = static_cast<int>(idx.size());
  const int n_max = ctx.effective_trunc();
  const BandedMatrix& w = ctx.walk.banded();

  Mat x = qwsi::apply(w, embed_columns(ctx.walk.structure(), idx));  // X₁ = W P
  Mat f = Mat::Zero(d0, d0);
  cplx zpow = 1.0;  // z^{n-1}
  double tail[3] = {std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
  for (int n = 1; n <= n_max; ++n) {
    Mat a_n = take_rows(x, idx);
    Mat term = zpow * a_n;
    f += term;
    tail[n % 3] = term.norm();
    if (n == n_max) break;
    zero_rows(x, idx);     // Q X_n
    x = qwsi::apply(w, x);       // X_{n+1} = W Q X_n
    zpow *= z;
  }

  const double tail_estimate = std::max({tail[0], tail[1], tail[2]});
  if (!(tail_estimate <= ctx.tol_series)) {
    std::ostringstream os;
    os << "schur_eval: series tail " << tail_estimate << " above tolerance "
       << ctx.tol_series << " at truncation order " << n_max;
    throw SchurConvergenceError(os.str());
  }

  const double norm = spectral_norm(f);
  if (norm > 1.0 + ctx.tol_series + 1e-9) {
    std::ostringstream os;
    os << "schur_eval: contractivity violated, |f| = " << norm;
    throw std::runtime_error(os.str());
  }
  return f;
}

EigendetectReport eigendetect(const SchurContext& ctx, double lambda, double tol,
                              const SymmetryRep* rep) {
  if (std::abs(std::abs(lambda) - 1.0) > 1e-12)
    throw std::invalid_argument("eigendetect: target must lie on the unit circle");

  const Mat f = schur_eval(ctx, cplx(lambda, 0.0));
  const Mat m = lambda * f;

  Eigen::ComplexEigenSolver<Mat> es(m, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendetect: eigensolver failed");

  EigendetectReport rpt;
  rpt.eigenvalue_target = lambda;
  std::vector<int> fixed;
  double margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double dist = std::abs(es.eigenvalues()(i) - cplx(1.0, 0.0));
    if (dist <= tol) {
      fixed.push_back(static_cast<int>(i));
      rpt.fixed_eigenvalues.push_back(es.eigenvalues()(i));
    } else {
      margin = std::min(margin, dist);
    }
  }
  rpt.dimension = static_cast<int>(fixed.size());
  rpt.spectral_margin = margin;

  Mat raw(m.rows(), fixed.size());
  for (std::size_t j = 0; j < fixed.size(); ++j) raw.col(j) = es.eigenvectors().col(fixed[j]);
  if (rpt.dimension > 0) {
    Eigen::HouseholderQR<Mat> qr(raw);
    Mat thin = Mat::Identity(m.rows(), rpt.dimension);
    rpt.basis = qr.householderQ() * thin;
  } else {
    rpt.basis = Mat(m.rows(), 0);
  }

  if (rep != nullptr && rep->type().has(Gen::Gamma)) {
    // γ restricted to H₀ in the context's coordinates; each selector must be
    // invariant under the cell's γ or the restriction is not meaningful.
    const int d0 = ctx.h0_dim();
    Mat gamma0 = Mat::Zero(d0, d0);
    int pos = 0;
    for (const auto& [cell, sel] : ctx.h0) {
      const Mat g = rep->cell_op(Gen::Gamma, cell);
      // invariance: γ must not map selected components outside the selection
      std::set<int> chosen(sel.begin(), sel.end());
      for (int col : sel) {
        for (int row = 0; row < g.rows(); ++row) {
          if (chosen.count(row) == 0 && std::abs(g(row, col)) > 1e-12)
            throw std::invalid_argument(
                "eigendetect: H0 selector is not invariant under the chiral generator");
        }
      }
      for (std::size_t a = 0; a < sel.size(); ++a)
        for (std::size_t b = 0; b < sel.size(); ++b)
          gamma0(pos + a, pos + b) = g(sel[a], sel[b]);
      pos += static_cast<int>(sel.size());
    }
    rpt.chirality_trace = (rpt.basis.adjoint() * gamma0 * rpt.basis).trace().real();
  }
  return rpt;
}

namespace {

// V on H₀ embedded as a banded operator equal to the identity elsewhere.
BandedMatrix embed_h0_unitary(const SchurContext& ctx, const Mat& v) {
  const CellStructure& s = ctx.walk.structure();
  int band = 0;
  for (const auto& [ci, si] : ctx.h0)
    for (const auto& [cj, sj] : ctx.h0) band = std::max(band, std::abs(ci - cj));
  BandedMatrix out(s, band);
  for (int x = s.x_min; x <= s.x_max(); ++x)
    out.set_block(x, x, Mat::Identity(s.dim(x), s.dim(x)));

  int row0 = 0;
  for (const auto& [ci, si] : ctx.h0) {
    int col0 = 0;
    for (const auto& [cj, sj] : ctx.h0) {
      Mat blk = out.has_block(ci, cj) ? out.block(ci, cj) : Mat::Zero(s.dim(ci), s.dim(cj));
      for (std::size_t a = 0; a < si.size(); ++a)
        for (std::size_t b = 0; b < sj.size(); ++b)
          blk(si[a], sj[b]) = v(row0 + a, col0 + b);
      out.set_block(ci, cj, blk);
      col0 += static_cast<int>(sj.size());
    }
    row0 += static_cast<int>(si.size());
  }
  return out;
}

}  // namespace

RenewalReport renewal_check(const SchurContext& ctx, const Mat& v_on_h0,
                            const std::vector<cplx>& z_samples) {
  const int d0 = ctx.h0_dim();
  if (v_on_h0.rows() != d0 || v_on_h0.cols() != d0)
    throw std::invalid_argument("renewal_check: V does not match H0 dimension");
  if ((v_on_h0 * v_on_h0.adjoint() - Mat::Identity(d0, d0)).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("renewal_check: V is not unitary");
  if (z_samples.empty()) throw std::invalid_argument("renewal_check: no z samples");

  BandedMatrix v_emb = embed_h0_unitary(ctx, v_on_h0);

  SchurContext ctx_vw = ctx;
  ctx_vw.walk = BandedUnitary(multiply(v_emb, ctx.walk.banded()), 1e-11);
  SchurContext ctx_wv = ctx;
  ctx_wv.walk = BandedUnitary(multiply(ctx.walk.banded(), v_emb), 1e-11);

  const Mat vdag = v_on_h0.adjoint();
  RenewalReport rpt;
  auto track = [&rpt](const std::string& key, double dev) {
    auto [it, inserted] = rpt.deviation.emplace(key, dev);
    if (!inserted) it->second = std::max(it->second, dev);
  };

  for (cplx z : z_samples) {
    const Mat f = schur_eval(ctx, z);
    const Mat fvw = schur_eval(ctx_vw, z);
    const Mat fwv = schur_eval(ctx_wv, z);
    track("VW:f*Vdag", (fvw - f * vdag).norm());
    track("VW:Vdag*f", (fvw - vdag * f).norm());
    track("VW:V*f", (fvw - v_on_h0 * f).norm());
    track("VW:f*V", (fvw - f * v_on_h0).norm());
    track("WV:f*Vdag", (fwv - f * vdag).norm());
    track("WV:Vdag*f", (fwv - vdag * f).norm());
    track("WV:V*f", (fwv - v_on_h0 * f).norm());
    track("WV:f*V", (fwv - f * v_on_h0).norm());
  }

  rpt.best_deviation = std::numeric_limits<double>::infinity();
  for (const std::string key : {"VW:f*Vdag", "VW:Vdag*f", "VW:V*f", "VW:f*V"}) {
    const double dev = rpt.deviation.at(key);
    if (dev < rpt.best_deviation) {
      rpt.best_deviation = dev;
      rpt.best_variant = key;
    }
  }
  rpt.max_deviation = rpt.best_deviation;
  return rpt;
}

}  // namespace qwsi
