#pragma once
// Matrix-valued Schur functions of a walk relative to a finite-dimensional
// subspace H₀: the first-return series
//
//   f(z) = Σ_{n≥1} z^{n−1} · P W (Q W)^{n−1} P,       Q = 1 − P,
//
// evaluated by banded iteration.  f is analytic and contractive on the unit
// disc, unitary on gap arcs of the circle.  Eigenspaces of W at λ = ±1
// (within the cyclic space generated from H₀) are canonically isomorphic to
// the fixed-point space of λ·f(λ), which eigendetect extracts.  A unitary V
// supported on H₀ changes the series by a one-sided factor; renewal_check
// measures all four candidate factorizations and reports which one holds.

#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwsi/lattice.hpp"
#include "qwsi/spectral.hpp"
#include "qwsi/symmetry.hpp"

namespace qwsi {

// H₀ is a union of per-cell component selections of a finite window walk.
struct SchurContext {
  BandedUnitary walk;
  // ordered (cell, component indices within the cell); the flattened order
  // defines the coordinates of matrices on H₀
  std::vector<std::pair<int, std::vector<int>>> h0;
  int trunc_n = 0;          // 0 → default 4 × window cell count
  double tol_series = 1e-8;
  // gap certificate for evaluations on the unit circle near ±1
  std::optional<GapReport> bulk_gap;

  int h0_dim() const;
  std::vector<int> h0_global_indices() const;  // validated window coordinates
  int effective_trunc() const;
};

// Whole-cell H₀ over the given cells.
SchurContext make_schur_context(BandedUnitary walk, const std::vector<int>& cells,
                                int trunc_n = 0, double tol_series = 1e-8);

// Series tail failed to fall below tol_series at the truncation order:
// z is too close to spectrum, or the window is too small.
class SchurConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Truncated series evaluation.  Preconditions: |z| ≤ 1; on the unit circle
// z must lie in a certified essential gap when a GapReport is attached.
// Postcondition checked: ‖f(z)‖ ≤ 1 + tol_series (+ rounding).
Mat schur_eval(const SchurContext& ctx, cplx z);

struct EigendetectReport {
  double eigenvalue_target = 1.0;
  int dimension = 0;
  Mat basis;                                // orthonormal columns on H₀
  std::vector<cplx> fixed_eigenvalues;      // eigenvalues of λf(λ) in the cluster
  double spectral_margin = 0.0;             // distance of the nearest excluded eigenvalue to 1
  std::optional<double> chirality_trace;    // over the fixed space, when γ supplied
};

// Fixed-point space of λ·f(λ): eigenvalues of the evaluated series within
// `tol` of 1 (chordal distance).  When `rep` is supplied and H₀ is invariant
// under its chiral generator, the chirality trace over the fixed space is
// included — it matches tr γ over the corresponding W-eigenspace.
EigendetectReport eigendetect(const SchurContext& ctx, double lambda, double tol = 5e-3,
                              const SymmetryRep* rep = nullptr);

struct RenewalReport {
  // variant label → max deviation over the z samples; labels are
  // "VW:f*Vdag", "VW:Vdag*f", "VW:V*f", "VW:f*V" (perturbed walk V·W against
  // the four one-sided factorizations of f) and the same four for W·V.
  std::map<std::string, double> deviation;
  std::string best_variant;      // smallest-deviation VW variant
  double best_deviation = 0.0;
  double max_deviation = 0.0;    // alias of best_deviation (the operation's result)
};

// Empirically pins the renewal identity: evaluates the Schur functions of
// V·W and W·V (V unitary on H₀, identity elsewhere) and compares against
// f·V†, V†·f, V·f, f·V at the given z samples.
RenewalReport renewal_check(const SchurContext& ctx, const Mat& v_on_h0,
                            const std::vector<cplx>& z_samples);

}  // namespace qwsi
