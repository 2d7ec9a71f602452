#pragma once
// Band structure of translation-invariant symbols, essential-gap reports,
// and dense eigenspace extraction near the symmetry-protected points ±1 on
// finite windows.

#include <optional>
#include <stdexcept>
#include <vector>

#include "qwsi/lattice.hpp"
#include "qwsi/symmetry.hpp"

namespace qwsi {

// Eigenphases of the walk symbol over a uniform quasi-momentum grid.
struct BandStructure {
  std::vector<double> k_grid;                     // sorted, in [0, 2π)
  std::vector<std::vector<double>> eigenphases;   // per k, sorted, in (−π, π]
};

// Minimal arc distance of the bands to the two protected points:
// +1 corresponds to phase 0, −1 to phase ±π.
struct GapReport {
  double gap_at_plus = 0.0;
  double gap_at_minus = 0.0;
  bool closed_plus = false;
  bool closed_minus = false;
  double threshold = 1e-3;
};

enum class EdgeSide { Left, Right, Ambiguous };
std::string to_string(EdgeSide s);

// Probability mass of a normalized window vector split into thirds of the
// cell range, plus the position expectation.
struct LocalizationProfile {
  double center = 0.0;
  double edge_mass_left = 0.0;
  double edge_mass_right = 0.0;
  double middle_mass = 0.0;
};

// Eigenvalues straddle the cluster boundary: the requested tolerance cannot
// separate the ±1 eigenspace from the rest of the spectrum, which signals
// that the window is too small.  Callers escalate the window size.
class ClusterAmbiguityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Orthonormal basis of the eigenspace of a finite window unitary near
// λ = ±1, with per-vector residuals, position expectations, and edge
// attribution.  Degenerate clusters are rotated to diagonalize the position
// operator, which separates exponentially localized edge states living at
// different ends of the same decoupled block.
struct EigenspaceReport {
  double eigenvalue_target = 1.0;
  CellStructure structure{0, {1}};
  Mat basis;                           // total_dim × dimension, orthonormal
  std::vector<double> residuals;       // ‖(W − λ) v‖ per column
  std::vector<double> centers;         // position expectation per column
  std::vector<EdgeSide> edge_attribution;
  std::optional<double> chirality_trace;  // Re tr(B† γ B) when γ supplied
  int dimension = 0;

  StateVector vector(int i) const { return StateVector{structure, basis.col(i)}; }
};

BandStructure band_structure(const TIWalkSymbol& s, int n_k);
GapReport essential_gap(const TIWalkSymbol& s, int n_k, double threshold = 1e-3);
GapReport essential_gap(const BandStructure& b, double threshold = 1e-3);

LocalizationProfile localization_profile(const StateVector& v);

// Attribution rule: Left if edge_mass_left > share, Right if
// edge_mass_right > share, else Ambiguous.
EdgeSide attribute_edge(const LocalizationProfile& p, double share = 0.9);

// Dense diagonalization of the window unitary; collects all eigenvectors
// whose eigenvalue lies within tol_eig (arc length) of the target.  Throws
// ClusterAmbiguityError when eigenvalues fall between tol_eig and
// max(10×tol_eig, suspect_radius) of the target: such eigenvalues are
// either straddling the cluster boundary or sitting suspiciously deep in
// the essential gap, which on a finite window usually means a pair of
// exact ±1 edge states hybridized across the window (the window is too
// small, or the pair needs explicit resolution).  Callers that know the
// bulk gap should pass a suspect_radius well inside it.  When `rep` is
// given and carries a chiral generator, the report includes the chirality
// trace over the basis.
EigenspaceReport eigenspace_near(const BandedUnitary& w, double lambda_target,
                                 double tol_eig = 1e-8, const SymmetryRep* rep = nullptr,
                                 double suspect_radius = 0.0);

}  // namespace qwsi
