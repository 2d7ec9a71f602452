#pragma once
// The index table of a decoupled walk and its invariance checks.
//
// A walk decoupled at an interior cut splits into left and right blocks.
// Diagonalizing each block yields eigenspaces at ±1 whose states localize
// either at the cut or at the outer window boundary; only cut-attributed
// states carry the half-line indices.  Column sums of the resulting 2×2
// table give the invariants si← (left), si→ (right) and their total; row
// sums reproduce the gap indices si₊, si₋ of the uncut walk exactly when
// the decoupling is gentle.

#include <functional>
#include <stdexcept>

#include "qwsi/models.hpp"
#include "qwsi/spectral.hpp"

namespace qwsi {

// 2×2 table of half-line indices at one cut plus all marginals, every entry
// an element of the type's index group.
struct IndexTable {
  TaggedIndex si_plus_left, si_plus_right, si_minus_left, si_minus_right;
  TaggedIndex si_plus, si_minus;       // row sums
  TaggedIndex si_left, si_right;       // column sums: si←, si→
  TaggedIndex si_total;                // si = si← + si→
  DecouplingKind decoupling_kind = DecouplingKind::Gentle;
};

// Assembles the marginals from the four entries in exact group arithmetic.
IndexTable make_index_table(TaggedIndex plus_left, TaggedIndex plus_right,
                            TaggedIndex minus_left, TaggedIndex minus_right,
                            DecouplingKind kind);

// An eigenvector could not be attributed to an edge (localization spread
// across the window); the window is too small.
class AttributionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Window-size escalation exhausted without resolving an ambiguity.
class EscalationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The off-diagonal curve approaches the origin: gap closed, winding undefined.
class WindingUndefinedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WindingResult {
  int winding = 0;
  double min_modulus = 0.0;  // closest approach of the curve to the origin
  int samples_used = 0;
  double residue = 0.0;      // |accumulated/2π − winding|, must be < 1e−6
};

// Winding number of the chirally off-diagonal matrix element of the symbol.
// Convention (fixed once for the library): transform W(k) into the
// eigenbasis of gamma_cell with the +1 eigenvector first, track the (2,1)
// entry as k increases from 0 to 2π, accumulate phase increments with
// adaptive refinement (each step |Δarg| < π/2).  The orientation is chosen
// so that the winding equals si→ computed from a decoupled half line.
WindingResult bulk_winding(const TIWalkSymbol& s, const Mat& gamma_cell,
                           int initial_samples = 256,
                           double min_modulus_threshold = 1e-10);

// Symmetry index of the representation restricted to the report's basis.
TaggedIndex si_point(const EigenspaceReport& report, const SymmetryRep& rep);

// Ambiguity band radius for eigenvalue clusters near λ = ±1, sized from the
// window's known bulk gap so genuine band states never fall inside it
// (min(0.45·gap, 0.05)); returns 0 — band disabled — when the gap is unknown
// or the band would not clear 10× the eigenvalue tolerance.  All index
// routines size their eigenspace_near calls with this.
double spectral_ambiguity_radius(const WalkWindow& w, double lambda, double tol_eig);

// Gap index si_λ of the walk itself, evaluated on a sealed window without
// interior cuts: counts only interior-localized eigenstates (middle-third
// mass > share), excluding the seal artifacts at the window boundary.
TaggedIndex si_gap_interior(const WalkWindow& w, double lambda, double tol_eig = 1e-8,
                            double share = 0.9);

// Half-line indices of a window decoupled at `cut`.  Throws
// ClusterAmbiguityError / AttributionError when the window is too small,
// std::invalid_argument for DIII representations (half-line indices are only
// defined for the first four types).
IndexTable half_line_indices(const WalkWindow& w, int cut, double tol_eig = 1e-8);

// Escalating variant: builds the window via `build(half_width)` starting at
// initial_half_width, doubling on ambiguity up to three times.
using WindowBuilder = std::function<WalkWindow(int half_width)>;
IndexTable half_line_indices(const WindowBuilder& build, int initial_half_width, int cut,
                             double tol_eig = 1e-8);

struct CutIndependenceReport {
  bool ok = false;
  int x0 = 0, x1 = 0;
  TaggedIndex si_right_at_x0, si_right_at_x1;
  TaggedIndex si_middle;  // index of the doubly-decoupled middle block, must be 0
};

// Verifies that si→ does not depend on the cut position: computes si→ at two
// cuts with gentle decouplings and the total index of the middle block
// between them (which must vanish exactly for balanced cells).
CutIndependenceReport verify_cut_independence(const RecipeWindowBuilder& build, int x0,
                                              int x1, int half_width,
                                              double tol_eig = 1e-8);

struct GentleLocalComparison {
  IndexTable gentle;
  IndexTable local;
  bool columns_match = false;  // si←, si→, si_total agree between the tables
  bool rows_differ = false;    // some row entry differs between the tables
};

// Runs the same cut with the gentle and the reflection recipe and compares
// the tables: column marginals must agree (they are invariants); row splits
// may differ (they are not protected under non-gentle decouplings).
GentleLocalComparison compare_gentle_vs_local(const RecipeWindowBuilder& build, int cut,
                                              int half_width, double tol_eig = 1e-8);

}  // namespace qwsi
