#pragma once
// Concrete walk families and their decoupling constructions.
//
// Split-step walk:  W = B S↓ A S↑ B   with A_x = R(θ2(x)), B_x = R(θ1(x)/2),
// chiral symmetry gamma = ⊕ sigma1, particle-hole eta = complex conjugation
// (type BDI).  Four-step walk:  W = C S↑ B S↑ A S↓ B S↓ C with rotation
// coins A, B, C; optionally each C_x is right-multiplied by a fixed unitary
// "garnish" that breaks eta while keeping gamma (type AIII).
//
// S↑ moves the spin-up component one cell to the right, S↓ moves spin-down
// one cell to the left.  All finite windows are sealed at their outer
// boundaries with the gentle decoupling, so the window operator is exactly
// unitary; interior cuts are produced by the same substitution mechanism.

#include <functional>

#include "qwsi/lattice.hpp"
#include "qwsi/symmetry.hpp"

namespace qwsi {

enum class WalkModel { SplitStep, FourStep };
enum class CoinLabel { A, B, C };
enum class DecouplingKind { Gentle, Local };

std::string to_string(WalkModel m);
std::string to_string(CoinLabel l);
std::string to_string(DecouplingKind k);

// R(θ) = [[cos θ, -sin θ], [sin θ, cos θ]];  R(θ)·sigma1 is real symmetric,
// so every rotation coin is admissible for gamma = sigma1.
Mat rotation(double theta);
Mat sigma1();
Mat gentle_coin();    // i sigma2 = R(π/2), the gentle decoupling coin
Mat garnish_coin();   // [[i, 1], [-1, -i]]/sqrt(2)

// Per-site coin angles per label, with optional explicit per-site overrides.
struct CoinProfile {
  std::map<CoinLabel, std::function<double(int)>> angles;
  std::map<std::pair<CoinLabel, int>, Mat> overrides;

  double angle(CoinLabel l, int x) const { return angles.at(l)(x); }
  bool has_override(CoinLabel l, int x) const { return overrides.count({l, x}) > 0; }
  // override if present, else R(angle); the four-step garnish is applied by
  // the builder, not here
  Mat coin(CoinLabel l, int x) const;
};

// θ1, θ2 are the physical split-step angles; the B coin carries θ1(x)/2.
CoinProfile split_step_profile(std::function<double(int)> theta1,
                               std::function<double(int)> theta2);
CoinProfile split_step_profile(double theta1, double theta2);
CoinProfile four_step_profile(std::function<double(int)> a, std::function<double(int)> b,
                              std::function<double(int)> c);
CoinProfile four_step_profile(double a, double b, double c);

// Angle profiles joining two parameter sets: left values for x < -w/2,
// right values for x > w/2, linear interpolation across the ramp.  With
// w = 0 the junction is sharp between cells -1 and 0.  `left`/`right` hold
// the model parameters in factory order (θ1, θ2) or (θa, θb, θc).
CoinProfile crossover(WalkModel model, const std::vector<double>& left,
                      const std::vector<double>& right, int ramp_width);

struct Substitution {
  CoinLabel label;
  int site;
  Mat value;
};

// Coin substitutions that cut the walk between cells x0-1 and x0.  The
// substitution sets are model constants:
//   split-step: A at x0;   four-step: A and B at x0-1.
// Gentle recipes substitute R(π/2) and carry an angle-interpolation path
// from the profile's original coins; the reflection recipe substitutes
// sigma1 and carries no path (within real coins the determinant jumps from
// +1 to -1, so no rotation path exists).
struct DecouplingRecipe {
  int cut = 0;
  DecouplingKind kind = DecouplingKind::Gentle;
  std::vector<Substitution> subs;
  std::function<std::vector<Substitution>(double)> path;  // gentle only, t ∈ [0, 1]
};

DecouplingRecipe decoupler_gentle(WalkModel model, const CoinProfile& profile, int cut);
DecouplingRecipe decoupler_reflection(WalkModel model, int cut);

// A finite-window walk with its symmetry representation.
struct WalkWindow {
  BandedUnitary walk;
  SymmetryRep rep;
  WalkModel model = WalkModel::SplitStep;
  // interior cut positions (verified decoupled) with their recipe kinds
  std::vector<std::pair<int, DecouplingKind>> cuts;
  // Asymptotic bulk gaps, taken as the minimum over the two window-endpoint
  // parameter sets (for a crossover profile those are the two bulks).  Index
  // routines size their spectral ambiguity bands from these; 0 means
  // unknown, which disables the band.
  double bulk_gap_plus = 0.0;
  double bulk_gap_minus = 0.0;

  DecouplingKind kind_of_cut(int cut) const;
};

// Builds the window [x_min, x_max] with outer gentle seals and the given
// interior cuts.  Every cut is verified decoupled at construction; the
// result is verified unitary.  Throws on any violation.
WalkWindow build_walk(WalkModel model, const CoinProfile& profile, bool garnish, int x_min,
                      int x_max, const std::vector<DecouplingRecipe>& interior_cuts = {});

WalkWindow split_step(const CoinProfile& profile, int x_min, int x_max,
                      const std::vector<DecouplingRecipe>& interior_cuts = {});
WalkWindow four_step(const CoinProfile& profile, bool garnish, int x_min, int x_max,
                     const std::vector<DecouplingRecipe>& interior_cuts = {});

// Bulk symbol of the translation-invariant walk with the given constant
// parameters (read off from an assembled window, so it shares every
// convention with the finite builders).
TIWalkSymbol split_step_symbol(double theta1, double theta2);
TIWalkSymbol four_step_symbol(double a, double b, double c, bool garnish);
TIWalkSymbol walk_symbol(WalkModel model, const std::vector<double>& params, bool garnish);

// No nonzero block crosses the cut between cells x0-1 and x0.
bool verify_decoupled(const BandedMatrix& w, int cut, double tol = 1e-12);
inline bool verify_decoupled(const BandedUnitary& w, int cut, double tol = 1e-12) {
  return verify_decoupled(w.banded(), cut, tol);
}

// Samples the recipe's path and rebuilds the walk at each t, requiring
// unitarity and admissibility throughout, plus matching endpoints
// (path(0) = original coins, path(1) = recipe substitutions).  Returns
// false on any violation; throws if the recipe carries no path.
bool gentle_path_check(WalkModel model, const CoinProfile& profile, bool garnish,
                       const DecouplingRecipe& recipe, int x_min, int x_max, int samples = 21);

// Rebuilds windows of one walk family on demand: span [lo, hi] with the
// given interior cuts realized by the named recipe kinds.  Used by index
// routines that escalate window sizes or vary the cut placement.
using RecipeWindowBuilder = std::function<WalkWindow(
    int lo, int hi, const std::vector<std::pair<int, DecouplingKind>>& cuts)>;

RecipeWindowBuilder model_window_builder(WalkModel model, CoinProfile profile, bool garnish);

// Bundled four-step example configuration: constant angles, garnished, both gaps
// open and bulk winding +1 (certified in the test suite).
CoinProfile four_step_example();
extern const double kFourStepExampleA;
extern const double kFourStepExampleB;
extern const double kFourStepExampleC;

}  // namespace qwsi
