#pragma once
// Discrete symmetry types of gapped walks and their index formulas.
//
// Five admissible combinations of particle-hole (eta, antiunitary), time
// reversal (tau, antiunitary) and chiral symmetry (gamma, unitary):
//
//   label  eta^2  tau^2  gamma^2  index group   index of a finite rep on E
//   D      +1     -      -        Z_2           dim E mod 2
//   AIII   -      -      +1       Z             tr gamma|E
//   BDI    +1     +1     +1       Z             tr gamma|E
//   CII    -1     -1     +1       2Z            tr gamma|E (always even)
//   DIII   +1     -1     -1       2Z_2          dim E mod 4 (in {0, 2})
//
// A walk W is admissible when eta W = W eta, tau W = W† tau, gamma W = W† gamma.
// Generators commute pairwise; when all three are present their squares
// multiply to +1 and we fix phases so that tau = gamma eta.

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "qwsi/lattice.hpp"

namespace qwsi {

enum class SymClass { D, AIII, BDI, CII, DIII };
enum class Gen { Eta, Tau, Gamma };
enum class IndexGroup { Z, Z2, TwoZ, TwoZ2 };

std::string to_string(SymClass c);
std::string to_string(Gen g);
std::string to_string(IndexGroup g);

struct SymmetryType {
  SymClass label;
  std::array<bool, 3> present;  // indexed by Gen
  std::array<int, 3> square;    // ±1, meaningful where present
  IndexGroup group;

  bool has(Gen g) const { return present[static_cast<int>(g)]; }
  int square_of(Gen g) const { return square[static_cast<int>(g)]; }
};

// Table row for one of the five labels.
SymmetryType symmetry_type(SymClass c);

// Element of the type's index group, tagged so that arithmetic stays inside
// the group: Z_2 reduces mod 2, 2Z_2 mod 4, 2Z checks evenness.
struct TaggedIndex {
  IndexGroup group = IndexGroup::Z;
  int value = 0;

  static TaggedIndex zero(IndexGroup g) { return {g, 0}; }
  static TaggedIndex make(IndexGroup g, int raw);  // canonicalizes, validates 2Z parity

  TaggedIndex operator+(const TaggedIndex& o) const;
  TaggedIndex operator-() const;
  TaggedIndex operator-(const TaggedIndex& o) const { return *this + (-o); }
  bool operator==(const TaggedIndex& o) const { return group == o.group && value == o.value; }
  bool is_zero() const { return value == 0; }
};

std::string to_string(const TaggedIndex& t);

// A (possibly anti-) unitary operator v -> U v or v -> U conj(v).
struct AntiUnitaryOp {
  Mat matrix;
  bool conjugates = false;

  Vec apply(const Vec& v) const { return conjugates ? Vec(matrix * v.conjugate()) : Vec(matrix * v); }
  // op W op^{-1} with the conjugation bookkeeping done here
  Mat sandwich(const Mat& w) const {
    return conjugates ? Mat(matrix * w.conjugate() * matrix.adjoint())
                      : Mat(matrix * w * matrix.adjoint());
  }
  // square sign: op^2 = ±1; throws if op^2 is not a sign
  int square_sign(double tol = 1e-12) const;
};

inline Mat antiunitary_sandwich(const AntiUnitaryOp& op, const Mat& w) { return op.sandwich(w); }

// Symmetry representation on a window: one generator matrix per cell.
// Cells are independent (generators act on-site).
class SymmetryRep {
 public:
  SymmetryRep() : type_(symmetry_type(SymClass::D)) {}
  // per-cell generator matrices; gens[g].size() must equal structure.cells()
  SymmetryRep(SymmetryType type, CellStructure structure,
              std::map<Gen, std::vector<Mat>> gens, double tol = 1e-12);
  // same generator matrix at every cell
  static SymmetryRep uniform(SymmetryType type, const CellStructure& s,
                             const std::map<Gen, Mat>& cell_ops, double tol = 1e-12);

  const SymmetryType& type() const { return type_; }
  const CellStructure& structure() const { return structure_; }
  Mat cell_op(Gen g, int x) const;
  // block-diagonal operator over the whole window
  AntiUnitaryOp window_op(Gen g) const;
  // restriction of the rep to a contiguous sub-range of cells
  SymmetryRep slice(int x_lo, int x_hi) const;

 private:
  SymmetryType type_;
  CellStructure structure_;
  std::map<Gen, std::vector<Mat>> gens_;
};

// Admissibility of a banded walk under every generator the type declares.
struct AdmissibilityReport {
  bool ok = true;
  double tol = 0;
  std::map<Gen, double> defect;  // max |op W op^{-1} - target| per generator
  double worst() const;
};

AdmissibilityReport check_admissible(const BandedMatrix& w, const SymmetryRep& rep,
                                     double tol = 1e-10);
inline AdmissibilityReport check_admissible(const BandedUnitary& w, const SymmetryRep& rep,
                                            double tol = 1e-10) {
  return check_admissible(w.banded(), rep, tol);
}

// Index of the rep restricted to an invariant subspace.  `basis` holds
// orthonormal columns spanning the subspace (in window coordinates).
// Preconditions checked: orthonormality, invariance under every present
// generator; for chiral formulas the trace must round to an integer within
// `round_tol`, and CII traces must be even, DIII dimensions in {0, 2} mod 4.
TaggedIndex rep_index(const SymmetryRep& rep, const Mat& basis, double invariance_tol = 1e-6,
                      double round_tol = 1e-6);

// True when the full cell space at x carries index zero (e.g. tr gamma = 0),
// the condition for cut-independent half-line indices.
bool check_balanced(const SymmetryRep& rep, int x, double tol = 1e-10);

}  // namespace qwsi
