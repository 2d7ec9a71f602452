#pragma once
// Block-banded operators on a finite range of lattice cells.
//
// A walk acts on H = ⊕_x H_x where x runs over a contiguous range of cells
// and dim H_x is small (2 for the coined walks in models.hpp).  Operators
// are stored as maps (x, y) -> block, with |x - y| bounded by the
// interaction length.  Block (x, y) is the matrix element <x|W|y>, i.e. it
// maps amplitudes at cell y to amplitudes at cell x.

#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace qwsi {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Contiguous range of cells [x_min, x_max] with per-cell dimensions.
struct CellStructure {
  int x_min = 0;
  std::vector<int> cell_dims;  // cell_dims[i] = dim of cell x_min + i, all >= 1
  std::vector<int> offs;       // prefix sums, offs.size() == cell_dims.size() + 1

  CellStructure() { offs = {0}; }
  CellStructure(int x0, std::vector<int> dims);
  static CellStructure uniform(int x_min, int x_max, int d);

  int x_max() const { return x_min + static_cast<int>(cell_dims.size()) - 1; }
  int cells() const { return static_cast<int>(cell_dims.size()); }
  int total() const { return offs.back(); }
  bool contains(int x) const { return x >= x_min && x <= x_max(); }
  int dim(int x) const { return cell_dims.at(x - x_min); }
  int offset(int x) const { return offs.at(x - x_min); }
  bool operator==(const CellStructure& o) const {
    return x_min == o.x_min && cell_dims == o.cell_dims;
  }
};

// Vector on ⊕_x H_x, components stored cell-major in cell order.
struct StateVector {
  CellStructure structure;
  Vec data;

  StateVector() = default;
  explicit StateVector(const CellStructure& s) : structure(s), data(Vec::Zero(s.total())) {}
  StateVector(const CellStructure& s, Vec v);

  Eigen::VectorBlock<Vec> cell(int x) { return data.segment(structure.offset(x), structure.dim(x)); }
  Eigen::VectorBlock<const Vec> cell(int x) const {
    return data.segment(structure.offset(x), structure.dim(x));
  }
  double norm() const { return data.norm(); }
  // probability mass per cell, |v_x|^2
  double cell_mass(int x) const { return cell(x).squaredNorm(); }
};

// General block-banded matrix (no unitarity claim).  Zero blocks are absent.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(CellStructure s, int band) : structure_(std::move(s)), band_(band) {}

  const CellStructure& structure() const { return structure_; }
  int band() const { return band_; }
  const std::map<std::pair<int, int>, Mat>& blocks() const { return blocks_; }

  void set_block(int x, int y, Mat m);
  void add_block(int x, int y, const Mat& m);
  bool has_block(int x, int y) const { return blocks_.count({x, y}) > 0; }
  // returns the stored block or a zero matrix of the right shape
  Mat block(int x, int y) const;

  Mat to_dense() const;
  BandedMatrix adjoint() const;
  // drops blocks with max |entry| <= tol, shrinking the band if possible
  void prune(double tol = 0.0);
  double max_block_entry() const;

 private:
  CellStructure structure_;
  int band_ = 0;
  std::map<std::pair<int, int>, Mat> blocks_;
};

BandedMatrix multiply(const BandedMatrix& a, const BandedMatrix& b);
BandedMatrix subtract(const BandedMatrix& a, const BandedMatrix& b);
StateVector apply(const BandedMatrix& w, const StateVector& v);
// column-wise application to a dense block of vectors (total_dim rows)
Mat apply(const BandedMatrix& w, const Mat& x);

// Banded operator claimed unitary on its window; check_unitary tests the claim.
class BandedUnitary {
 public:
  BandedUnitary() = default;
  // verifies unitarity within tol, throws std::runtime_error on failure
  BandedUnitary(BandedMatrix m, double tol = 1e-12);

  const CellStructure& structure() const { return mat_.structure(); }
  int interaction_length() const { return mat_.band(); }
  const BandedMatrix& banded() const { return mat_; }
  Mat block(int x, int y) const { return mat_.block(x, y); }
  Mat to_dense() const { return mat_.to_dense(); }

  // restriction to a sub-range of cells; requires no blocks crossing the
  // sub-range boundary (i.e. the walk must already be decoupled there)
  BandedUnitary slice(int x_lo, int x_hi, double tol = 1e-12) const;

 private:
  BandedMatrix mat_;
};

// max |(W†W - 1)| entry over the window, computed blockwise
double unitarity_defect(const BandedMatrix& w);
inline bool check_unitary(const BandedMatrix& w, double tol = 1e-12) {
  return unitarity_defect(w) <= tol;
}

StateVector apply(const BandedUnitary& w, const StateVector& v);

// Translation-invariant walk given by its jump blocks: jumps[j] = <x|W|x+j>,
// so the symbol W(k) = Σ_j e^{ikj} W_j multiplies plane waves e^{ikx} v.
struct TIWalkSymbol {
  int coin_dim = 0;
  std::map<int, Mat> jumps;

  int interaction_length() const;
  Mat at(double k) const;
};

inline Mat symbol_at(const TIWalkSymbol& s, double k) { return s.at(k); }

// checks W(k) unitary on n_k uniform samples of [0, 2π)
double symbol_unitarity_defect(const TIWalkSymbol& s, int n_k = 64);

// Materialization of a TI walk on a finite range.  `interior` holds the
// blocks with both cells inside the window; `crossing` holds nonzero blocks
// with exactly one endpoint inside.  The interior part alone is NOT unitary
// unless the crossing blocks vanish; callers must apply a boundary
// decoupling (see models.hpp) before treating the window as a closed system.
struct TIRealization {
  BandedMatrix interior;
  std::map<std::pair<int, int>, Mat> crossing;
};

TIRealization ti_to_banded(const TIWalkSymbol& s, int x_lo, int x_hi);

}  // namespace qwsi
