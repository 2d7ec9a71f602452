#include "qwsi/lattice.hpp"

#include <cmath>

namespace qwsi {

CellStructure::CellStructure(int x0, std::vector<int> dims) : x_min(x0), cell_dims(std::move(dims)) {
  if (cell_dims.empty()) throw std::invalid_argument("CellStructure: empty cell range");
  offs.resize(cell_dims.size() + 1);
  offs[0] = 0;
  for (size_t i = 0; i < cell_dims.size(); ++i) {
    if (cell_dims[i] < 1) throw std::invalid_argument("CellStructure: cell dimension < 1");
    offs[i + 1] = offs[i] + cell_dims[i];
  }
}

CellStructure CellStructure::uniform(int x_min, int x_max, int d) {
  if (x_max < x_min) throw std::invalid_argument("CellStructure: x_max < x_min");
  return CellStructure(x_min, std::vector<int>(x_max - x_min + 1, d));
}

StateVector::StateVector(const CellStructure& s, Vec v) : structure(s), data(std::move(v)) {
  if (data.size() != structure.total())
    throw std::invalid_argument("StateVector: data size does not match structure");
}

void BandedMatrix::set_block(int x, int y, Mat m) {
  if (!structure_.contains(x) || !structure_.contains(y))
    throw std::out_of_range("BandedMatrix::set_block: cell outside window");
  if (std::abs(x - y) > band_) throw std::invalid_argument("BandedMatrix::set_block: outside band");
  if (m.rows() != structure_.dim(x) || m.cols() != structure_.dim(y))
    throw std::invalid_argument("BandedMatrix::set_block: block shape mismatch");
  blocks_[{x, y}] = std::move(m);
}

void BandedMatrix::add_block(int x, int y, const Mat& m) {
  auto it = blocks_.find({x, y});
  if (it == blocks_.end())
    set_block(x, y, m);
  else
    it->second += m;
}

Mat BandedMatrix::block(int x, int y) const {
  auto it = blocks_.find({x, y});
  if (it != blocks_.end()) return it->second;
  return Mat::Zero(structure_.dim(x), structure_.dim(y));
}

Mat BandedMatrix::to_dense() const {
  Mat d = Mat::Zero(structure_.total(), structure_.total());
  for (const auto& [xy, m] : blocks_)
    d.block(structure_.offset(xy.first), structure_.offset(xy.second), m.rows(), m.cols()) = m;
  return d;
}

BandedMatrix BandedMatrix::adjoint() const {
  BandedMatrix r(structure_, band_);
  for (const auto& [xy, m] : blocks_) r.set_block(xy.second, xy.first, m.adjoint());
  return r;
}

void BandedMatrix::prune(double tol) {
  int band = 0;
  for (auto it = blocks_.begin(); it != blocks_.end();) {
    if (it->second.cwiseAbs().maxCoeff() <= tol) {
      it = blocks_.erase(it);
    } else {
      band = std::max(band, std::abs(it->first.first - it->first.second));
      ++it;
    }
  }
  band_ = band;
}

double BandedMatrix::max_block_entry() const {
  double m = 0;
  for (const auto& [xy, b] : blocks_) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

BandedMatrix multiply(const BandedMatrix& a, const BandedMatrix& b) {
  if (!(a.structure() == b.structure()))
    throw std::invalid_argument("multiply: mismatched cell structures");
  BandedMatrix r(a.structure(), a.band() + b.band());
  for (const auto& [xy, am] : a.blocks()) {
    auto [x, y] = xy;
    for (int z = y - b.band(); z <= y + b.band(); ++z) {
      if (!b.structure().contains(z) || !b.has_block(y, z)) continue;
      r.add_block(x, z, am * b.block(y, z));
    }
  }
  r.prune(0.0);
  return r;
}

BandedMatrix subtract(const BandedMatrix& a, const BandedMatrix& b) {
  if (!(a.structure() == b.structure()))
    throw std::invalid_argument("subtract: mismatched cell structures");
  BandedMatrix r(a.structure(), std::max(a.band(), b.band()));
  for (const auto& [xy, m] : a.blocks()) r.set_block(xy.first, xy.second, m);
  for (const auto& [xy, m] : b.blocks()) r.add_block(xy.first, xy.second, -m);
  return r;
}

StateVector apply(const BandedMatrix& w, const StateVector& v) {
  if (!(w.structure() == v.structure))
    throw std::invalid_argument("apply: vector does not match operator window");
  StateVector out(w.structure());
  for (const auto& [xy, m] : w.blocks()) out.cell(xy.first) += m * v.cell(xy.second);
  return out;
}

Mat apply(const BandedMatrix& w, const Mat& x) {
  const CellStructure& s = w.structure();
  if (x.rows() != s.total())
    throw std::invalid_argument("apply: block does not match operator window");
  Mat out = Mat::Zero(x.rows(), x.cols());
  for (const auto& [xy, m] : w.blocks())
    out.middleRows(s.offset(xy.first), s.dim(xy.first)) +=
        m * x.middleRows(s.offset(xy.second), s.dim(xy.second));
  return out;
}

double unitarity_defect(const BandedMatrix& w) {
  BandedMatrix gram = multiply(w.adjoint(), w);
  const CellStructure& s = gram.structure();
  double defect = 0;
  for (int x = s.x_min; x <= s.x_max(); ++x) {
    for (int y = std::max(s.x_min, x - gram.band()); y <= std::min(s.x_max(), x + gram.band());
         ++y) {
      Mat expect = (x == y) ? Mat(Mat::Identity(s.dim(x), s.dim(x))) : Mat(Mat::Zero(s.dim(x), s.dim(y)));
      Mat have = gram.block(x, y);
      defect = std::max(defect, (have - expect).cwiseAbs().maxCoeff());
    }
  }
  return defect;
}

BandedUnitary::BandedUnitary(BandedMatrix m, double tol) : mat_(std::move(m)) {
  mat_.prune(0.0);
  double d = unitarity_defect(mat_);
  if (d > tol)
    throw std::runtime_error("BandedUnitary: unitarity defect " + std::to_string(d) +
                             " exceeds tolerance");
}

BandedUnitary BandedUnitary::slice(int x_lo, int x_hi, double tol) const {
  const CellStructure& s = structure();
  if (x_lo < s.x_min || x_hi > s.x_max() || x_lo > x_hi)
    throw std::out_of_range("BandedUnitary::slice: bad sub-range");
  std::vector<int> dims;
  for (int x = x_lo; x <= x_hi; ++x) dims.push_back(s.dim(x));
  BandedMatrix sub(CellStructure(x_lo, dims), mat_.band());
  for (const auto& [xy, m] : mat_.blocks()) {
    auto [x, y] = xy;
    bool xin = x >= x_lo && x <= x_hi, yin = y >= x_lo && y <= x_hi;
    if (xin && yin) {
      sub.set_block(x, y, m);
    } else if (xin != yin) {
      double leak = m.cwiseAbs().maxCoeff();
      if (leak > tol)
        throw std::runtime_error("BandedUnitary::slice: block crossing the sub-range boundary");
    }
  }
  return BandedUnitary(std::move(sub), tol * structure().total());
}

StateVector apply(const BandedUnitary& w, const StateVector& v) { return apply(w.banded(), v); }

int TIWalkSymbol::interaction_length() const {
  int L = 0;
  for (const auto& [j, m] : jumps) L = std::max(L, std::abs(j));
  return L;
}

Mat TIWalkSymbol::at(double k) const {
  Mat s = Mat::Zero(coin_dim, coin_dim);
  for (const auto& [j, m] : jumps) s += std::exp(cplx(0, k * j)) * m;
  return s;
}

double symbol_unitarity_defect(const TIWalkSymbol& s, int n_k) {
  double defect = 0;
  for (int i = 0; i < n_k; ++i) {
    double k = 2 * M_PI * i / n_k;
    Mat w = s.at(k);
    defect = std::max(defect,
                      (w.adjoint() * w - Mat::Identity(s.coin_dim, s.coin_dim)).cwiseAbs().maxCoeff());
  }
  return defect;
}

TIRealization ti_to_banded(const TIWalkSymbol& s, int x_lo, int x_hi) {
  TIRealization r;
  r.interior = BandedMatrix(CellStructure::uniform(x_lo, x_hi, s.coin_dim), s.interaction_length());
  for (int x = x_lo; x <= x_hi; ++x) {
    for (const auto& [j, m] : s.jumps) {
      int y = x + j;
      if (y >= x_lo && y <= x_hi)
        r.interior.set_block(x, y, m);
      else
        r.crossing[{x, y}] = m;
    }
  }
  // blocks with the row cell outside the window (amplitude leaving the window)
  for (const auto& [j, m] : s.jumps) {
    if (j == 0) continue;
    for (int y = x_lo; y <= x_hi; ++y) {
      int x = y - j;  // block (x, y) carries jumps[j] whenever y = x + j
      if (x < x_lo || x > x_hi) r.crossing[{x, y}] = m;
    }
  }
  return r;
}

}  // namespace qwsi
