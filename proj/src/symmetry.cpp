#include "qwsi/symmetry.hpp"

#include <cmath>

namespace qwsi {

std::string to_string(SymClass c) {
  switch (c) {
    case SymClass::D: return "D";
    case SymClass::AIII: return "AIII";
    case SymClass::BDI: return "BDI";
    case SymClass::CII: return "CII";
    case SymClass::DIII: return "DIII";
  }
  return "?";
}

std::string to_string(Gen g) {
  switch (g) {
    case Gen::Eta: return "eta";
    case Gen::Tau: return "tau";
    case Gen::Gamma: return "gamma";
  }
  return "?";
}

std::string to_string(IndexGroup g) {
  switch (g) {
    case IndexGroup::Z: return "Z";
    case IndexGroup::Z2: return "Z2";
    case IndexGroup::TwoZ: return "2Z";
    case IndexGroup::TwoZ2: return "2Z2";
  }
  return "?";
}

SymmetryType symmetry_type(SymClass c) {
  auto idx = [](Gen g) { return static_cast<int>(g); };
  SymmetryType t;
  t.label = c;
  t.present = {false, false, false};
  t.square = {0, 0, 0};
  switch (c) {
    case SymClass::D:
      t.present[idx(Gen::Eta)] = true;
      t.square[idx(Gen::Eta)] = +1;
      t.group = IndexGroup::Z2;
      break;
    case SymClass::AIII:
      t.present[idx(Gen::Gamma)] = true;
      t.square[idx(Gen::Gamma)] = +1;
      t.group = IndexGroup::Z;
      break;
    case SymClass::BDI:
      t.present = {true, true, true};
      t.square[idx(Gen::Eta)] = +1;
      t.square[idx(Gen::Tau)] = +1;
      t.square[idx(Gen::Gamma)] = +1;
      t.group = IndexGroup::Z;
      break;
    case SymClass::CII:
      t.present = {true, true, true};
      t.square[idx(Gen::Eta)] = -1;
      t.square[idx(Gen::Tau)] = -1;
      t.square[idx(Gen::Gamma)] = +1;
      t.group = IndexGroup::TwoZ;
      break;
    case SymClass::DIII:
      t.present = {true, true, true};
      t.square[idx(Gen::Eta)] = +1;
      t.square[idx(Gen::Tau)] = -1;
      t.square[idx(Gen::Gamma)] = -1;
      t.group = IndexGroup::TwoZ2;
      break;
  }
  return t;
}

TaggedIndex TaggedIndex::make(IndexGroup g, int raw) {
  switch (g) {
    case IndexGroup::Z:
      return {g, raw};
    case IndexGroup::Z2: {
      int v = ((raw % 2) + 2) % 2;
      return {g, v};
    }
    case IndexGroup::TwoZ:
      if (raw % 2 != 0)
        throw std::runtime_error("TaggedIndex: odd value in group 2Z");
      return {g, raw};
    case IndexGroup::TwoZ2: {
      int v = ((raw % 4) + 4) % 4;
      if (v % 2 != 0)
        throw std::runtime_error("TaggedIndex: value " + std::to_string(raw) + " not in 2Z_2");
      return {g, v};
    }
  }
  return {g, raw};
}

TaggedIndex TaggedIndex::operator+(const TaggedIndex& o) const {
  if (group != o.group) throw std::invalid_argument("TaggedIndex: adding across groups");
  return make(group, value + o.value);
}

TaggedIndex TaggedIndex::operator-() const { return make(group, -value); }

std::string to_string(const TaggedIndex& t) {
  return std::to_string(t.value) + " (" + to_string(t.group) + ")";
}

int AntiUnitaryOp::square_sign(double tol) const {
  Mat sq = conjugates ? Mat(matrix * matrix.conjugate()) : Mat(matrix * matrix);
  int n = static_cast<int>(sq.rows());
  if ((sq - Mat::Identity(n, n)).cwiseAbs().maxCoeff() <= tol) return +1;
  if ((sq + Mat::Identity(n, n)).cwiseAbs().maxCoeff() <= tol) return -1;
  throw std::runtime_error("AntiUnitaryOp: square is not ±1");
}

namespace {

bool gen_conjugates(Gen g) { return g != Gen::Gamma; }

// commutation of two generators as operators, antiunitarity included:
// unitary A, unitary B:        A B = B A
// unitary A, antiunitary B:    A B_m = B_m conj(A)
// antiunitary A, antiunitary B: A_m conj(B_m) = B_m conj(A_m)
double commutation_defect(Gen ga, const Mat& a, Gen gb, const Mat& b) {
  bool ca = gen_conjugates(ga), cb = gen_conjugates(gb);
  Mat lhs, rhs;
  if (!ca && !cb) {
    lhs = a * b;
    rhs = b * a;
  } else if (!ca && cb) {
    lhs = a * b;
    rhs = b * a.conjugate();
  } else if (ca && !cb) {
    lhs = a * b.conjugate();
    rhs = b * a;
  } else {
    lhs = a * b.conjugate();
    rhs = b * a.conjugate();
  }
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace

SymmetryRep::SymmetryRep(SymmetryType type, CellStructure structure,
                         std::map<Gen, std::vector<Mat>> gens, double tol)
    : type_(type), structure_(std::move(structure)), gens_(std::move(gens)) {
  for (Gen g : {Gen::Eta, Gen::Tau, Gen::Gamma}) {
    bool need = type_.has(g), have = gens_.count(g) > 0;
    if (need != have)
      throw std::invalid_argument("SymmetryRep: generator set does not match type " +
                                  to_string(type_.label));
    if (!have) continue;
    const auto& v = gens_.at(g);
    if (static_cast<int>(v.size()) != structure_.cells())
      throw std::invalid_argument("SymmetryRep: one generator matrix per cell required");
    for (int i = 0; i < structure_.cells(); ++i) {
      int x = structure_.x_min + i;
      const Mat& m = v[i];
      int d = structure_.dim(x);
      if (m.rows() != d || m.cols() != d)
        throw std::invalid_argument("SymmetryRep: generator shape mismatch at cell " +
                                    std::to_string(x));
      if ((m.adjoint() * m - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("SymmetryRep: generator not unitary at cell " +
                                    std::to_string(x));
      AntiUnitaryOp op{m, gen_conjugates(g)};
      if (op.square_sign(tol) != type_.square_of(g))
        throw std::invalid_argument("SymmetryRep: square of " + to_string(g) +
                                    " does not match type " + to_string(type_.label));
    }
  }
  // pairwise commutation, phases fixed so generators commute exactly
  for (Gen ga : {Gen::Eta, Gen::Tau, Gen::Gamma})
    for (Gen gb : {Gen::Tau, Gen::Gamma}) {
      if (ga >= gb || !type_.has(ga) || !type_.has(gb)) continue;
      for (int i = 0; i < structure_.cells(); ++i) {
        double d = commutation_defect(ga, gens_.at(ga)[i], gb, gens_.at(gb)[i]);
        if (d > tol)
          throw std::invalid_argument("SymmetryRep: generators " + to_string(ga) + ", " +
                                      to_string(gb) + " do not commute (defect " +
                                      std::to_string(d) + ")");
      }
    }
}

SymmetryRep SymmetryRep::uniform(SymmetryType type, const CellStructure& s,
                                 const std::map<Gen, Mat>& cell_ops, double tol) {
  std::map<Gen, std::vector<Mat>> gens;
  for (const auto& [g, m] : cell_ops) gens[g] = std::vector<Mat>(s.cells(), m);
  return SymmetryRep(type, s, std::move(gens), tol);
}

Mat SymmetryRep::cell_op(Gen g, int x) const {
  if (!type_.has(g)) throw std::invalid_argument("SymmetryRep: generator not present");
  return gens_.at(g).at(x - structure_.x_min);
}

AntiUnitaryOp SymmetryRep::window_op(Gen g) const {
  Mat full = Mat::Zero(structure_.total(), structure_.total());
  for (int x = structure_.x_min; x <= structure_.x_max(); ++x) {
    int o = structure_.offset(x), d = structure_.dim(x);
    full.block(o, o, d, d) = cell_op(g, x);
  }
  return {full, gen_conjugates(g)};
}

SymmetryRep SymmetryRep::slice(int x_lo, int x_hi) const {
  std::vector<int> dims;
  for (int x = x_lo; x <= x_hi; ++x) dims.push_back(structure_.dim(x));
  CellStructure sub(x_lo, dims);
  std::map<Gen, std::vector<Mat>> gens;
  for (const auto& [g, v] : gens_)
    gens[g] = std::vector<Mat>(v.begin() + (x_lo - structure_.x_min),
                               v.begin() + (x_hi - structure_.x_min + 1));
  return SymmetryRep(type_, sub, std::move(gens));
}

double AdmissibilityReport::worst() const {
  double w = 0;
  for (const auto& [g, d] : defect) w = std::max(w, d);
  return w;
}

AdmissibilityReport check_admissible(const BandedMatrix& w, const SymmetryRep& rep, double tol) {
  if (!(w.structure() == rep.structure()))
    throw std::invalid_argument("check_admissible: walk and rep windows differ");
  AdmissibilityReport report;
  report.tol = tol;
  const CellStructure& s = w.structure();
  for (Gen g : {Gen::Eta, Gen::Tau, Gen::Gamma}) {
    if (!rep.type().has(g)) continue;
    bool conj = (g != Gen::Gamma);
    bool target_adjoint = (g != Gen::Eta);  // eta W = W eta; tau, gamma give W†
    double defect = 0;
    // blockwise: (op W op^{-1})_{xy} = U_x conj?(W_{xy}) U_y†
    for (int x = s.x_min; x <= s.x_max(); ++x) {
      int lo = std::max(s.x_min, x - w.band()), hi = std::min(s.x_max(), x + w.band());
      for (int y = lo; y <= hi; ++y) {
        Mat wxy = w.block(x, y);
        Mat lhs = rep.cell_op(g, x) * (conj ? wxy.conjugate() : wxy) * rep.cell_op(g, y).adjoint();
        Mat rhs = target_adjoint ? Mat(w.block(y, x).adjoint()) : wxy;
        defect = std::max(defect, (lhs - rhs).cwiseAbs().maxCoeff());
      }
    }
    report.defect[g] = defect;
    if (defect > tol) report.ok = false;
  }
  return report;
}

TaggedIndex rep_index(const SymmetryRep& rep, const Mat& basis, double invariance_tol,
                      double round_tol) {
  int n = static_cast<int>(basis.rows()), m = static_cast<int>(basis.cols());
  if (n != rep.structure().total())
    throw std::invalid_argument("rep_index: basis rows do not match the rep space");
  if (m == 0) return TaggedIndex::zero(rep.type().group);
  if ((basis.adjoint() * basis - Mat::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("rep_index: basis not orthonormal");

  // invariance under every present generator: (1 - P) g b_i must vanish
  Mat proj = basis * basis.adjoint();
  for (Gen g : {Gen::Eta, Gen::Tau, Gen::Gamma}) {
    if (!rep.type().has(g)) continue;
    AntiUnitaryOp op = rep.window_op(g);
    Mat image = op.conjugates ? Mat(op.matrix * basis.conjugate()) : Mat(op.matrix * basis);
    double defect = (image - proj * image).cwiseAbs().maxCoeff();
    if (defect > invariance_tol)
      throw std::runtime_error("rep_index: subspace not invariant under " + to_string(g) +
                               " (defect " + std::to_string(defect) + ")");
  }

  const SymmetryType& t = rep.type();
  if (t.label == SymClass::D) return TaggedIndex::make(t.group, m % 2);
  if (t.label == SymClass::DIII) {
    int v = m % 4;
    if (v % 2 != 0)
      throw std::runtime_error("rep_index: DIII eigenspace dimension " + std::to_string(m) +
                               " is odd, Kramers pairing violated");
    return TaggedIndex::make(t.group, v);
  }
  // chiral formula: tr gamma restricted to the subspace
  Mat gam = rep.window_op(Gen::Gamma).matrix;
  cplx tr = (basis.adjoint() * gam * basis).trace();
  if (std::abs(tr.imag()) > round_tol)
    throw std::runtime_error("rep_index: chirality trace has imaginary part " +
                             std::to_string(tr.imag()));
  double re = tr.real();
  int rounded = static_cast<int>(std::lround(re));
  if (std::abs(re - rounded) > round_tol)
    throw std::runtime_error("rep_index: chirality trace " + std::to_string(re) +
                             " does not round to an integer");
  if (t.label == SymClass::CII && rounded % 2 != 0)
    throw std::runtime_error("rep_index: odd CII trace " + std::to_string(rounded) +
                             " (Kramers pairing violated)");
  return TaggedIndex::make(t.group, rounded);
}

bool check_balanced(const SymmetryRep& rep, int x, double tol) {
  const CellStructure& s = rep.structure();
  int o = s.offset(x), d = s.dim(x);
  Mat basis = Mat::Zero(s.total(), d);
  basis.block(o, 0, d, d) = Mat::Identity(d, d);
  TaggedIndex idx = rep_index(rep, basis, tol, tol);
  return idx.is_zero();
}

}  // namespace qwsi
