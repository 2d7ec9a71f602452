#pragma once
// Random admissible single-cell symmetry representations with an invariant
// subspace of known index, for all five symmetry classes.  Each sample draws
// a canonical-form representation, picks a subspace whose index is known by
// construction, and conjugates everything by a Haar-random unitary so the
// tested code never sees the canonical basis.

#include <random>
#include <stdexcept>
#include <vector>

#include "qwsi/symmetry.hpp"

#include <Eigen/QR>

namespace qwsi::testgen {

struct RepSample {
  SymmetryRep rep;
  Mat basis;            // orthonormal columns spanning an invariant subspace
  TaggedIndex expected;  // its index, known by construction
};

inline Mat haar_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = cplx(gauss(rng), gauss(rng));
  const Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}

inline Mat haar_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = gauss(rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i)
    if (r(i, i) < 0) q.col(i) *= -1.0;
  return q.cast<cplx>();
}

namespace detail {

inline Vec random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(gauss(rng), gauss(rng));
  return v;
}

// Append `v` to the orthonormal columns of `b` if its orthogonal complement
// part is not degenerate; returns true on success.
inline bool append_orthonormal(Mat& b, Vec v) {
  if (b.cols() > 0) v -= b * (b.adjoint() * v).eval();
  if (v.norm() < 0.3) return false;
  v.normalize();
  b.conservativeResize(v.size(), b.cols() + 1);
  b.col(b.cols() - 1) = v;
  return true;
}

// kron(a, b) without pulling in unsupported Eigen modules.
inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Mat i_sigma2() {
  Mat m(2, 2);
  m << 0, 1, -1, 0;
  return m;
}

inline SymmetryRep one_cell(SymClass c, int n, std::map<Gen, Mat> ops) {
  return SymmetryRep::uniform(symmetry_type(c), CellStructure::uniform(0, 0, n),
                              std::move(ops));
}

// Orthonormal pairs {u, eta(u)} drawn inside the columns of `space` (an
// eta-invariant eigenspace); returns 2*pairs columns.
inline Mat kramers_pairs(const Mat& space, const Mat& eta_matrix, int pairs,
                         std::mt19937_64& rng) {
  Mat b(space.rows(), 0);
  int made = 0;
  int attempts = 0;
  while (made < pairs && attempts < 200) {
    ++attempts;
    Vec u = space * random_vector(static_cast<int>(space.cols()), rng);
    if (b.cols() > 0) u -= b * (b.adjoint() * u).eval();
    if (u.norm() < 0.3) continue;
    u.normalize();
    const Vec partner = eta_matrix * u.conjugate();
    b.conservativeResize(space.rows(), b.cols() + 2);
    b.col(b.cols() - 2) = u;
    b.col(b.cols() - 1) = partner;
    ++made;
  }
  if (made < pairs) throw std::runtime_error("failed to draw Kramers pairs");
  return b;
}

}  // namespace detail

// Particle-hole only (eta^2 = +1): index is the subspace dimension mod 2.
inline RepSample sample_d(std::mt19937_64& rng) {
  const int n = 2 + static_cast<int>(rng() % 4);
  const Mat v = haar_unitary(n, rng);
  const Mat u = v * v.transpose();  // symmetric unitary: (uK)^2 = +1

  const int k = static_cast<int>(rng() % (n + 1));
  Mat basis(n, 0);
  int attempts = 0;
  while (basis.cols() < k && attempts < 200) {
    ++attempts;
    const Vec r = detail::random_vector(n, rng);
    detail::append_orthonormal(basis, Vec(r + u * r.conjugate()));
  }
  if (basis.cols() < k) throw std::runtime_error("failed to draw eta-real vectors");

  return {detail::one_cell(SymClass::D, n, {{Gen::Eta, u}}), basis,
          TaggedIndex::make(IndexGroup::Z2, k % 2)};
}

// Chiral only: index is tr gamma over the subspace.
inline RepSample sample_aiii(std::mt19937_64& rng) {
  const int n = 2 + static_cast<int>(rng() % 4);
  const int a = 1 + static_cast<int>(rng() % (n - 1));
  const int b = n - a;
  const Mat s = haar_unitary(n, rng);

  Mat g0 = Mat::Identity(n, n);
  for (int i = a; i < n; ++i) g0(i, i) = -1.0;
  const Mat gamma = s * g0 * s.adjoint();

  const int a2 = static_cast<int>(rng() % (a + 1));
  const int b2 = static_cast<int>(rng() % (b + 1));
  Mat basis(n, a2 + b2);
  for (int i = 0; i < a2; ++i) basis.col(i) = s.col(i);
  for (int i = 0; i < b2; ++i) basis.col(a2 + i) = s.col(a + i);

  return {detail::one_cell(SymClass::AIII, n, {{Gen::Gamma, gamma}}), basis,
          TaggedIndex::make(IndexGroup::Z, a2 - b2)};
}

// All three generators squaring to +1: real frame, index tr gamma.
inline RepSample sample_bdi(std::mt19937_64& rng) {
  const int n = 2 + static_cast<int>(rng() % 4);
  const int a = 1 + static_cast<int>(rng() % (n - 1));
  const int b = n - a;
  const Mat o = haar_orthogonal(n, rng);

  Mat d = Mat::Identity(n, n);
  for (int i = a; i < n; ++i) d(i, i) = -1.0;
  const Mat g0 = o * d * o.transpose();  // real symmetric orthogonal

  const Mat s = haar_unitary(n, rng);
  const Mat gamma = s * g0 * s.adjoint();
  const Mat eta_m = s * s.transpose();
  const Mat tau_m = s * g0 * s.transpose();

  const int a2 = static_cast<int>(rng() % (a + 1));
  const int b2 = static_cast<int>(rng() % (b + 1));
  Mat basis0(n, a2 + b2);
  for (int i = 0; i < a2; ++i) basis0.col(i) = o.col(i);
  for (int i = 0; i < b2; ++i) basis0.col(a2 + i) = o.col(a + i);

  return {detail::one_cell(SymClass::BDI, n,
                           {{Gen::Gamma, gamma}, {Gen::Eta, eta_m}, {Gen::Tau, tau_m}}),
          Mat(s * basis0), TaggedIndex::make(IndexGroup::Z, a2 - b2)};
}

// Quaternionic class: eta^2 = tau^2 = -1, gamma eigenspaces carry Kramers
// pairs, so the index is always even.
inline RepSample sample_cii(std::mt19937_64& rng) {
  const int m = 1 + static_cast<int>(rng() % 3);
  const int n = 2 * m;
  const int m_plus = static_cast<int>(rng() % (m + 1));

  Mat d = Mat::Identity(m, m);
  for (int i = m_plus; i < m; ++i) d(i, i) = -1.0;
  const Mat g0 = detail::kron(Mat::Identity(2, 2), d);
  const Mat eta0 = detail::kron(detail::i_sigma2(), Mat::Identity(m, m));
  const Mat tau0 = g0 * eta0;

  // Eigenspace column frames of g0 in the canonical ordering e_s (x) f_j.
  Mat plus(n, 2 * m_plus), minus(n, 2 * (m - m_plus));
  plus.setZero();
  minus.setZero();
  int pc = 0, mc = 0;
  for (int s = 0; s < 2; ++s)
    for (int j = 0; j < m; ++j) {
      if (j < m_plus)
        plus(s * m + j, pc++) = 1.0;
      else
        minus(s * m + j, mc++) = 1.0;
    }

  const int p_plus = m_plus > 0 ? static_cast<int>(rng() % (m_plus + 1)) : 0;
  const int p_minus = (m - m_plus) > 0 ? static_cast<int>(rng() % (m - m_plus + 1)) : 0;

  Mat basis0(n, 0);
  if (p_plus > 0) {
    const Mat pb = detail::kramers_pairs(plus, eta0, p_plus, rng);
    basis0.conservativeResize(n, pb.cols());
    basis0 = pb;
  }
  if (p_minus > 0) {
    const Mat mb = detail::kramers_pairs(minus, eta0, p_minus, rng);
    const Mat old = basis0;
    basis0.resize(n, old.cols() + mb.cols());
    basis0 << old, mb;
  }

  const Mat s = haar_unitary(n, rng);
  return {detail::one_cell(SymClass::CII, n,
                           {{Gen::Gamma, Mat(s * g0 * s.adjoint())},
                            {Gen::Eta, Mat(s * eta0 * s.transpose())},
                            {Gen::Tau, Mat(s * tau0 * s.transpose())}}),
          Mat(s * basis0), TaggedIndex::make(IndexGroup::TwoZ, 2 * (p_plus - p_minus))};
}

// gamma^2 = -1, eta^2 = +1, tau^2 = -1: invariant subspaces pair a +i
// chirality eigenvector with its conjugate, index is dimension mod 4.
inline RepSample sample_diii(std::mt19937_64& rng) {
  const int m = 1 + static_cast<int>(rng() % 3);
  const int n = 2 * m;
  const Mat g0 = detail::kron(detail::i_sigma2(), Mat::Identity(m, m));

  // +i eigenvectors of i sigma2: (1, i)/sqrt(2) tensored with f_j.
  Mat plus_frame = Mat::Zero(n, m);
  const double r = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < m; ++j) {
    plus_frame(j, j) = r;
    plus_frame(m + j, j) = cplx(0.0, r);
  }

  const int p = static_cast<int>(rng() % (m + 1));
  Mat basis0(n, 2 * p);
  Mat drawn(n, 0);
  for (int i = 0; i < p; ++i) {
    Vec u = plus_frame * detail::random_vector(m, rng);
    if (drawn.cols() > 0) u -= drawn * (drawn.adjoint() * u).eval();
    if (u.norm() < 0.3) {
      --i;
      continue;
    }
    u.normalize();
    drawn.conservativeResize(n, drawn.cols() + 1);
    drawn.col(drawn.cols() - 1) = u;
    basis0.col(2 * i) = u;
    basis0.col(2 * i + 1) = u.conjugate();  // eta = K maps +i to -i eigenvectors
  }

  const Mat s = haar_unitary(n, rng);
  return {detail::one_cell(SymClass::DIII, n,
                           {{Gen::Gamma, Mat(s * g0 * s.adjoint())},
                            {Gen::Eta, Mat(s * s.transpose())},
                            {Gen::Tau, Mat(s * g0 * s.transpose())}}),
          Mat(s * basis0), TaggedIndex::make(IndexGroup::TwoZ2, (2 * p) % 4)};
}

inline RepSample sample_rep(SymClass c, std::mt19937_64& rng) {
  switch (c) {
    case SymClass::D: return sample_d(rng);
    case SymClass::AIII: return sample_aiii(rng);
    case SymClass::BDI: return sample_bdi(rng);
    case SymClass::CII: return sample_cii(rng);
    case SymClass::DIII: return sample_diii(rng);
  }
  throw std::logic_error("unreachable");
}

}  // namespace qwsi::testgen
