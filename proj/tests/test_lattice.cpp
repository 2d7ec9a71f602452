#include <complex>
#include <random>

#include "doctest.h"
#include "qwsi/lattice.hpp"
#include "qwsi/models.hpp"

using namespace qwsi;

namespace {

Mat identity2() { return Mat::Identity(2, 2); }

}  // namespace

TEST_CASE("cell structure bookkeeping") {
  const CellStructure s = CellStructure::uniform(-2, 2, 2);
  CHECK(s.cells() == 5);
  CHECK(s.total() == 10);
  CHECK(s.x_max() == 2);
  CHECK(s.dim(0) == 2);
  CHECK(s.offset(-2) == 0);
  CHECK(s.offset(2) == 8);
  CHECK(s.contains(-2));
  CHECK(!s.contains(3));

  const CellStructure ragged(0, {1, 3, 2});
  CHECK(ragged.total() == 6);
  CHECK(ragged.offset(2) == 4);
}

TEST_CASE("identity walk maps any vector to itself") {
  const CellStructure s = CellStructure::uniform(0, 4, 2);
  BandedMatrix m(s, 0);
  for (int x = 0; x <= 4; ++x) m.set_block(x, x, identity2());

  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  StateVector psi(s);
  for (int i = 0; i < s.total(); ++i) psi.data(i) = cplx(gauss(rng), gauss(rng));

  const StateVector out = apply(m, psi);
  CHECK((out.data - psi.data).norm() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("window unitaries preserve the norm") {
  const WalkWindow w = split_step(split_step_profile(0.7, -0.4), -10, 9);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  StateVector psi(w.walk.structure());
  for (int i = 0; i < psi.data.size(); ++i) psi.data(i) = cplx(gauss(rng), gauss(rng));
  psi.data /= psi.norm();

  const StateVector out = apply(w.walk, psi);
  CHECK(std::abs(out.norm() - 1.0) < 1e-12);
}

TEST_CASE("split-step walk with identity coins is the conditional shift") {
  // With both angles zero every coin is the identity and the walk reduces to
  // the two shifts: spin-up moves one cell right, spin-down one cell left.
  // Checked away from the sealed window boundaries, where the substituted
  // seal coins cannot reach.
  const WalkWindow w = split_step(split_step_profile(0.0, 0.0), -4, 4);
  const CellStructure& s = w.walk.structure();

  StateVector up(s);
  up.cell(0)(0) = 1.0;
  const StateVector up_out = apply(w.walk, up);
  CHECK(std::abs(up_out.cell(1)(0) - 1.0) < 1e-12);
  CHECK(std::abs(up_out.norm() - 1.0) < 1e-12);
  CHECK(up_out.cell_mass(1) == doctest::Approx(1.0).epsilon(1e-12));

  StateVector down(s);
  down.cell(0)(1) = 1.0;
  const StateVector down_out = apply(w.walk, down);
  CHECK(std::abs(down_out.cell(-1)(1) - 1.0) < 1e-12);
}

TEST_CASE("unitarity check accepts walks and rejects scaled blocks") {
  SUBCASE("identity is unitary with zero defect") {
    const CellStructure s = CellStructure::uniform(0, 3, 2);
    BandedMatrix m(s, 0);
    for (int x = 0; x <= 3; ++x) m.set_block(x, x, identity2());
    CHECK(unitarity_defect(m) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(check_unitary(m, 1e-12));
  }

  SUBCASE("sealed split-step windows are unitary at 1e-12") {
    const WalkWindow w = split_step(split_step_profile(1.1, 0.4), -20, 19);
    CHECK(unitarity_defect(w.walk.banded()) < 1e-12);
  }

  SUBCASE("scaling one block breaks unitarity") {
    const WalkWindow w = split_step(split_step_profile(1.1, 0.4), -20, 19);
    BandedMatrix m = w.walk.banded();
    m.set_block(0, 1, Mat(1.01 * m.block(0, 1)));
    CHECK(!check_unitary(m, 1e-12));
    CHECK(unitarity_defect(m) > 1e-3);
    CHECK_THROWS(BandedUnitary{m});
  }
}

TEST_CASE("trivial symbol is the identity at every quasi-momentum") {
  TIWalkSymbol s;
  s.coin_dim = 2;
  s.jumps[0] = identity2();
  for (const double k : {0.0, 0.5, 1.7, -2.9}) {
    CHECK((s.at(k) - identity2()).norm() < 1e-15);
  }
  CHECK(s.interaction_length() == 0);
  CHECK(symbol_unitarity_defect(s) < 1e-15);
}

TEST_CASE("split-step symbol at k = 0 is the product of its coins") {
  // At k = 0 both shifts act trivially, so the symbol collapses to
  // B A B = R(t1/2) R(t2) R(t1/2) = R(t1 + t2).
  const double t1 = 0.7, t2 = 0.4;
  const TIWalkSymbol s = split_step_symbol(t1, t2);
  CHECK((s.at(0.0) - rotation(t1 + t2)).norm() < 1e-14);
}

TEST_CASE("symbol realization matches the direct window construction") {
  const double t1 = 0.8, t2 = 0.3;
  const TIWalkSymbol sym = split_step_symbol(t1, t2);
  CHECK(sym.interaction_length() == 1);

  const TIRealization real = ti_to_banded(sym, 0, 39);
  const WalkWindow direct = split_step(split_step_profile(t1, t2), 0, 39);

  // Interior blocks agree; only the sealed boundaries of the direct window
  // differ, and those stay within one interaction length of the walls.
  for (int x = 3; x <= 36; ++x) {
    for (int y = x - 1; y <= x + 1; ++y) {
      const Mat a = real.interior.has_block(x, y) ? real.interior.block(x, y) : Mat::Zero(2, 2);
      const Mat b =
          direct.walk.banded().has_block(x, y) ? direct.walk.banded().block(x, y) : Mat::Zero(2, 2);
      CHECK((a - b).norm() < 1e-12);
    }
  }
}
