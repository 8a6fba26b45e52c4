#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "zeno/eigen.hpp"
#include "zeno/matrix.hpp"
#include "zeno/spin.hpp"

namespace {

using zeno::cplx;
using zeno::CMat;
constexpr double kPi = std::numbers::pi;

double max_abs_diff(const CMat& a, const CMat& b) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

CMat commutator(const CMat& a, const CMat& b) {
  CMat ab = matmul(a, b);
  const CMat ba = matmul(b, a);
  for (int i = 0; i < ab.rows(); ++i)
    for (int j = 0; j < ab.cols(); ++j) ab(i, j) -= ba(i, j);
  return ab;
}

CMat scaled(const CMat& a, cplx s) {
  CMat out = a;
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j) out(i, j) *= s;
  return out;
}

}  // namespace

TEST_CASE("ladder coefficients match sqrt(j(j+1) - m(m+1))") {
  const int atoms = 7;
  const auto c = zeno::ladder_coefficients(atoms);
  REQUIRE(int(c.size()) == atoms);
  const double j = atoms / 2.0;
  for (int n = 0; n < atoms; ++n) {
    const double m = n - j;
    CHECK(c[n] == doctest::Approx(std::sqrt(j * (j + 1) - m * (m + 1))).epsilon(1e-14));
  }
  // Symmetric under n → N-1-n.
  for (int n = 0; n < atoms; ++n)
    CHECK(c[n] == doctest::Approx(c[atoms - 1 - n]).epsilon(1e-14));
}

TEST_CASE("spin component commutators close the algebra") {
  for (int atoms : {1, 2, 5, 36}) {
    const auto ops = zeno::build_spin_operators(zeno::DickeBasis{atoms});
    const cplx i1{0.0, 1.0};
    CHECK(max_abs_diff(commutator(ops.jx, ops.jy), scaled(ops.jz, i1)) < 1e-10);
    CHECK(max_abs_diff(commutator(ops.jy, ops.jz), scaled(ops.jx, i1)) < 1e-10);
    CHECK(max_abs_diff(commutator(ops.jz, ops.jx), scaled(ops.jy, i1)) < 1e-10);
    // J² = Jx² + Jy² + Jz² = j(j+1)·I on the symmetric subspace.
    const double j = atoms / 2.0;
    CMat j2 = matmul(ops.jx, ops.jx);
    const CMat jy2 = matmul(ops.jy, ops.jy);
    const CMat jz2 = matmul(ops.jz, ops.jz);
    for (int a = 0; a < j2.rows(); ++a)
      for (int b = 0; b < j2.cols(); ++b) j2(a, b) += jy2(a, b) + jz2(a, b);
    CMat expect(atoms + 1, atoms + 1);
    for (int a = 0; a <= atoms; ++a) expect(a, a) = j * (j + 1);
    CHECK(max_abs_diff(j2, expect) < 1e-9);
  }
}

TEST_CASE("jz is diagonal with m = n - N/2") {
  const int atoms = 6;
  const auto ops = zeno::build_spin_operators(zeno::DickeBasis{atoms});
  for (int n = 0; n <= atoms; ++n) {
    CHECK(std::real(ops.jz(n, n)) == doctest::Approx(n - atoms / 2.0).epsilon(1e-14));
    for (int m = 0; m <= atoms; ++m)
      if (m != n) CHECK(std::abs(ops.jz(n, m)) < 1e-15);
  }
}

TEST_CASE("raising and lowering operators connect adjacent levels") {
  const int atoms = 5;
  const auto ops = zeno::build_spin_operators(zeno::DickeBasis{atoms});
  const auto c = zeno::ladder_coefficients(atoms);
  for (int n = 0; n < atoms; ++n) {
    CHECK(std::real(ops.j_plus(n + 1, n)) == doctest::Approx(c[n]).epsilon(1e-14));
    CHECK(std::real(ops.j_minus(n, n + 1)) == doctest::Approx(c[n]).epsilon(1e-14));
  }
  // jx = (J+ + J-)/2, jy has the ±i/2 ladder structure.
  for (int n = 0; n < atoms; ++n) {
    CHECK(std::real(ops.jx(n + 1, n)) == doctest::Approx(0.5 * c[n]).epsilon(1e-14));
    CHECK(ops.jy(n + 1, n) == cplx{0.0, -0.5 * c[n]});
    CHECK(ops.jy(n, n + 1) == cplx{0.0, +0.5 * c[n]});
  }
}

TEST_CASE("rotation by pi about X maps ground to fully excited") {
  const int atoms = 9;
  const auto ops = zeno::build_spin_operators(zeno::DickeBasis{atoms});
  const auto psi = zeno::rotated_ground(ops, zeno::RotationSpec{kPi, 0.0});
  REQUIRE(int(psi.size()) == atoms + 1);
  CHECK(std::abs(psi[atoms]) == doctest::Approx(1.0).epsilon(1e-12));
  for (int n = 0; n < atoms; ++n) CHECK(std::abs(psi[n]) < 1e-10);
}

TEST_CASE("rotation operator is unitary and matches rotated_ground") {
  const int atoms = 8;
  const auto ops = zeno::build_spin_operators(zeno::DickeBasis{atoms});
  const zeno::RotationSpec spec{0.71, -1.2, zeno::RotationOrder::X_THEN_Y};
  const CMat r = zeno::rotation_operator(ops, spec);
  const CMat id = CMat::identity(atoms + 1);
  CHECK(max_abs_diff(matmul(dagger(r), r), id) < 1e-11);
  const auto psi = zeno::rotated_ground(ops, spec);
  for (int n = 0; n <= atoms; ++n)
    CHECK(std::abs(psi[n] - r(n, 0)) < 1e-11);
}

TEST_CASE("rotation order convention: X pulse fires first") {
  const int atoms = 4;
  const auto ops = zeno::build_spin_operators(zeno::DickeBasis{atoms});
  const double th = 0.63, ph = 0.41;
  const CMat r = zeno::rotation_operator(
      ops, zeno::RotationSpec{th, ph, zeno::RotationOrder::X_THEN_Y});
  const CMat ux = zeno::unitary_exp(ops.jx, th);
  const CMat uy = zeno::unitary_exp(ops.jy, ph);
  CHECK(max_abs_diff(r, matmul(uy, ux)) < 1e-12);
  const CMat r2 = zeno::rotation_operator(
      ops, zeno::RotationSpec{th, ph, zeno::RotationOrder::Y_THEN_X});
  CHECK(max_abs_diff(r2, matmul(ux, uy)) < 1e-12);
}

TEST_CASE("named states have the expected populations") {
  const int atoms = 2;
  const auto ops = zeno::build_spin_operators(zeno::DickeBasis{atoms});
  const auto g = zeno::named_state(ops, zeno::NamedState::ALL_ZERO);
  CHECK(std::real(g.matrix(0, 0)) == doctest::Approx(1.0).epsilon(1e-14));
  const auto e = zeno::named_state(ops, zeno::NamedState::ALL_ONE);
  CHECK(std::real(e.matrix(atoms, atoms)) == doctest::Approx(1.0).epsilon(1e-14));
  const auto w = zeno::named_state(ops, zeno::NamedState::W);
  CHECK(std::real(w.matrix(1, 1)) == doctest::Approx(1.0).epsilon(1e-14));

  // Coherent state at θ = π/2 on two atoms: binomial(2, 1/2) populations.
  const auto c = zeno::named_state(ops, zeno::NamedState::COHERENT, kPi / 2, 0.0);
  CHECK(std::real(c.matrix(0, 0)) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::real(c.matrix(1, 1)) == doctest::Approx(0.50).epsilon(1e-12));
  CHECK(std::real(c.matrix(2, 2)) == doctest::Approx(0.25).epsilon(1e-12));
  zeno::validate_state(c, "coherent test state");
}

TEST_CASE("p_zero of a coherent state follows cos^2N of the half angle") {
  const int atoms = 10;
  const auto ops = zeno::build_spin_operators(zeno::DickeBasis{atoms});
  const auto g = zeno::named_state(ops, zeno::NamedState::ALL_ZERO);
  for (double th : {0.0, 0.37, 1.1, kPi / 2}) {
    const double p = zeno::p_zero(g, ops, zeno::RotationSpec{th, 0.0});
    CHECK(p == doctest::Approx(std::pow(std::cos(th / 2), 2 * atoms)).epsilon(1e-10));
  }
}

TEST_CASE("husimi function peaks at (N+1)/(4pi) for the ground state") {
  const int atoms = 36;
  const auto& ops = zeno::shared_spin_operators(atoms);
  const auto g = zeno::named_state(ops, zeno::NamedState::ALL_ZERO);
  const double q0 = zeno::husimi_q(g, ops, zeno::RotationSpec{});
  CHECK(q0 == doctest::Approx((atoms + 1) / (4 * kPi)).epsilon(1e-12));
  // The W state has a node at the pole.
  const auto w = zeno::named_state(ops, zeno::NamedState::W);
  CHECK(zeno::husimi_q(w, ops, zeno::RotationSpec{}) < 1e-12);
}

TEST_CASE("husimi function integrates to the trace") {
  const int atoms = 8;
  const auto ops = zeno::build_spin_operators(zeno::DickeBasis{atoms});
  for (auto which : {zeno::NamedState::ALL_ZERO, zeno::NamedState::W}) {
    const auto s = zeno::named_state(ops, which);
    CHECK(zeno::husimi_sphere_integral(s, ops) == doctest::Approx(1.0).epsilon(1e-3));
  }
  // Scaled state integrates to its (sub-unit) trace.
  auto s = zeno::named_state(ops, zeno::NamedState::COHERENT, 0.8, 0.2);
  for (int i = 0; i < s.matrix.rows(); ++i)
    for (int j = 0; j < s.matrix.cols(); ++j) s.matrix(i, j) *= 0.55;
  CHECK(zeno::husimi_sphere_integral(s, ops) == doctest::Approx(0.55).epsilon(1e-3));
}

TEST_CASE("transverse spin length is 1 for equatorial coherent states") {
  const int atoms = 12;
  const auto ops = zeno::build_spin_operators(zeno::DickeBasis{atoms});
  const auto c = zeno::named_state(ops, zeno::NamedState::COHERENT, kPi / 2, 0.0);
  CHECK(zeno::transverse_spin_length(c, ops) == doctest::Approx(1.0).epsilon(1e-10));
  // Poles carry no transverse component.
  const auto g = zeno::named_state(ops, zeno::NamedState::ALL_ZERO);
  CHECK(zeno::transverse_spin_length(g, ops) < 1e-12);
}

TEST_CASE("expectation values of jz") {
  const int atoms = 6;
  const auto ops = zeno::build_spin_operators(zeno::DickeBasis{atoms});
  const auto g = zeno::named_state(ops, zeno::NamedState::ALL_ZERO);
  CHECK(std::real(zeno::expectation(g, ops.jz)) == doctest::Approx(-3.0).epsilon(1e-12));
  const auto e = zeno::named_state(ops, zeno::NamedState::ALL_ONE);
  CHECK(std::real(zeno::expectation(e, ops.jz)) == doctest::Approx(3.0).epsilon(1e-12));
  const auto w = zeno::named_state(ops, zeno::NamedState::W);
  CHECK(std::real(zeno::expectation(w, ops.jz)) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("validate_state rejects broken inputs") {
  const int atoms = 3;
  const auto ops = zeno::build_spin_operators(zeno::DickeBasis{atoms});
  auto s = zeno::named_state(ops, zeno::NamedState::ALL_ZERO);
  SUBCASE("non-hermitian") {
    s.matrix(0, 1) = cplx{0.5, 0.0};
    CHECK_THROWS_AS(zeno::validate_state(s, "t"), std::invalid_argument);
  }
  SUBCASE("trace above one") {
    s.matrix(1, 1) = cplx{0.5, 0.0};
    CHECK_THROWS_AS(zeno::validate_state(s, "t"), std::invalid_argument);
  }
  SUBCASE("negative eigenvalue") {
    s.matrix(0, 0) = cplx{0.6, 0.0};
    s.matrix(1, 1) = cplx{-0.2, 0.0};
    s.matrix(2, 2) = cplx{0.6, 0.0};
    CHECK_THROWS_AS(zeno::validate_state(s, "t"), std::invalid_argument);
  }
  SUBCASE("valid state passes") {
    CHECK_NOTHROW(zeno::validate_state(s, "t"));
  }
}

TEST_CASE("shared operator cache returns a stable reference") {
  const auto& a = zeno::shared_spin_operators(36);
  const auto& b = zeno::shared_spin_operators(36);
  CHECK(&a == &b);
  CHECK(a.basis.atom_count == 36);
  // Consistent with a fresh build.
  const auto fresh = zeno::build_spin_operators(zeno::DickeBasis{36});
  CHECK(max_abs_diff(a.jx, fresh.jx) == 0.0);
  CHECK(max_abs_diff(a.jy, fresh.jy) == 0.0);
}

TEST_CASE("build_spin_operators rejects non-positive atom counts") {
  CHECK_THROWS_AS(zeno::build_spin_operators(zeno::DickeBasis{0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(zeno::build_spin_operators(zeno::DickeBasis{-3}),
                  std::invalid_argument);
}
