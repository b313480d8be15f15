#include <cmath>
#include <limits>
#include <numbers>

#include "bellphase/ga3.hpp"
#include "bellphase/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bellphase::ga3;

namespace {

constexpr double kPi = std::numbers::pi;

Multivector random_mv(bellphase::rng::Xoshiro256 &g) {
  Multivector m;
  for (auto &x : m.c) x = 2.0 * g.uniform() - 1.0;
  return m;
}

double max_diff(const Multivector &a, const Multivector &b) {
  double d = 0.0;
  for (std::size_t i = 0; i < kBladeCount; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

Multivector e(std::size_t k) { return Multivector::basis(k); }

}  // namespace

TEST_CASE("product table matches brute-force generator reordering") {
  for (std::size_t a = 0; a < kBladeCount; ++a) {
    for (std::size_t b = 0; b < kBladeCount; ++b) {
      const auto [idx, sign] = oracle::brute_force_blade_product(a, b);
      const TableEntry t = blade_product(a, b);
      CAPTURE(blade_name(a));
      CAPTURE(blade_name(b));
      CHECK(t.index == idx);
      CHECK(t.sign == sign);
    }
  }
}

TEST_CASE("geometric_product examples") {
  CHECK(e(kE1) * e(kE1) == Multivector::scalar(1.0));
  CHECK(e(kE1) * e(kE2) == e(kE12));
  CHECK(e(kE2) * e(kE1) == -e(kE12));
  CHECK(e(kE123) * e(kE123) == Multivector::scalar(-1.0));

  bellphase::rng::Xoshiro256 g(1);
  for (int n = 0; n < 20; ++n) {
    const Multivector m = random_mv(g);
    CHECK(Multivector::scalar(1.0) * m == m);
  }
}

TEST_CASE("structure constants e_i e_j = delta_ij + eps_ijk I e_k, all nine pairs") {
  const std::array<std::size_t, 3> gen = {kE1, kE2, kE3};
  auto eps = [](int i, int j, int k) { return (i - j) * (j - k) * (k - i) / 2; };
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Multivector expected = Multivector::scalar(i == j ? 1.0 : 0.0);
      for (int k = 0; k < 3; ++k) {
        if (eps(i, j, k) != 0) expected = expected + eps(i, j, k) * (pseudoscalar() * e(gen[k]));
      }
      const Multivector got = e(gen[i]) * e(gen[j]);
      CHECK(got == expected);
      CHECK(oracle::max_abs_diff(oracle::to_matrix(got),
                                 oracle::mul(oracle::kSigma[i], oracle::kSigma[j])) == 0.0);
    }
  }
}

TEST_CASE("Pauli matrices represent the algebra") {
  bellphase::rng::Xoshiro256 g(2);
  for (int n = 0; n < 200; ++n) {
    const Multivector a = random_mv(g);
    const Multivector b = random_mv(g);
    CHECK(oracle::max_abs_diff(oracle::to_matrix(a * b),
                               oracle::mul(oracle::to_matrix(a), oracle::to_matrix(b))) < 1e-13);
  }
  // pseudoscalar is the imaginary unit
  CHECK(oracle::max_abs_diff(oracle::to_matrix(pseudoscalar()),
                             oracle::scale(oracle::cplx(0, 1), oracle::kIdentity)) < 1e-15);
}

TEST_CASE("associativity and distributivity") {
  bellphase::rng::Xoshiro256 g(3);
  for (int n = 0; n < 100; ++n) {
    const Multivector a = random_mv(g), b = random_mv(g), c = random_mv(g);
    CHECK(max_diff((a * b) * c, a * (b * c)) < 1e-12);
    CHECK(max_diff(a * (b + c), a * b + a * c) < 1e-12);
  }
}

TEST_CASE("pseudoscalar") {
  const Multivector i = pseudoscalar();
  for (std::size_t k = 0; k < kBladeCount; ++k) CHECK(i[k] == (k == kE123 ? 1.0 : 0.0));
  CHECK(i * i == Multivector::scalar(-1.0));
  CHECK(i * e(kE3) == e(kE12));
  for (std::size_t k : {kE1, kE2, kE3}) CHECK(i * e(k) == e(k) * i);

  bellphase::rng::Xoshiro256 g(4);
  for (int n = 0; n < 100; ++n) {
    const Multivector m = random_mv(g);
    CHECK(max_diff(i * m, m * i) <= 1e-14);
  }
}

TEST_CASE("rotor_exp closed form") {
  const Bivector e12{1.0, 0.0, 0.0};
  CHECK(rotor_exp(e12, 0.0) == Multivector::scalar(1.0));

  const Multivector quarter = rotor_exp(e12, kPi / 2);
  CHECK(std::abs(quarter[kScalar]) < 1e-15);
  CHECK(quarter[kE12] == 1.0);

  const Multivector half = rotor_exp(e12, kPi);
  CHECK(max_diff(half, Multivector::scalar(-1.0)) < 1e-15);

  CHECK(scalar_part(rotor_exp(e12, 0.0)) == 1.0);
  CHECK(std::abs(scalar_part(rotor_exp(e12, kPi / 2))) < 1e-15);
  CHECK(scalar_part(rotor_exp(e12, kPi / 3)) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("rotor_exp agrees with the Taylor series of the matrix exponential") {
  bellphase::rng::Xoshiro256 g(5);
  for (int n = 0; n < 200; ++n) {
    Bivector plane{2 * g.uniform() - 1, 2 * g.uniform() - 1, 2 * g.uniform() - 1};
    const double angle = (2 * g.uniform() - 1) * 2 * kPi;
    const double norm = plane.norm();
    const Multivector unit_b = (1.0 / norm) * plane.to_multivector();
    const oracle::Mat2 series = oracle::matrix_exp(oracle::scale(angle, oracle::to_matrix(unit_b)));
    CHECK(oracle::max_abs_diff(oracle::to_matrix(rotor_exp(plane, angle)), series) < 1e-12);
  }
  for (double angle : {0.0, kPi / 2, kPi}) {
    const oracle::Mat2 series =
        oracle::matrix_exp(oracle::scale(angle, oracle::to_matrix(e(kE12))));
    CHECK(oracle::max_abs_diff(oracle::to_matrix(rotor_exp({1, 0, 0}, angle)), series) < 1e-14);
  }
}

TEST_CASE("rotor composition and unit magnitude") {
  bellphase::rng::Xoshiro256 g(6);
  for (int n = 0; n < 1000; ++n) {
    Bivector plane{2 * g.uniform() - 1, 2 * g.uniform() - 1, 2 * g.uniform() - 1};
    const double a = (2 * g.uniform() - 1) * 2 * kPi;
    const double b = (2 * g.uniform() - 1) * 2 * kPi;
    CHECK(max_diff(rotor_exp(plane, a) * rotor_exp(plane, b), rotor_exp(plane, a + b)) < 1e-12);
    const Multivector r = rotor_exp(plane, a);
    const double mag = r[kScalar] * r[kScalar] + r[kE12] * r[kE12] + r[kE13] * r[kE13] +
                       r[kE23] * r[kE23];
    CHECK(std::abs(mag - 1.0) < 1e-12);
  }
}

TEST_CASE("non-unit planes are normalised") {
  CHECK(max_diff(rotor_exp({3.0, 0.0, 0.0}, 0.7), rotor_exp({1.0, 0.0, 0.0}, 0.7)) < 1e-15);
  CHECK(max_diff(rotor_exp({0.0, 2.0, 2.0}, 1.1), rotor_exp({0.0, 0.5, 0.5}, 1.1)) < 1e-15);
}

TEST_CASE("trivector generator and e1e2 plane give the same phase") {
  CHECK(e(kE12) * e(kE3) == pseudoscalar());
  for (double angle : {0.0, 0.3, kPi / 4, 2.0, -1.3, 2 * kPi}) {
    const Multivector plane = rotor_exp({1.0, 0.0, 0.0}, angle);
    const Multivector phase = pseudoscalar_exp(angle);
    CHECK(scalar_part(plane) == scalar_part(phase));
    CHECK(plane[kE12] == phase[kE123]);
    // both generators square to -1, so both exponentials compose additively
    CHECK(max_diff(pseudoscalar_exp(angle) * pseudoscalar_exp(0.4), pseudoscalar_exp(angle + 0.4)) <
          1e-12);
  }
}

TEST_CASE("error paths") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  Multivector bad;
  bad[kE2] = nan;
  CHECK_THROWS_AS(geometric_product(bad, Multivector::scalar(1)), InvalidOperand);
  bad[kE2] = inf;
  CHECK_THROWS_AS(geometric_product(Multivector::scalar(1), bad), InvalidOperand);
  CHECK_THROWS_AS(rotor_exp({0.0, 0.0, 0.0}, 1.0), DegeneratePlane);
  CHECK_THROWS_AS(rotor_exp({1.0, 0.0, 0.0}, nan), InvalidOperand);
  CHECK_THROWS_AS(pseudoscalar_exp(inf), InvalidOperand);
}
