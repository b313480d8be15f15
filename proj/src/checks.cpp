#include "bellphase/checks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "bellphase/ga3.hpp"
#include "bellphase/model.hpp"
#include "bellphase/rng.hpp"

namespace bellphase::checks {

namespace {

using ga3::Multivector;
using cplx = std::complex<double>;
using Mat2 = std::array<cplx, 4>;  // row-major

constexpr double kPi = std::numbers::pi;

Mat2 matmul(const Mat2 &a, const Mat2 &b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

const Mat2 kId = {1.0, 0.0, 0.0, 1.0};
const std::array<Mat2, 3> kSigma = {{
    {0.0, 1.0, 1.0, 0.0},
    {0.0, cplx(0, -1), cplx(0, 1), 0.0},
    {1.0, 0.0, 0.0, -1.0},
}};

// Matrix image of each basis blade: e_k -> sigma_k, products map to products.
std::array<Mat2, ga3::kBladeCount> blade_matrices() {
  const Mat2 &s1 = kSigma[0];
  const Mat2 &s2 = kSigma[1];
  const Mat2 &s3 = kSigma[2];
  return {kId,           s1,
          s2,            s3,
          matmul(s1, s2), matmul(s1, s3),
          matmul(s2, s3), matmul(matmul(s1, s2), s3)};
}

Mat2 to_matrix(const Multivector &m) {
  static const auto images = blade_matrices();
  Mat2 r{};
  for (std::size_t b = 0; b < ga3::kBladeCount; ++b) {
    for (std::size_t k = 0; k < 4; ++k) r[k] += m[b] * images[b][k];
  }
  return r;
}

double max_diff(const Multivector &a, const Multivector &b) {
  double d = 0.0;
  for (std::size_t i = 0; i < ga3::kBladeCount; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double max_diff(const Mat2 &a, const Mat2 &b) {
  double d = 0.0;
  for (std::size_t i = 0; i < 4; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

int levi_civita(int i, int j, int k) {
  return (i - j) * (j - k) * (k - i) / 2;
}

CheckResult make(std::string name, double err, double tol, std::uint64_t cases) {
  return {std::move(name), err <= tol, err, tol, cases};
}

Multivector random_multivector(rng::Xoshiro256 &gen) {
  Multivector m;
  for (auto &x : m.c) x = 2.0 * gen.uniform() - 1.0;
  return m;
}

CheckResult structure_constants() {
  const std::array<std::size_t, 3> e = {ga3::kE1, ga3::kE2, ga3::kE3};
  const Multivector i = ga3::pseudoscalar();
  double err = 0.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const Multivector prod =
          ga3::geometric_product(Multivector::basis(e[a]), Multivector::basis(e[b]));
      Multivector expected = Multivector::scalar(a == b ? 1.0 : 0.0);
      for (int k = 0; k < 3; ++k) {
        const int eps = levi_civita(a, b, k);
        if (eps != 0) {
          expected = expected + eps * ga3::geometric_product(i, Multivector::basis(e[k]));
        }
      }
      err = std::max(err, max_diff(prod, expected));
      err = std::max(err, max_diff(to_matrix(prod), matmul(kSigma[a], kSigma[b])));
    }
  }
  return make("ga3_structure_constants", err, 0.0, 9);
}

CheckResult pseudoscalar_square() {
  const Multivector i = ga3::pseudoscalar();
  return make("ga3_pseudoscalar_square", max_diff(i * i, Multivector::scalar(-1.0)), 0.0, 1);
}

CheckResult pseudoscalar_central(rng::Xoshiro256 &gen) {
  const Multivector i = ga3::pseudoscalar();
  double err = 0.0;
  for (int n = 0; n < 100; ++n) {
    const Multivector m = random_multivector(gen);
    err = std::max(err, max_diff(i * m, m * i));
  }
  return make("ga3_pseudoscalar_central", err, 1e-14, 100);
}

CheckResult associativity(rng::Xoshiro256 &gen) {
  double err = 0.0;
  for (int n = 0; n < 100; ++n) {
    const Multivector a = random_multivector(gen);
    const Multivector b = random_multivector(gen);
    const Multivector c = random_multivector(gen);
    err = std::max(err, max_diff((a * b) * c, a * (b * c)));
  }
  return make("ga3_associativity", err, 1e-12, 100);
}

CheckResult pauli_homomorphism(rng::Xoshiro256 &gen) {
  double err = 0.0;
  for (int n = 0; n < 100; ++n) {
    const Multivector a = random_multivector(gen);
    const Multivector b = random_multivector(gen);
    err = std::max(err, max_diff(to_matrix(a * b), matmul(to_matrix(a), to_matrix(b))));
  }
  return make("ga3_pauli_homomorphism", err, 1e-12, 100);
}

ga3::Bivector random_plane(rng::Xoshiro256 &gen) {
  ga3::Bivector p;
  do {
    p = {2.0 * gen.uniform() - 1.0, 2.0 * gen.uniform() - 1.0, 2.0 * gen.uniform() - 1.0};
  } while (p.norm() < 1e-3);
  return p;
}

CheckResult rotor_composition(rng::Xoshiro256 &gen) {
  double err = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const ga3::Bivector plane = random_plane(gen);
    const double alpha = (2.0 * gen.uniform() - 1.0) * 2.0 * kPi;
    const double beta = (2.0 * gen.uniform() - 1.0) * 2.0 * kPi;
    err = std::max(err, max_diff(ga3::rotor_exp(plane, alpha) * ga3::rotor_exp(plane, beta),
                                 ga3::rotor_exp(plane, alpha + beta)));
  }
  return make("ga3_rotor_composition", err, 1e-12, 1000);
}

CheckResult rotor_unit_magnitude(rng::Xoshiro256 &gen) {
  double err = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const Multivector r =
        ga3::rotor_exp(random_plane(gen), (2.0 * gen.uniform() - 1.0) * 2.0 * kPi);
    const double mag2 = r[ga3::kScalar] * r[ga3::kScalar] + r[ga3::kE12] * r[ga3::kE12] +
                        r[ga3::kE13] * r[ga3::kE13] + r[ga3::kE23] * r[ga3::kE23];
    err = std::max(err, std::abs(mag2 - 1.0));
  }
  return make("ga3_rotor_unit_magnitude", err, 1e-12, 1000);
}

// The trivector generator (e1e2)e3 and the e1e2 plane rotor give the same
// scalar part, and the same coefficient on their respective generator.
CheckResult generator_views_agree(rng::Xoshiro256 &gen) {
  const ga3::Bivector e12{1.0, 0.0, 0.0};
  const Multivector trivector =
      ga3::geometric_product(ga3::Multivector::basis(ga3::kE12), ga3::Multivector::basis(ga3::kE3));
  double err = max_diff(trivector, ga3::pseudoscalar());
  for (int n = 0; n < 1000; ++n) {
    const double angle = (2.0 * gen.uniform() - 1.0) * 2.0 * kPi;
    const Multivector plane = ga3::rotor_exp(e12, angle);
    const Multivector phase = ga3::pseudoscalar_exp(angle);
    err = std::max(err, std::abs(ga3::scalar_part(plane) - ga3::scalar_part(phase)));
    err = std::max(err, std::abs(plane[ga3::kE12] - phase[ga3::kE123]));
  }
  return make("ga3_generator_views_agree", err, 1e-12, 1000);
}

double random_angle(rng::Xoshiro256 &gen) { return (2.0 * gen.uniform() - 1.0) * 2.0 * kPi; }

CheckResult mechanism_equality(rng::Xoshiro256 &gen) {
  double err = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const double a = random_angle(gen);
    const double b = random_angle(gen);
    const model::PairSourceSpec src{random_angle(gen), 0.0};
    const double c = std::cos(a - b - src.delta);
    err = std::max(err, std::abs(model::joint_probability(a, b, src) - c * c));
  }
  return make("model_mechanism_equality", err, 1e-12, 1000);
}

CheckResult four_rotator_reduction(rng::Xoshiro256 &gen) {
  double err = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const double a = random_angle(gen);
    const double b = random_angle(gen);
    const model::PairSourceSpec src{random_angle(gen), 0.0};
    const model::RotatorStation st{{a}, {b}};
    err = std::max(err, std::abs(model::joint_probability_multi(st, src) -
                                 model::joint_probability(a, b, src)));
  }
  return make("model_four_rotator_reduction", err, 1e-12, 1000);
}

CheckResult four_rotator_cancellation(rng::Xoshiro256 &gen) {
  double err = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const double alpha = random_angle(gen);
    const model::RotatorStation st{{alpha, -alpha}, {}};
    err = std::max(err, std::abs(model::joint_probability_multi(st) - 1.0));
  }
  return make("model_four_rotator_cancellation", err, 1e-12, 1000);
}

CheckResult shift_invariance(rng::Xoshiro256 &gen) {
  double err = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const double a = random_angle(gen);
    const double b = random_angle(gen);
    const double s = random_angle(gen);
    const model::PairSourceSpec src{random_angle(gen), 0.0};
    const model::PairSourceSpec shifted{src.delta, s};
    err = std::max(err, std::abs(model::joint_probability(a + s, b + s, src) -
                                 model::joint_probability(a, b, src)));
    err = std::max(err, std::abs(model::joint_probability(a, b, shifted) -
                                 model::joint_probability(a, b, src)));
  }
  return make("model_shift_invariance", err, 1e-12, 1000);
}

CheckResult correlation_consistency(rng::Xoshiro256 &gen) {
  double err = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const double a = random_angle(gen);
    const double b = random_angle(gen);
    err = std::max(err, std::abs(model::correlation(a, b) -
                                 model::coincidence_probabilities(a, b).signed_sum()));
  }
  return make("model_correlation_consistency", err, 1e-12, 1000);
}

CheckResult chsh_reference_value() {
  const double deg = kPi / 180.0;
  const double s = model::chsh(0.0, 45.0 * deg, 22.5 * deg, 67.5 * deg);
  return make("model_chsh_reference_value", std::abs(s - 2.0 * std::numbers::sqrt2), 1e-12, 1);
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(std::uint64_t seed) {
  rng::Xoshiro256 gen(rng::mix64(seed));
  std::vector<CheckResult> out;
  out.push_back(structure_constants());
  out.push_back(pseudoscalar_square());
  out.push_back(pseudoscalar_central(gen));
  out.push_back(associativity(gen));
  out.push_back(pauli_homomorphism(gen));
  out.push_back(rotor_composition(gen));
  out.push_back(rotor_unit_magnitude(gen));
  out.push_back(generator_views_agree(gen));
  out.push_back(mechanism_equality(gen));
  out.push_back(four_rotator_reduction(gen));
  out.push_back(four_rotator_cancellation(gen));
  out.push_back(shift_invariance(gen));
  out.push_back(correlation_consistency(gen));
  out.push_back(chsh_reference_value());
  return out;
}

bool all_passed(const std::vector<CheckResult> &results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult &r) { return r.passed; });
}

}  // namespace bellphase::checks
