#include <cmath>
#include <limits>
#include <numbers>

#include "bellphase/sim.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bellphase;
using namespace bellphase::sim;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

ExperimentConfig config(ModelKind m, double phi1_deg, double phi2_deg, std::uint64_t trials,
                        std::uint64_t seed = 42, std::uint64_t partitions = 1) {
  ExperimentConfig c;
  c.model = m;
  c.phi1 = phi1_deg * kDeg;
  c.phi2 = phi2_deg * kDeg;
  c.trials = trials;
  c.seed = seed;
  c.partitions = partitions;
  return c;
}

std::array<double, 4> frequencies(const CoincidenceCounts &c) {
  const double n = static_cast<double>(c.total);
  return {c.n_pp / n, c.n_mm / n, c.n_pm / n, c.n_mp / n};
}

std::array<double, 4> reference(ModelKind m, double a, double b) {
  switch (m) {
    case ModelKind::PhaseModel: {
      const double c = std::cos(a - b);
      return {c * c / 2, c * c / 2, (1 - c * c) / 2, (1 - c * c) / 2};
    }
    case ModelKind::BellLocalDeterministic:
      return oracle::integrate_bell_deterministic(a, b);
    case ModelKind::BellLocalStochastic:
      return oracle::integrate_bell_stochastic(a, b);
  }
  return {};
}

const std::array<std::pair<double, double>, 8> kGrid = {{
    {0, 0}, {0, 22.5}, {0, 45}, {0, 67.5}, {10, 100}, {30, 5}, {-40, 80}, {170, 12}}};

}  // namespace

TEST_CASE("model names round-trip") {
  for (ModelKind k : kAllModels) CHECK(parse_model(model_name(k)) == k);
  CHECK_FALSE(parse_model("quantum").has_value());
}

TEST_CASE("substream keys differ across coordinates") {
  CHECK(rng::substream_key(1, 0, 0) != rng::substream_key(1, 0, 1));
  CHECK(rng::substream_key(1, 0, 1) != rng::substream_key(1, 1, 0));
  CHECK(rng::substream_key(1, 2, 3) != rng::substream_key(2, 2, 3));
  rng::Xoshiro256 g(7);
  for (int n = 0; n < 10000; ++n) {
    const double u = g.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("sample_outcome support") {
  rng::Xoshiro256 g(9);
  for (int n = 0; n < 20000; ++n) {
    const Outcome same = sample_outcome(ModelKind::PhaseModel, 0.3, 0.3, {}, g);
    CHECK((same == Outcome::PlusPlus || same == Outcome::MinusMinus));
    const Outcome orth = sample_outcome(ModelKind::PhaseModel, kPi / 2, 0.0, {}, g);
    CHECK((orth == Outcome::PlusMinus || orth == Outcome::MinusPlus));
    const Outcome det = sample_outcome(ModelKind::BellLocalDeterministic, 0.8, 0.8, {}, g);
    CHECK((det == Outcome::PlusPlus || det == Outcome::MinusMinus));
  }
}

TEST_CASE("baseline closed forms match lambda integration") {
  for (auto [a, b] : kGrid) {
    for (ModelKind m : {ModelKind::BellLocalDeterministic, ModelKind::BellLocalStochastic}) {
      const model::OutcomeDistribution d = channel_probabilities(m, a * kDeg, b * kDeg);
      const std::array<double, 4> ref = reference(m, a * kDeg, b * kDeg);
      CHECK(std::abs(d.pp - ref[0]) < 2e-6);
      CHECK(std::abs(d.mm - ref[1]) < 2e-6);
      CHECK(std::abs(d.pm - ref[2]) < 2e-6);
      CHECK(std::abs(d.mp - ref[3]) < 2e-6);
    }
  }
  // deterministic baseline correlation is the triangle wave 1 - 4|t|/pi
  for (int k = -180; k <= 180; ++k) {
    const double t = k * kDeg;
    double folded = std::fmod(std::abs(t), kPi);
    if (folded > kPi / 2) folded = kPi - folded;
    CHECK(analytic_correlation(ModelKind::BellLocalDeterministic, t, 0.0) ==
          doctest::Approx(1.0 - 4.0 * folded / kPi).epsilon(1e-12));
  }
}

TEST_CASE("run_experiment reproduces the halved coincidence rate at 22.5 degrees") {
  for (std::uint64_t parts : {1u, 8u}) {
    const CoincidenceCounts c = run_experiment(config(ModelKind::PhaseModel, 0, 22.5, 1000000, 42, parts));
    CHECK(c.total == 1000000);
    CHECK(c.n_pp + c.n_mm + c.n_pm + c.n_mp == c.total);
    CHECK(std::abs(static_cast<double>(c.n_pp) / c.total - 0.42677669529663687) < 0.002);
  }
}

TEST_CASE("run_experiment is deterministic") {
  for (ModelKind m : kAllModels) {
    const ExperimentConfig c = config(m, 10, 55, 200000, 123, 4);
    CHECK(run_experiment(c) == run_experiment(c));
  }
  ExperimentConfig a = config(ModelKind::PhaseModel, 10, 55, 200000, 123, 4);
  ExperimentConfig b = a;
  b.seed = 124;
  CHECK_FALSE(run_experiment(a) == run_experiment(b));
  b = a;
  b.stream = 1;
  CHECK_FALSE(run_experiment(a) == run_experiment(b));
}

TEST_CASE("channel frequencies lie within 5 sigma binomial bands") {
  const double n = 1e6;
  for (ModelKind m : kAllModels) {
    for (auto [a, b] : kGrid) {
      const CoincidenceCounts c = run_experiment(config(m, a, b, 1000000, 2024, 3));
      const auto freq = frequencies(c);
      const auto ref = reference(m, a * kDeg, b * kDeg);
      CAPTURE(model_name(m));
      CAPTURE(a);
      CAPTURE(b);
      for (std::size_t k = 0; k < 4; ++k) {
        // the 2e-6 slack covers the quadrature error of the baseline oracles
        CHECK(std::abs(freq[k] - ref[k]) <= oracle::binomial_band(ref[k], n) + 2e-6);
      }
      if (m == ModelKind::PhaseModel) {
        const CorrelationEstimate e = estimate_correlation(c);
        CHECK(std::abs(e.e_hat - std::cos(2 * (a - b) * kDeg)) <= 5 * e.std_err + 1e-12);
      }
    }
  }
}

TEST_CASE("merge_counts is a commutative monoid") {
  const CoincidenceCounts zero{};
  const CoincidenceCounts x{1, 2, 3, 4, 10};
  const CoincidenceCounts y{5, 0, 7, 1, 13};
  const CoincidenceCounts z{0, 9, 0, 2, 11};
  CHECK(merge_counts(x, zero) == x);
  CHECK(merge_counts(zero, x) == x);
  CHECK(merge_counts(x, y) == merge_counts(y, x));
  CHECK(merge_counts(merge_counts(x, y), z) == merge_counts(x, merge_counts(y, z)));

  const std::uint64_t big = std::numeric_limits<std::uint64_t>::max();
  CHECK_THROWS_AS(merge_counts({big, 0, 0, 0, big}, {1, 0, 0, 0, 1}), CountOverflow);
}

TEST_CASE("thread count does not change the counts") {
  for (ModelKind m : kAllModels) {
    const ExperimentConfig c = config(m, 15, 50, 300007, 31, 7);
    const CoincidenceCounts serial = run_experiment(c, 1);
    CHECK(run_experiment(c, 3) == serial);
    CHECK(run_experiment(c, 8) == serial);
    CHECK(run_partitions(c, 4) == run_partitions(c, 1));
  }
}

TEST_CASE("per-partition counts merge to the run total") {
  const ExperimentConfig c = config(ModelKind::BellLocalStochastic, 12, 70, 100003, 5, 4);
  const std::vector<CoincidenceCounts> parts = run_partitions(c);
  REQUIRE(parts.size() == 4);
  CoincidenceCounts sum;
  for (const auto &p : parts) sum = merge_counts(sum, p);
  CHECK(sum == run_experiment(c));
  // trial i goes to partition i mod 4
  CHECK(parts[0].total == 25001);
  CHECK(parts[1].total == 25001);
  CHECK(parts[2].total == 25001);
  CHECK(parts[3].total == 25000);
}

TEST_CASE("config validation") {
  ExperimentConfig c = config(ModelKind::PhaseModel, 0, 0, 0);
  CHECK_THROWS_AS(run_experiment(c), EmptyRun);
  c.trials = 3;
  c.partitions = 4;
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
  c.partitions = 0;
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
  c.partitions = 1;
  c.trials = kMaxTrials + 1;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.trials = 10;
  c.phi1 = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("estimate_correlation") {
  CorrelationEstimate e = estimate_correlation({500, 500, 0, 0, 1000});
  CHECK(e.e_hat == 1.0);
  CHECK(e.std_err == 0.0);
  CHECK(e.n == 1000);

  e = estimate_correlation({250, 250, 250, 250, 1000});
  CHECK(e.e_hat == 0.0);
  CHECK(e.std_err == doctest::Approx(0.03162277660168379).epsilon(1e-14));

  e = estimate_correlation({0, 0, 300, 700, 1000});
  CHECK(e.e_hat == -1.0);

  CHECK_THROWS_AS(estimate_correlation({}), EmptyCounts);
}

TEST_CASE("estimate_chsh") {
  ExperimentConfig base = config(ModelKind::PhaseModel, 0, 22.5, 1000000, 42, 2);
  ChshEstimate s = estimate_chsh(base, 45 * kDeg, 67.5 * kDeg);
  CHECK(std::abs(s.s_hat - 2 * std::sqrt(2.0)) < 0.01);
  CHECK(std::abs(s.s_hat - 2 * std::sqrt(2.0)) < 5 * s.std_err);
  double var = 0;
  for (const auto &t : s.terms) var += t.std_err * t.std_err;
  CHECK(s.std_err == doctest::Approx(std::sqrt(var)));
  CHECK(s.s_hat == doctest::Approx(s.terms[0].e_hat - s.terms[1].e_hat + s.terms[2].e_hat +
                                   s.terms[3].e_hat));

  base.model = ModelKind::BellLocalDeterministic;
  s = estimate_chsh(base, 45 * kDeg, 67.5 * kDeg);
  CHECK(std::abs(s.s_hat - 2.0) < 0.01);

  base.trials = 4;
  base.partitions = 1;
  s = estimate_chsh(base, 45 * kDeg, 67.5 * kDeg);
  CHECK(s.terms[0].n == 4);
  CHECK(std::isfinite(s.s_hat));
}

TEST_CASE("Bell-local models stay within the classical bound over a 5 degree grid") {
  constexpr int n = 36;
  for (ModelKind m : {ModelKind::BellLocalDeterministic, ModelKind::BellLocalStochastic}) {
    std::vector<double> e(n * n), se(n * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        ExperimentConfig c = config(m, 5.0 * i, 5.0 * j, 20000, 77, 1);
        c.stream = static_cast<std::uint64_t>(i * n + j + 1);
        const CorrelationEstimate est = estimate_correlation(run_experiment(c));
        e[i * n + j] = est.e_hat;
        se[i * n + j] = est.std_err;
      }
    }
    double worst = -1e9;
    for (int a = 0; a < n; ++a)
      for (int ap = 0; ap < n; ++ap)
        for (int b = 0; b < n; ++b)
          for (int bp = 0; bp < n; ++bp) {
            const int i1 = a * n + b, i2 = a * n + bp, i3 = ap * n + b, i4 = ap * n + bp;
            const double s = e[i1] - e[i2] + e[i3] + e[i4];
            const double err = std::sqrt(se[i1] * se[i1] + se[i2] * se[i2] + se[i3] * se[i3] +
                                         se[i4] * se[i4]);
            worst = std::max(worst, std::abs(s) - (2.0 + 5.0 * err));
          }
    CAPTURE(model_name(m));
    CHECK(worst <= 0.0);
  }
}
