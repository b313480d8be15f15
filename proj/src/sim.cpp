#include "bellphase/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

namespace bellphase::sim {

namespace {

constexpr double kPi = std::numbers::pi;

// Per-run sampler; PhaseModel channel thresholds are computed once.
class Sampler {
public:
  Sampler(ModelKind model, double phi1, double phi2, const model::PairSourceSpec &source)
      : model_(model), phi1_(phi1), phi2_(phi2) {
    if (model_ == ModelKind::PhaseModel) {
      const model::OutcomeDistribution d = model::coincidence_probabilities(phi1, phi2, source);
      cut_pp_ = d.pp;
      cut_mm_ = d.pp + d.mm;
      cut_pm_ = d.pp + d.mm + d.pm;
    }
  }

  Outcome operator()(rng::Xoshiro256 &rng) const {
    switch (model_) {
      case ModelKind::PhaseModel: {
        const double u = rng.uniform();
        if (u < cut_pp_) return Outcome::PlusPlus;
        if (u < cut_mm_) return Outcome::MinusMinus;
        if (u < cut_pm_) return Outcome::PlusMinus;
        return Outcome::MinusPlus;
      }
      case ModelKind::BellLocalDeterministic: {
        const double lambda = kPi * rng.uniform();
        const bool a = std::cos(2.0 * (phi1_ - lambda)) >= 0.0;
        const bool b = std::cos(2.0 * (phi2_ - lambda)) >= 0.0;
        return combine(a, b);
      }
      case ModelKind::BellLocalStochastic: {
        const double lambda = kPi * rng.uniform();
        const double ca = std::cos(phi1_ - lambda);
        const double cb = std::cos(phi2_ - lambda);
        const bool a = rng.uniform() < ca * ca;
        const bool b = rng.uniform() < cb * cb;
        return combine(a, b);
      }
    }
    return Outcome::MinusPlus;
  }

private:
  static Outcome combine(bool a, bool b) {
    if (a) return b ? Outcome::PlusPlus : Outcome::PlusMinus;
    return b ? Outcome::MinusPlus : Outcome::MinusMinus;
  }

  ModelKind model_;
  double phi1_;
  double phi2_;
  double cut_pp_ = 0.0;
  double cut_mm_ = 0.0;
  double cut_pm_ = 0.0;
};

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw CountOverflow("merge_counts: 64-bit count overflow");
  return r;
}

CoincidenceCounts run_one_partition(const ExperimentConfig &config, const Sampler &sampler,
                                    std::uint64_t partition) {
  const std::uint64_t base = config.trials / config.partitions;
  const std::uint64_t n = base + (partition < config.trials % config.partitions ? 1 : 0);
  rng::Xoshiro256 gen(rng::substream_key(config.seed, config.stream, partition));
  CoincidenceCounts counts;
  for (std::uint64_t i = 0; i < n; ++i) counts.add(sampler(gen));
  return counts;
}

}  // namespace

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::PhaseModel:
      return "phase";
    case ModelKind::BellLocalDeterministic:
      return "bell-det";
    case ModelKind::BellLocalStochastic:
      return "bell-stoch";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model(std::string_view name) {
  for (ModelKind k : kAllModels) {
    if (model_name(k) == name) return k;
  }
  return std::nullopt;
}

void validate(const ExperimentConfig &config) {
  if (config.trials == 0) throw EmptyRun("experiment needs at least one trial");
  if (config.trials > kMaxTrials) throw ConfigError("trials exceed 2^62");
  if (config.partitions == 0) throw ConfigError("partitions must be positive");
  if (config.partitions > config.trials) throw ConfigError("partitions must not exceed trials");
  for (double v : {config.phi1, config.phi2, config.source.delta, config.source.phi0}) {
    if (!std::isfinite(v)) throw ConfigError("angles must be finite");
  }
}

void CoincidenceCounts::add(Outcome o) {
  switch (o) {
    case Outcome::PlusPlus:
      ++n_pp;
      break;
    case Outcome::MinusMinus:
      ++n_mm;
      break;
    case Outcome::PlusMinus:
      ++n_pm;
      break;
    case Outcome::MinusPlus:
      ++n_mp;
      break;
  }
  ++total;
}

Outcome sample_outcome(ModelKind model, double phi1, double phi2,
                       const model::PairSourceSpec &source, rng::Xoshiro256 &rng) {
  return Sampler(model, phi1, phi2, source)(rng);
}

model::OutcomeDistribution channel_probabilities(ModelKind model, double phi1, double phi2,
                                                 const model::PairSourceSpec &source) {
  switch (model) {
    case ModelKind::PhaseModel:
      return model::coincidence_probabilities(phi1, phi2, source);
    case ModelKind::BellLocalDeterministic: {
      const double theta = phi1 - phi2;
      const double folded = theta - kPi * std::round(theta / kPi);
      const double same = std::clamp(0.5 - std::abs(folded) / kPi, 0.0, 0.5);
      return {same, same, 0.5 - same, 0.5 - same};
    }
    case ModelKind::BellLocalStochastic: {
      const double same = 0.25 + std::cos(2.0 * (phi1 - phi2)) / 8.0;
      return {same, same, 0.5 - same, 0.5 - same};
    }
  }
  return {};
}

double analytic_correlation(ModelKind model, double phi1, double phi2,
                            const model::PairSourceSpec &source) {
  if (model == ModelKind::PhaseModel && source.delta == 0.0) {
    return model::correlation(phi1, phi2);
  }
  return channel_probabilities(model, phi1, phi2, source).signed_sum();
}

double analytic_chsh(ModelKind model, double phi1, double phi1p, double phi2, double phi2p,
                     const model::PairSourceSpec &source) {
  return analytic_correlation(model, phi1, phi2, source) -
         analytic_correlation(model, phi1, phi2p, source) +
         analytic_correlation(model, phi1p, phi2, source) +
         analytic_correlation(model, phi1p, phi2p, source);
}

std::vector<CoincidenceCounts> run_partitions(const ExperimentConfig &config, unsigned workers) {
  validate(config);
  const Sampler sampler(config.model, config.phi1, config.phi2, config.source);
  std::vector<CoincidenceCounts> out(config.partitions);

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  const std::uint64_t threads = std::min<std::uint64_t>(config.partitions, workers);
  if (threads <= 1) {
    for (std::uint64_t p = 0; p < config.partitions; ++p) {
      out[p] = run_one_partition(config, sampler, p);
    }
    return out;
  }

  std::atomic<std::uint64_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::uint64_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t p = next++; p < config.partitions; p = next++) {
        out[p] = run_one_partition(config, sampler, p);
      }
    });
  }
  pool.clear();
  return out;
}

CoincidenceCounts run_experiment(const ExperimentConfig &config, unsigned workers) {
  CoincidenceCounts total;
  for (const CoincidenceCounts &c : run_partitions(config, workers)) total = merge_counts(total, c);
  return total;
}

CorrelationEstimate estimate_correlation(const CoincidenceCounts &counts) {
  if (counts.total == 0) throw EmptyCounts("estimate_correlation: no counts");
  const double n = static_cast<double>(counts.total);
  const double agree = static_cast<double>(counts.n_pp) + static_cast<double>(counts.n_mm);
  const double disagree = static_cast<double>(counts.n_pm) + static_cast<double>(counts.n_mp);
  const double e = (agree - disagree) / n;
  return {e, std::sqrt(std::max(0.0, 1.0 - e * e) / n), counts.total};
}

ChshEstimate estimate_chsh(const ExperimentConfig &base, double phi1p, double phi2p) {
  const std::array<std::pair<double, double>, 4> settings = {{
      {base.phi1, base.phi2},
      {base.phi1, phi2p},
      {phi1p, base.phi2},
      {phi1p, phi2p},
  }};
  ChshEstimate est;
  double var = 0.0;
  for (std::size_t k = 0; k < settings.size(); ++k) {
    ExperimentConfig sub = base;
    sub.phi1 = settings[k].first;
    sub.phi2 = settings[k].second;
    sub.stream = base.stream * 4 + k + 1;
    est.terms[k] = estimate_correlation(run_experiment(sub));
    var += est.terms[k].std_err * est.terms[k].std_err;
  }
  est.s_hat = est.terms[0].e_hat - est.terms[1].e_hat + est.terms[2].e_hat + est.terms[3].e_hat;
  est.std_err = std::sqrt(var);
  return est;
}

CoincidenceCounts merge_counts(const CoincidenceCounts &a, const CoincidenceCounts &b) {
  return {checked_add(a.n_pp, b.n_pp), checked_add(a.n_mm, b.n_mm), checked_add(a.n_pm, b.n_pm),
          checked_add(a.n_mp, b.n_mp), checked_add(a.total, b.total)};
}

}  // namespace bellphase::sim
