#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bellphase/model.hpp"
#include "bellphase/rng.hpp"

namespace bellphase::sim {

class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string &what) : std::invalid_argument(what) {}
};

class EmptyRun : public std::invalid_argument {
public:
  explicit EmptyRun(const std::string &what) : std::invalid_argument(what) {}
};

class EmptyCounts : public std::invalid_argument {
public:
  explicit EmptyCounts(const std::string &what) : std::invalid_argument(what) {}
};

class CountOverflow : public std::overflow_error {
public:
  explicit CountOverflow(const std::string &what) : std::overflow_error(what) {}
};

enum class ModelKind {
  // Categorical draw over the four phase-model coincidence channels.
  PhaseModel,
  // lambda ~ U[0, pi); each side reports sign(cos 2(phi - lambda)), sign(0) = +.
  BellLocalDeterministic,
  // lambda ~ U[0, pi); each side independently + with probability cos^2(phi - lambda).
  BellLocalStochastic,
};

inline constexpr std::array<ModelKind, 3> kAllModels = {
    ModelKind::PhaseModel, ModelKind::BellLocalDeterministic, ModelKind::BellLocalStochastic};

// Short names used on the command line: "phase", "bell-det", "bell-stoch".
std::string_view model_name(ModelKind kind);
std::optional<ModelKind> parse_model(std::string_view name);

enum class Outcome { PlusPlus, MinusMinus, PlusMinus, MinusPlus };

inline constexpr std::uint64_t kMaxTrials = std::uint64_t{1} << 62;

struct ExperimentConfig {
  ModelKind model = ModelKind::PhaseModel;
  double phi1 = 0.0;  // radians
  double phi2 = 0.0;  // radians
  model::PairSourceSpec source{};
  std::uint64_t trials = 1;
  std::uint64_t seed = 42;
  std::uint64_t partitions = 1;
  // Sub-experiment tag mixed into the substream key; distinct tags give
  // decorrelated streams for the same seed.
  std::uint64_t stream = 0;
};

// Throws ConfigError (or EmptyRun for trials == 0) on an invalid config.
void validate(const ExperimentConfig &config);

struct CoincidenceCounts {
  std::uint64_t n_pp = 0;
  std::uint64_t n_mm = 0;
  std::uint64_t n_pm = 0;
  std::uint64_t n_mp = 0;
  std::uint64_t total = 0;

  void add(Outcome o);

  friend constexpr bool operator==(const CoincidenceCounts &, const CoincidenceCounts &) = default;
};

struct CorrelationEstimate {
  double e_hat = 0.0;
  double std_err = 0.0;
  std::uint64_t n = 0;
};

struct ChshEstimate {
  double s_hat = 0.0;
  double std_err = 0.0;
  // E(phi1, phi2), E(phi1, phi2'), E(phi1', phi2), E(phi1', phi2')
  std::array<CorrelationEstimate, 4> terms{};
};

/// Draws one pair outcome. Consumes one uniform for PhaseModel and
/// BellLocalDeterministic, three for BellLocalStochastic.
Outcome sample_outcome(ModelKind model, double phi1, double phi2,
                       const model::PairSourceSpec &source, rng::Xoshiro256 &rng);

/// Exact channel probabilities of each model. For the Bell-local baselines these
/// are the lambda-averaged closed forms:
///   deterministic: p(++) = p(--) = 1/2 - |t|/pi, t = (phi1 - phi2) folded into [-pi/2, pi/2]
///   stochastic:    p(++) = p(--) = 1/4 + cos 2(phi1 - phi2) / 8
/// The baselines ignore the source phases.
model::OutcomeDistribution channel_probabilities(ModelKind model, double phi1, double phi2,
                                                 const model::PairSourceSpec &source = {});

/// E(phi1, phi2) of a model in closed form.
double analytic_correlation(ModelKind model, double phi1, double phi2,
                            const model::PairSourceSpec &source = {});

/// CHSH combination of analytic_correlation.
double analytic_chsh(ModelKind model, double phi1, double phi1p, double phi2, double phi2p,
                     const model::PairSourceSpec &source = {});

/// Counts of each partition, in partition order. Trial i belongs to partition
/// i mod partitions; partition p draws from the substream
/// substream_key(seed, stream, p). Partitions run concurrently on up to
/// `workers` threads (0: available processors); the result does not depend on it.
std::vector<CoincidenceCounts> run_partitions(const ExperimentConfig &config,
                                              unsigned workers = 0);

/// Merged counts of run_partitions.
CoincidenceCounts run_experiment(const ExperimentConfig &config, unsigned workers = 0);

/// e_hat = (n_pp + n_mm - n_pm - n_mp) / total, std_err = sqrt((1 - e_hat^2) / total).
CorrelationEstimate estimate_correlation(const CoincidenceCounts &counts);

/// Runs the four CHSH sub-experiments with stream tags base.stream * 4 + 1 .. + 4.
/// Settings in `base` supply phi1 and phi2.
ChshEstimate estimate_chsh(const ExperimentConfig &base, double phi1p, double phi2p);

/// Channelwise sum. Throws CountOverflow if any channel would wrap.
CoincidenceCounts merge_counts(const CoincidenceCounts &a, const CoincidenceCounts &b);

}  // namespace bellphase::sim
