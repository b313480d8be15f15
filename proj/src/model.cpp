#include "bellphase/model.hpp"

#include <cmath>
#include <numbers>

namespace bellphase::model {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_fraction(double f, const char *what) {
  if (!(f >= 0.0 && f <= 1.0)) {
    throw RangeError(std::string(what) + ": wavelength fraction must lie in [0, 1]");
  }
}

// Squared scalar part of R(forward) R(-backward), the shared mechanism of the
// pair and multi-rotator probabilities.
double squared_real_of_product(double forward, double backward) {
  const ga3::Multivector product =
      ga3::geometric_product(PhaseRotor(forward).to_multivector(),
                             PhaseRotor(-backward).to_multivector());
  const double re = ga3::scalar_part(product);
  return re * re;
}

}  // namespace

PhaseRotor::PhaseRotor(double angle)
    : angle_(angle), re_(std::cos(angle)), im_(std::sin(angle)) {}

ga3::Multivector PhaseRotor::to_multivector() const {
  ga3::Multivector m;
  m[ga3::kScalar] = re_;
  m[ga3::kE123] = im_;
  return m;
}

PhaseRotor rotation_forward(double z1_frac) {
  require_fraction(z1_frac, "rotation_forward");
  return PhaseRotor(kTwoPi * z1_frac);
}

PhaseRotor rotation_backward(double z2_frac, const PairSourceSpec &source) {
  require_fraction(z2_frac, "rotation_backward");
  return PhaseRotor(-(kTwoPi * z2_frac + source.delta));
}

double detection_probability(const PhaseRotor &r) { return r.re() * r.re(); }

double joint_probability(double phi1, double phi2, const PairSourceSpec &source) {
  return squared_real_of_product(source.phi0 + phi1, source.phi0 + phi2 + source.delta);
}

double joint_probability_multi(const RotatorStation &station, const PairSourceSpec &source) {
  // Summation order mirrors joint_probability so one angle per side reduces
  // to it bit for bit.
  double forward = 0.0;
  for (double a : station.angles_forward) forward += a;
  double backward = 0.0;
  for (double a : station.angles_backward) backward += a;
  return squared_real_of_product(source.phi0 + forward, source.phi0 + backward + source.delta);
}

OutcomeDistribution coincidence_probabilities(double phi1, double phi2) {
  return coincidence_probabilities(phi1, phi2, PairSourceSpec{});
}

OutcomeDistribution coincidence_probabilities(double phi1, double phi2,
                                              const PairSourceSpec &source) {
  const double same = 0.5 * joint_probability(phi1, phi2, source);
  const double diff = 0.5 - same;
  return {same, same, diff, diff};
}

double correlation(double phi1, double phi2) { return std::cos(2.0 * (phi1 - phi2)); }

double chsh(double phi1, double phi1p, double phi2, double phi2p) {
  return correlation(phi1, phi2) - correlation(phi1, phi2p) + correlation(phi1p, phi2) +
         correlation(phi1p, phi2p);
}

}  // namespace bellphase::model
