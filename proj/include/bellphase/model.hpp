#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellphase/ga3.hpp"

namespace bellphase::model {

class RangeError : public std::out_of_range {
public:
  explicit RangeError(const std::string &what) : std::out_of_range(what) {}
};

// A field rotation e^{i angle}, with i the pseudoscalar e1e2e3.
// `re` and `im` are always cos(angle) and sin(angle) of the stored angle.
class PhaseRotor {
public:
  PhaseRotor() = default;
  explicit PhaseRotor(double angle);

  double angle() const { return angle_; }
  double re() const { return re_; }
  double im() const { return im_; }

  // re + im e1e2e3
  ga3::Multivector to_multivector() const;

private:
  double angle_ = 0.0;
  double re_ = 1.0;
  double im_ = 0.0;
};

// Phase relation fixed at the pair source. Values are kept as given; no range
// reduction.
struct PairSourceSpec {
  double delta = 0.0;  // phase difference between the two photons
  double phi0 = 0.0;   // common initial phase
};

// Rotators on either side of the source. Stations sit at integer multiples of
// the wavelength, so only the rotator angles contribute phase.
struct RotatorStation {
  std::vector<double> angles_forward;   // +z side
  std::vector<double> angles_backward;  // -z side
};

// Four-channel outcome distribution, ordered {++, --, +-, -+}.
struct OutcomeDistribution {
  double pp = 0.0;
  double mm = 0.0;
  double pm = 0.0;
  double mp = 0.0;

  double sum() const { return pp + mm + pm + mp; }
  // Expectation of the product of the two +/-1 outcomes.
  double signed_sum() const { return pp + mm - pm - mp; }
};

/// Rotation on the +z side for a rotator travel of `z1_frac` wavelengths.
/// Angle is 2 pi z1_frac; throws RangeError outside [0, 1].
PhaseRotor rotation_forward(double z1_frac);

/// Rotation on the -z side, carrying the source phase difference:
/// angle = -(2 pi z2_frac + delta).
PhaseRotor rotation_backward(double z2_frac, const PairSourceSpec &source);

/// Squared real part of the rotor: cos^2(angle).
double detection_probability(const PhaseRotor &r);

/// Joint detection probability of the pair, taken as the squared scalar part
/// of the geometric product R(phi0 + phi1) R(-(phi0 + phi2 + delta)).
/// Equals cos^2(phi1 - phi2 - delta).
double joint_probability(double phi1, double phi2, const PairSourceSpec &source = {});

/// Same mechanism with several rotators per side:
/// cos^2(sum forward - sum backward - delta). Empty lists contribute zero.
double joint_probability_multi(const RotatorStation &station, const PairSourceSpec &source = {});

/// Coincidence distribution over {++, --, +-, -+}. The raw rates
/// C++ = C-- = cos^2 and C+- = C-+ = 1 - cos^2 sum to two; they are halved here so
/// the four channels form a proper distribution. The delta-free overload is the
/// delta = 0 case.
OutcomeDistribution coincidence_probabilities(double phi1, double phi2);
OutcomeDistribution coincidence_probabilities(double phi1, double phi2,
                                              const PairSourceSpec &source);

/// E(phi1, phi2) = cos 2(phi1 - phi2).
double correlation(double phi1, double phi2);

/// S = E(a, b) - E(a, b') + E(a', b) + E(a', b').
double chsh(double phi1, double phi1p, double phi2, double phi2p);

}  // namespace bellphase::model
