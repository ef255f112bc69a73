#include "dhawkes/harmonic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dhawkes {

HarmonicSpec HarmonicSpec::flat(double period) { return HarmonicSpec{period, {}, {1.0}}; }

HarmonicSpec HarmonicSpec::with_cycles(std::vector<int> cycles, double period) {
  HarmonicSpec spec{period, std::move(cycles), {}};
  spec.coefficients.assign(spec.basis_size(), 0.0);
  spec.coefficients[0] = 1.0;
  return spec;
}

double HarmonicSpec::frequency(std::size_t k) const {
  return 2.0 * std::numbers::pi * static_cast<double>(cycles[k]) / period;
}

void validate(const HarmonicSpec& spec) {
  if (!(spec.period > 0.0) || !std::isfinite(spec.period)) throw std::invalid_argument("period must be positive");
  for (int x : spec.cycles)
    if (x <= 0) throw std::invalid_argument("cycles per period must be positive integers");
  if (spec.coefficients.size() != spec.basis_size())
    throw std::invalid_argument("expected 2K+1 activity coefficients");
  if (spec.coefficients[0] != 1.0) throw std::invalid_argument("the constant activity coefficient is fixed to 1");
  for (double c : spec.coefficients)
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite activity coefficient");
}

void basis_eval(const HarmonicSpec& spec, double t, std::span<double> out) {
  out[0] = 1.0;
  for (std::size_t k = 0; k < spec.harmonics(); ++k) {
    const double w = spec.frequency(k);
    out[2 * k + 1] = std::sin(w * t);
    out[2 * k + 2] = std::cos(w * t);
  }
}

std::vector<double> basis_eval(const HarmonicSpec& spec, double t) {
  std::vector<double> s(spec.basis_size());
  basis_eval(spec, t, s);
  return s;
}

double activity_eval(const HarmonicSpec& spec, double t) {
  double value = spec.coefficients[0];
  for (std::size_t k = 0; k < spec.harmonics(); ++k) {
    const double w = spec.frequency(k);
    value += spec.coefficients[2 * k + 1] * std::sin(w * t) + spec.coefficients[2 * k + 2] * std::cos(w * t);
  }
  return value;
}

double activity_upper_bound(const HarmonicSpec& spec) {
  double bound = 1.0;
  for (const auto& ap : amplitude_phase(spec)) bound += ap.amplitude;
  return bound;
}

std::vector<AmplitudePhase> amplitude_phase(const HarmonicSpec& spec) {
  std::vector<AmplitudePhase> out(spec.harmonics());
  for (std::size_t k = 0; k < spec.harmonics(); ++k) {
    const double s = spec.coefficients[2 * k + 1];
    const double c = spec.coefficients[2 * k + 2];
    // s sin(x) + c cos(x) = A cos(x + phi) with A cos(phi) = c, A sin(phi) = -s.
    out[k].amplitude = std::hypot(s, c);
    out[k].phase = (s == 0.0 && c == 0.0) ? 0.0 : std::atan2(-s, c);
  }
  return out;
}

std::vector<double> weighted_integral(const HarmonicSpec& spec, double t, double a, double eta) {
  if (a < t) throw std::invalid_argument("weighted_integral requires a >= t");
  if (!(eta > 0.0)) throw std::invalid_argument("weighted_integral requires eta > 0");
  std::vector<double> W(spec.basis_size());
  const double decay = std::exp(-eta * (a - t));
  W[0] = -std::expm1(-eta * (a - t));
  for (std::size_t k = 0; k < spec.harmonics(); ++k) {
    const double w = spec.frequency(k);
    const double g = eta / (eta * eta + w * w);
    const double st = std::sin(w * t), ct = std::cos(w * t);
    const double sa = std::sin(w * a), ca = std::cos(w * a);
    W[2 * k + 1] = g * (eta * st + w * ct - decay * (eta * sa + w * ca));
    W[2 * k + 2] = g * (eta * ct - w * st + decay * (w * sa - eta * ca));
  }
  return W;
}

std::vector<double> immigrant_integral(const HarmonicSpec& spec, double a0) {
  if (!(a0 > 0.0)) throw std::invalid_argument("immigrant_integral requires a0 > 0");
  std::vector<double> S(spec.basis_size());
  S[0] = a0;
  for (std::size_t k = 0; k < spec.harmonics(); ++k) {
    const double w = spec.frequency(k);
    const double half = std::sin(0.5 * a0 * w);
    S[2 * k + 1] = 2.0 * half * half / w;  // (1 - cos(a0 w)) / w
    S[2 * k + 2] = std::sin(a0 * w) / w;
  }
  return S;
}

}  // namespace dhawkes
