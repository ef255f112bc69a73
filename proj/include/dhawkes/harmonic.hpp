#pragma once

#include <span>
#include <vector>

namespace dhawkes {

/// Periodic activity function
///   alpha(t) = 1 + sum_k [ c_{2k-1} sin(w_k t) + c_{2k} cos(w_k t) ],
/// with w_k = 2*pi*cycles[k]/period. Integer cycle counts keep the mean of
/// alpha over one period at exactly 1.
struct HarmonicSpec {
  double period = 24.0;
  std::vector<int> cycles;
  std::vector<double> coefficients{1.0};  // length 2K+1, coefficients[0] == 1

  static HarmonicSpec flat(double period = 24.0);
  /// Basis with the given cycle counts and all non-constant coefficients zero.
  static HarmonicSpec with_cycles(std::vector<int> cycles, double period = 24.0);

  std::size_t harmonics() const { return cycles.size(); }
  std::size_t basis_size() const { return 2 * cycles.size() + 1; }
  double frequency(std::size_t k) const;

  bool operator==(const HarmonicSpec&) const = default;
};

/// Throws std::invalid_argument if the spec breaks its invariants.
void validate(const HarmonicSpec& spec);

/// [1, sin(w_1 t), cos(w_1 t), ..., sin(w_K t), cos(w_K t)]
std::vector<double> basis_eval(const HarmonicSpec& spec, double t);
void basis_eval(const HarmonicSpec& spec, double t, std::span<double> out);

double activity_eval(const HarmonicSpec& spec, double t);

/// 1 + sum of harmonic amplitudes; never below alpha(t).
double activity_upper_bound(const HarmonicSpec& spec);

struct AmplitudePhase {
  double amplitude = 0.0;
  double phase = 0.0;
};

/// Polar form: alpha(t) = 1 + sum_k A_k cos(w_k t + phi_k).
std::vector<AmplitudePhase> amplitude_phase(const HarmonicSpec& spec);

/// W_k(t, a, eta) = int_t^a s_k(u) eta exp(-eta (u - t)) du, closed form.
std::vector<double> weighted_integral(const HarmonicSpec& spec, double t, double a, double eta);

/// S_k(a0) = int_0^a0 s_k(u) du, closed form.
std::vector<double> immigrant_integral(const HarmonicSpec& spec, double a0);

}  // namespace dhawkes
