#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dhawkes/diagnostics.hpp"
#include "dhawkes/harmonic.hpp"
#include "dhawkes/rng.hpp"
#include "dhawkes/sampler.hpp"

namespace dhawkes {

/// Poisson process of posts with intensity rate * alpha_I(t).
struct ImmigrantParams {
  double rate = 1.0;  // arrivals per hour averaged over a period
  HarmonicSpec harmonic;
};

void validate(const ImmigrantParams& p);

double immigrant_intensity(const ImmigrantParams& p, double t);

/// sum_i ln gamma_0(t_i) - rate * alpha' S(a0); -inf if the intensity is not
/// positive at an arrival. Arrivals must lie in [0, a0).
double immigrant_loglik(const ImmigrantParams& p, std::span<const double> arrivals, double a0);

/// Arrivals on [0, a0) by thinning, sorted.
std::vector<double> simulate_arrivals(Rng& rng, const ImmigrantParams& p, double a0);

struct ImmigrantPosterior {
  std::vector<int> cycles;
  double period = 24.0;
  std::vector<std::string> names;  // lambda0, alpha1..alpha2K
  Draws draws;                     // natural scale
  std::vector<Convergence> diagnostics;
  std::vector<ChainStats> chain_stats;
  std::vector<std::string> warnings;

  ImmigrantParams params(std::size_t chain, std::size_t iteration) const;
};

/// NUTS on (ln rate, alpha_1..alpha_2K) with a flat prior on ln rate and
/// alpha_k ~ N(0, sigma_alpha^2), sigma_alpha defaulting to 1/sqrt(2K).
ImmigrantPosterior fit_immigrants(std::span<const double> arrivals, double a0, std::vector<int> cycles,
                                  double period, const SamplerConfig& config,
                                  std::optional<double> sigma_alpha = std::nullopt);

void write_immigrant_csv(std::ostream& out, const ImmigrantPosterior& s);

}  // namespace dhawkes
