#pragma once

// Conjugate models with closed-form evidence, for checking bridge sampling.

#include <cmath>
#include <numbers>
#include <vector>

#include "dhawkes/evidence.hpp"
#include "dhawkes/sampler.hpp"

namespace oracle {

struct Toy {
  dhawkes::LogDensityFn density;  // unconstrained, with gradient
  double log_evidence;
};

// y_i ~ Poisson(lambda), lambda ~ Gamma(a, b); sampled on u = ln lambda.
inline Toy gamma_poisson(const std::vector<int>& y, double a, double b) {
  double sum = 0.0, log_fact = 0.0;
  for (int v : y) {
    sum += v;
    log_fact += std::lgamma(v + 1.0);
  }
  const double n = static_cast<double>(y.size());
  Toy t;
  t.density = [=](std::span<const double> x, std::span<double> g) {
    const double u = x[0], lambda = std::exp(u);
    if (!g.empty()) g[0] = sum - n * lambda + a - b * lambda;
    return sum * u - n * lambda - log_fact + a * std::log(b) - std::lgamma(a) + (a - 1.0) * u - b * lambda + u;
  };
  t.log_evidence = a * std::log(b) - std::lgamma(a) + std::lgamma(a + sum) - (a + sum) * std::log(b + n) - log_fact;
  return t;
}

// y_i ~ N(theta, s^2), theta ~ N(0, tau^2).
inline Toy normal_normal(const std::vector<double>& y, double s, double tau) {
  double sum = 0.0, sq = 0.0;
  for (double v : y) {
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(y.size());
  const double log2pi = std::log(2.0 * std::numbers::pi);
  Toy t;
  t.density = [=](std::span<const double> x, std::span<double> g) {
    const double th = x[0];
    if (!g.empty()) g[0] = (sum - n * th) / (s * s) - th / (tau * tau);
    return -0.5 * n * (log2pi + 2 * std::log(s)) - 0.5 * (sq - 2 * th * sum + n * th * th) / (s * s) -
           0.5 * (log2pi + 2 * std::log(tau)) - 0.5 * th * th / (tau * tau);
  };
  const double v = s * s + n * tau * tau;
  const double logdet = (n - 1) * std::log(s * s) + std::log(v);
  const double quad = sq / (s * s) - tau * tau * sum * sum / (s * s * v);
  t.log_evidence = -0.5 * (n * log2pi + logdet + quad);
  return t;
}

inline dhawkes::Draws posterior_draws(const dhawkes::LogDensityFn& f, std::uint64_t seed) {
  dhawkes::SamplerConfig cfg;
  cfg.chains = 4;
  cfg.warmup = 1000;
  cfg.iterations = 1000;
  cfg.seed = seed;
  return dhawkes::run_nuts(f, [](dhawkes::Rng& rng) { return std::vector<double>{rng.uniform() - 0.5}; }, 1, cfg)
      .draws;
}

inline dhawkes::LogTargetFn value_only(const dhawkes::LogDensityFn& f) {
  return [f](std::span<const double> x) { return f(x, {}); };
}

}  // namespace oracle
