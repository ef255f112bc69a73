#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dhawkes/rng.hpp"

namespace dhawkes {

/// Log density with gradient. `grad` is empty when only the value is needed.
/// Must be safe to call concurrently (one chain per thread).
using LogDensityFn = std::function<double(std::span<const double> x, std::span<double> grad)>;

/// Draws an initial point for a chain.
using InitFn = std::function<std::vector<double>(Rng& rng)>;

/// chains x iterations x dim, stored draw-major.
struct Draws {
  std::size_t chains = 0;
  std::size_t iterations = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  Draws() = default;
  Draws(std::size_t c, std::size_t n, std::size_t d) : chains(c), iterations(n), dim(d), values(c * n * d) {}

  double& at(std::size_t c, std::size_t i, std::size_t d) { return values[(c * iterations + i) * dim + d]; }
  double at(std::size_t c, std::size_t i, std::size_t d) const { return values[(c * iterations + i) * dim + d]; }
  std::span<double> draw(std::size_t c, std::size_t i) { return {values.data() + (c * iterations + i) * dim, dim}; }
  std::span<const double> draw(std::size_t c, std::size_t i) const {
    return {values.data() + (c * iterations + i) * dim, dim};
  }
  std::size_t total() const { return chains * iterations; }
  /// chains x iterations values of one coordinate, chain-major.
  std::vector<double> column(std::size_t d) const;
};

struct SamplerConfig {
  std::size_t chains = 4;
  std::size_t warmup = 1000;
  std::size_t iterations = 1000;
  double target_accept = 0.8;
  int max_depth = 10;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // chains run concurrently
};

struct ChainStats {
  double step_size = 0.0;
  std::vector<double> inverse_metric;
  double mean_accept = 0.0;
  std::size_t divergences = 0;      // post-warmup
  std::size_t max_depth_hits = 0;   // post-warmup
  std::size_t gradient_evaluations = 0;
};

struct SamplerResult {
  Draws draws;
  std::vector<ChainStats> stats;
};

/// No-U-turn Hamiltonian Monte Carlo with multinomial trajectory sampling, a
/// diagonal metric estimated in doubling warmup windows, and dual-averaging
/// step-size adaptation. Chain c uses the stream derived from (seed, c).
SamplerResult run_nuts(const LogDensityFn& log_density, const InitFn& init, std::size_t dim,
                       const SamplerConfig& config);

}  // namespace dhawkes
