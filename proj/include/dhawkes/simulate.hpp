#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dhawkes/params.hpp"
#include "dhawkes/rng.hpp"
#include "dhawkes/tree_data.hpp"

namespace dhawkes {

constexpr double kInfiniteHorizon = std::numeric_limits<double>::infinity();

/// Exp(eta) conditioned on (lo, hi) by inversion; hi may be infinite.
double sample_truncated_exponential(Rng& rng, double eta, double lo, double hi);

/// Offspring of one point on [a, b) by thinning against the bound
/// nu_j K0 eta exp(-eta (t - t_j)). Returned times are sorted.
std::vector<double> simulate_offspring(Rng& rng, const ModelParams& p, double t_j, bool is_immigrant, double nu_j,
                                       double a, double b);

/// Reproduction numbers of the points observed on [t_1, a): Gamma draws from
/// the conditional law for classes with a dispersion, mu otherwise.
std::vector<double> sample_observed_nu(Rng& rng, const ModelParams& p, const Cluster& observed, double a);

struct Propagation {
  Cluster cluster;
  bool truncated = false;  // stopped at max_points
};

/// Extends an observed cluster from a to b. Observed points get nu from the
/// conditional Gamma law given the cluster on [t_1, a); new points draw nu from
/// the offspring prior. Points are generated breadth first, then sorted by
/// time with parents remapped. The result has window_end = b.
Propagation propagate_cluster(Rng& rng, const ModelParams& p, const Cluster& observed, double a, double b,
                              std::size_t max_points = 100000);

struct SimConfig {
  std::uint64_t master_seed = 0;
  std::size_t max_points = 100000;
  double horizon = 48.0;
  std::size_t threads = 0;
};

/// Thrown when some cluster hit max_points; carries the full (partially
/// truncated) output.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(ClusterSet partial, std::vector<std::size_t> truncated);
  const ClusterSet& partial() const { return partial_; }
  const std::vector<std::size_t>& truncated() const { return truncated_; }

 private:
  ClusterSet partial_;
  std::vector<std::size_t> truncated_;
};

struct SimulationResult {
  ClusterSet set;
  std::vector<std::size_t> truncated;  // indices of clusters that hit the cap
};

/// One cluster per seed on [seed, seed + horizon), each on its own RNG stream
/// derived from (master_seed, seed index).
SimulationResult simulate_dataset_unchecked(const ModelParams& p, const std::vector<double>& seeds,
                                            const SimConfig& config);

/// As above but throws TruncationError if any cluster hit the cap.
ClusterSet simulate_dataset(const ModelParams& p, const std::vector<double>& seeds, const SimConfig& config);

}  // namespace dhawkes
