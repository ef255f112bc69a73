#include "dhawkes/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dhawkes/likelihood.hpp"
#include "dhawkes/parallel.hpp"

namespace dhawkes {

double sample_truncated_exponential(Rng& rng, double eta, double lo, double hi) {
  if (!(eta > 0.0)) throw std::invalid_argument("truncated exponential needs eta > 0");
  if (!(lo >= 0.0) || !(lo < hi)) throw std::invalid_argument("truncated exponential needs 0 <= lo < hi");
  const double u = rng.uniform();
  const double x = lo - std::log1p(u * std::expm1(-eta * (hi - lo))) / eta;
  return std::clamp(x, lo, hi);
}

std::vector<double> simulate_offspring(Rng& rng, const ModelParams& p, double t_j, bool is_immigrant, double nu_j,
                                       double a, double b) {
  if (!(nu_j >= 0.0)) throw std::invalid_argument("nu must be nonnegative");
  if (a < t_j || b < a) throw std::invalid_argument("simulate_offspring needs t_j <= a <= b");
  std::vector<double> out;
  if (nu_j == 0.0 || b == a) return out;
  const double eta = p.eta[is_immigrant ? 0 : 1];
  const double lo = a - t_j;
  const double hi = b - t_j;
  const double bound = activity_upper_bound(p.harmonic);
  // mass of eta exp(-eta u) on (lo, hi)
  const double mass = std::exp(-eta * lo) * -std::expm1(-eta * (hi - lo));
  const double mean = nu_j * bound * mass;
  if (!(mean > 0.0)) return out;
  const auto proposals = std::poisson_distribution<long long>(mean)(rng);
  out.reserve(static_cast<std::size_t>(proposals));
  for (long long k = 0; k < proposals; ++k) {
    const double t = t_j + sample_truncated_exponential(rng, eta, lo, hi);
    if (rng.uniform() * bound < activity_eval(p.harmonic, t)) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

double draw_gamma(Rng& rng, double shape, double rate) {
  return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

// Prior draw of nu for a newly generated point of class `cls`.
double prior_nu(Rng& rng, const ModelParams& p, int cls) {
  const double mu = p.mu[cls];
  if (!p.psi[cls] || mu == 0.0) return mu;
  return draw_gamma(rng, *p.psi[cls], *p.psi[cls] / mu);
}

}  // namespace

std::vector<double> sample_observed_nu(Rng& rng, const ModelParams& p, const Cluster& observed, double a) {
  Cluster seen = observed;
  seen.window_end = a;
  std::vector<double> nu(seen.size());
  for (std::size_t j = 0; j < seen.size(); ++j) {
    const int cls = j == 0 ? 0 : 1;
    if (p.psi[cls] && p.mu[cls] > 0.0) {
      const NuPosterior post = nu_posterior(p, seen, j);
      nu[j] = draw_gamma(rng, post.shape, post.rate);
    } else {
      nu[j] = p.mu[cls];
    }
  }
  return nu;
}

Propagation propagate_cluster(Rng& rng, const ModelParams& p, const Cluster& observed, double a, double b,
                              std::size_t max_points) {
  validate(p);
  {
    Cluster structure = observed;
    structure.window_end = observed.times.back() + 1.0;
    validate(structure);
  }
  if (max_points == 0) throw std::invalid_argument("max_points must be at least 1");
  if (!(b >= a)) throw std::invalid_argument("propagation needs b >= a");
  if (observed.times.back() > a) throw std::invalid_argument("observed points must not exceed a");

  std::vector<double> times = observed.times;
  std::vector<std::size_t> parents = observed.parents;
  std::vector<double> nu = sample_observed_nu(rng, p, observed, a);
  const std::size_t n_observed = times.size();

  bool truncated = n_observed > max_points;
  for (std::size_t j = 0; j < times.size() && !truncated; ++j) {
    const double start = j < n_observed ? a : times[j];
    const auto children = simulate_offspring(rng, p, times[j], j == 0, nu[j], start, b);
    for (double t : children) {
      if (times.size() >= max_points) {
        truncated = true;
        break;
      }
      times.push_back(t);
      parents.push_back(j + 1);
      nu.push_back(prior_nu(rng, p, 1));
    }
  }

  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return times[x] < times[y]; });
  std::vector<std::size_t> rank(times.size());
  for (std::size_t k = 0; k < order.size(); ++k) rank[order[k]] = k;

  Propagation out;
  out.truncated = truncated;
  out.cluster.window_end = b;
  out.cluster.times.resize(times.size());
  out.cluster.parents.resize(times.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t src = order[k];
    out.cluster.times[k] = times[src];
    out.cluster.parents[k] = parents[src] == 0 ? 0 : rank[parents[src] - 1] + 1;
  }
  return out;
}

TruncationError::TruncationError(ClusterSet partial, std::vector<std::size_t> truncated)
    : std::runtime_error(std::to_string(truncated.size()) + " simulated cluster(s) reached the point cap"),
      partial_(std::move(partial)),
      truncated_(std::move(truncated)) {}

SimulationResult simulate_dataset_unchecked(const ModelParams& p, const std::vector<double>& seeds,
                                            const SimConfig& config) {
  if (seeds.empty()) throw std::invalid_argument("simulate_dataset needs at least one seed");
  if (!(config.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  validate(p);
  std::vector<Propagation> runs(seeds.size());
  parallel_for(
      seeds.size(),
      [&](std::size_t i) {
        Rng rng = Rng::derive(config.master_seed, {i});
        const Cluster root{{seeds[i]}, {0}, seeds[i]};
        runs[i] = propagate_cluster(rng, p, root, seeds[i], seeds[i] + config.horizon, config.max_points);
      },
      config.threads);
  SimulationResult out;
  out.set.clusters.reserve(runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (runs[i].truncated) out.truncated.push_back(i);
    out.set.clusters.push_back(std::move(runs[i].cluster));
  }
  return out;
}

ClusterSet simulate_dataset(const ModelParams& p, const std::vector<double>& seeds, const SimConfig& config) {
  auto result = simulate_dataset_unchecked(p, seeds, config);
  if (!result.truncated.empty()) throw TruncationError(std::move(result.set), std::move(result.truncated));
  return std::move(result.set);
}

}  // namespace dhawkes
