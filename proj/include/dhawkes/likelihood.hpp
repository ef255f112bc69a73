#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "dhawkes/params.hpp"
#include "dhawkes/tree_data.hpp"

namespace dhawkes {

/// Gamma(shape, rate) law of a point's reproduction number given its cluster.
struct NuPosterior {
  double shape = 1.0;
  double rate = 1.0;
  double mean() const { return shape / rate; }
};

/// gamma_j(t) = nu_j * alpha(t) * eta exp(-eta (t - t_j)), with the immigrant
/// or offspring decay rate.
double offspring_intensity(const ModelParams& p, double nu_j, double t_j, bool is_immigrant, double t);

/// lambda*(t): sum of the offspring intensities of all points before t.
double ground_intensity(const ModelParams& p, const Cluster& c, std::span<const double> nu, double t);

/// c_{t_j} = alpha' W(t_j, a, eta_class): the expected offspring count per unit nu.
std::vector<double> exposures(const ModelParams& p, const Cluster& c);

/// Lambda*(a) = sum_j nu_j c_{t_j}.
double compensator(const ModelParams& p, const Cluster& c, std::span<const double> nu);

/// Log of the joint density of the event times and the latent marks nu.
/// Returns -inf if the intensity at any event is not positive.
double complete_data_loglik(const ModelParams& p, const Cluster& c, std::span<const double> nu);

/// Marginal cluster log-likelihood with nu integrated out. Classes with a
/// dispersion use negative-binomial offspring factors, the others Poisson.
double cluster_loglik(const ModelParams& p, const Cluster& c);

/// Poisson-offspring log-likelihood for both classes (dispersions ignored).
double homogeneous_cluster_loglik(const ModelParams& p, const Cluster& c);

/// Sum of cluster log-likelihoods in a fixed reduction order.
double dataset_loglik(const ModelParams& p, const ClusterSet& set, std::size_t threads = 0);

/// Posterior of nu_j (0-based point index). Throws std::invalid_argument for a
/// class without a dispersion parameter.
NuPosterior nu_posterior(const ModelParams& p, const Cluster& c, std::size_t j);

/// Gradient of the log-likelihood in the natural parameters.
struct LoglikGradient {
  std::vector<double> alpha;  // d/d coefficient k, k = 1..2K
  std::array<double, 2> eta{};
  std::array<double, 2> mu{};
  std::array<double, 2> psi{};

  void reset(std::size_t harmonic_terms);
  LoglikGradient& operator+=(const LoglikGradient& other);
};

/// Clusters preprocessed for repeated likelihood evaluation at a fixed
/// harmonic basis: trigonometric terms, offspring counts and generation
/// intervals are computed once. Evaluation cost is linear in the point count.
class PreparedDataset {
 public:
  PreparedDataset(const ClusterSet& set, const HarmonicSpec& basis);

  std::size_t clusters() const { return cluster_offsets_.size() - 1; }
  std::size_t points() const { return points_.size(); }

  /// Dataset log-likelihood; fills `gradient` when non-null. Clusters are
  /// reduced in fixed blocks so the result does not depend on `threads`.
  double loglik(const ModelParams& p, LoglikGradient* gradient = nullptr, std::size_t threads = 1,
                bool force_homogeneous = false) const;

  /// Per-cluster log-likelihoods.
  std::vector<double> cluster_logliks(const ModelParams& p, std::size_t threads = 1) const;

 private:
  struct Point {
    double duration;  // a - t_j
    double gap;       // t_j - t_parent (unused for the immigrant)
    std::size_t offspring;
    int parent_class;
  };

  double cluster_value(std::size_t cluster, const ModelParams& p, LoglikGradient* grad,
                       bool force_homogeneous) const;

  HarmonicSpec basis_;
  std::vector<double> frequencies_;
  std::vector<Point> points_;
  std::vector<double> event_trig_;   // per point: sin, cos for each harmonic
  std::vector<double> window_trig_;  // per cluster: sin, cos at the window end
  std::vector<std::size_t> cluster_offsets_;
};

}  // namespace dhawkes
