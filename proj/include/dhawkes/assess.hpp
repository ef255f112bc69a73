#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dhawkes/infer.hpp"
#include "dhawkes/tree_data.hpp"

namespace dhawkes {

struct ScoreReport {
  std::string metric;
  std::vector<double> per_cluster;
  double aggregate = 0.0;
  double standard_error = 0.0;
  std::vector<std::size_t> flagged;  // clusters with degenerate scores
};

/// Cluster-wise log predictive density from R draws spread evenly over the
/// pooled chains; aggregate is the sum over clusters. A cluster whose
/// likelihood is zero under every draw is flagged and scores -inf.
ScoreReport lpd(const PosteriorSamples& samples, const ClusterSet& test, std::size_t R, std::size_t threads = 0);

struct Difference {
  double value = 0.0;
  double standard_error = 0.0;
};

/// Paired difference a - b of summed scores; SE = sqrt(S' var(per-cluster differences)).
Difference delta_lpd(const ScoreReport& a, const ScoreReport& b);

/// The part of a cluster observed on [t_1, t_1 + s). The immigrant is always kept.
Cluster observed_prefix(const Cluster& c, double s);

struct SizePrediction {
  std::vector<std::int64_t> sizes;  // sorted ascending
  std::size_t truncated = 0;        // runs that hit max_points
};

/// Final sizes at t_1 + horizon for R posterior draws, each propagating the
/// prefix observed up to t_1 + s on the stream derived from (seed, key, r).
SizePrediction predict_sizes(const PosteriorSamples& samples, const Cluster& cluster, double s, double horizon,
                             std::size_t R, std::uint64_t seed, std::uint64_t key = 0,
                             std::size_t max_points = 100000);

/// predict_sizes for every cluster of a set (key = cluster index).
std::vector<SizePrediction> predict_set(const PosteriorSamples& samples, const ClusterSet& set, double s,
                                        double horizon, std::size_t R, std::uint64_t seed, std::size_t threads = 0,
                                        std::size_t max_points = 100000);

/// Unbiased CRPS estimate for an integer-valued predictive sample sorted
/// ascending: mean|x - n| + phi0 - 2 phi1. Computed exactly in integers and
/// divided once.
double crps_hat(std::span<const std::int64_t> sorted_predictions, std::int64_t truth);

/// Per-cluster CRPS; aggregate is the mean.
ScoreReport crps(const std::vector<SizePrediction>& predictions, std::span<const std::int64_t> truths);

/// 1 - crps_model / crps_0 where crps_0 scores the training size distribution
/// as the predictive sample for every test cluster.
double crpss(const ScoreReport& model, std::span<const std::int64_t> train_sizes,
             std::span<const std::int64_t> truths);

std::vector<std::int64_t> cluster_sizes(const ClusterSet& set);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_statistic(std::span<const double> x, std::span<const double> y);

/// KS distance between train[idx] and sim[idx] for one shared index set.
std::map<std::string, double> ks_on_indices(std::span<const double> train,
                                            const std::map<std::string, std::vector<double>>& sims,
                                            std::span<const std::size_t> indices);

/// B resamples of immigrant indices with replacement, shared by every model.
std::map<std::string, std::vector<double>> bootstrap_ks(std::span<const double> train,
                                                        const std::map<std::string, std::vector<double>>& sims,
                                                        std::size_t B, std::uint64_t seed);

constexpr double kNoDispersion = std::numeric_limits<double>::infinity();

/// Expected share of offspring produced by the most infectious fraction
/// alpha_q of points when nu ~ Gamma(psi, psi/mu). psi = infinity gives alpha_q.
double transmission_proportion(double mu, double psi, double alpha_q);

/// Probability that a point with exposure c has no offspring: (psi/(psi + mu c))^psi.
double zero_reply_fraction(double mu, double psi, double exposure);

struct HourBin {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t count = 0;
};

/// Clusters grouped by the clock hour of the immigrant (time mod period).
std::vector<HourBin> mean_size_by_hour(const ClusterSet& set, double period = 24.0);

struct SpectrumPoint {
  double frequency = 0.0;  // cycles per day
  double power = 0.0;
};

/// Periodogram |X_k|^2 / N of a mean-removed hourly series, k = 1..N/2.
std::vector<SpectrumPoint> periodogram(std::span<const double> hourly_counts);

}  // namespace dhawkes
