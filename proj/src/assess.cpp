#include "dhawkes/assess.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <mutex>
#include <random>
#include <stdexcept>

#include "dhawkes/likelihood.hpp"
#include "dhawkes/parallel.hpp"
#include "dhawkes/simulate.hpp"

namespace dhawkes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double sample_variance(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

}  // namespace

ScoreReport lpd(const PosteriorSamples& samples, const ClusterSet& test, std::size_t R, std::size_t threads) {
  if (test.empty()) throw std::invalid_argument("lpd needs test clusters");
  const auto picks = samples.thinned(R);
  const PreparedDataset data(test, samples.layout.harmonic());
  const std::size_t S = test.size();
  std::vector<std::vector<double>> ll(R);
  parallel_for(
      R,
      [&](std::size_t r) { ll[r] = data.cluster_logliks(samples.params(picks[r].first, picks[r].second), 1); },
      threads);

  ScoreReport out;
  out.metric = "lpd";
  out.per_cluster.resize(S);
  for (std::size_t i = 0; i < S; ++i) {
    double m = kNegInf;
    for (std::size_t r = 0; r < R; ++r) m = std::max(m, ll[r][i]);
    if (m == kNegInf) {
      out.per_cluster[i] = kNegInf;
      out.flagged.push_back(i);
      continue;
    }
    double s = 0.0;
    for (std::size_t r = 0; r < R; ++r) s += std::exp(ll[r][i] - m);
    out.per_cluster[i] = m + std::log(s / static_cast<double>(R));
  }
  out.aggregate = pairwise_sum(out.per_cluster);
  out.standard_error = out.flagged.empty() ? std::sqrt(static_cast<double>(S) * sample_variance(out.per_cluster))
                                           : std::numeric_limits<double>::infinity();
  return out;
}

Difference delta_lpd(const ScoreReport& a, const ScoreReport& b) {
  if (a.per_cluster.size() != b.per_cluster.size() || a.metric != b.metric)
    throw std::invalid_argument("score reports cover different cluster sets");
  std::vector<double> d(a.per_cluster.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.per_cluster[i] - b.per_cluster[i];
  return {pairwise_sum(d), std::sqrt(static_cast<double>(d.size()) * sample_variance(d))};
}

Cluster observed_prefix(const Cluster& c, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("learning interval must be nonnegative");
  const double end = c.immigrant_time() + s;
  Cluster out;
  out.window_end = end;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k > 0 && !(c.times[k] < end)) break;
    out.times.push_back(c.times[k]);
    out.parents.push_back(c.parents[k]);
  }
  return out;
}

SizePrediction predict_sizes(const PosteriorSamples& samples, const Cluster& cluster, double s, double horizon,
                             std::size_t R, std::uint64_t seed, std::uint64_t key, std::size_t max_points) {
  if (!(horizon > s)) throw std::invalid_argument("horizon must exceed the learning interval");
  const auto picks = samples.thinned(R);
  const Cluster prefix = observed_prefix(cluster, s);
  const double t1 = cluster.immigrant_time();
  SizePrediction out;
  out.sizes.resize(R);
  for (std::size_t r = 0; r < R; ++r) {
    Rng rng = Rng::derive(seed, {key, r});
    const auto run = propagate_cluster(rng, samples.params(picks[r].first, picks[r].second), prefix, t1 + s,
                                       t1 + horizon, max_points);
    out.sizes[r] = static_cast<std::int64_t>(run.cluster.size());
    if (run.truncated) ++out.truncated;
  }
  std::sort(out.sizes.begin(), out.sizes.end());
  return out;
}

std::vector<SizePrediction> predict_set(const PosteriorSamples& samples, const ClusterSet& set, double s,
                                        double horizon, std::size_t R, std::uint64_t seed, std::size_t threads,
                                        std::size_t max_points) {
  std::vector<SizePrediction> out(set.size());
  parallel_for(
      set.size(),
      [&](std::size_t i) { out[i] = predict_sizes(samples, set.clusters[i], s, horizon, R, seed, i, max_points); },
      threads);
  return out;
}

double crps_hat(std::span<const std::int64_t> x, std::int64_t truth) {
  const std::size_t R = x.size();
  if (R < 2) throw std::invalid_argument("crps_hat needs at least two predictions");
  if (!std::is_sorted(x.begin(), x.end())) throw std::invalid_argument("predictions must be sorted ascending");
  // R(R-1) crps = (R-1) sum|x - n| + (R-1) sum x - 2 sum (r-1) x_(r)
  const auto n = static_cast<std::int64_t>(R);
  std::int64_t abs_err = 0, total = 0, weighted = 0;
  for (std::size_t r = 0; r < R; ++r) {
    abs_err += x[r] > truth ? x[r] - truth : truth - x[r];
    total += x[r];
    weighted += static_cast<std::int64_t>(r) * x[r];
  }
  const std::int64_t numerator = (n - 1) * (abs_err + total) - 2 * weighted;
  return static_cast<double>(numerator) / static_cast<double>(n * (n - 1));
}

ScoreReport crps(const std::vector<SizePrediction>& predictions, std::span<const std::int64_t> truths) {
  if (predictions.size() != truths.size()) throw std::invalid_argument("one truth per prediction is required");
  if (predictions.empty()) throw std::invalid_argument("crps needs at least one cluster");
  ScoreReport out;
  out.metric = "crps";
  for (std::size_t i = 0; i < truths.size(); ++i) {
    out.per_cluster.push_back(crps_hat(predictions[i].sizes, truths[i]));
    if (predictions[i].truncated * 100 > predictions[i].sizes.size()) out.flagged.push_back(i);
  }
  const double S = static_cast<double>(truths.size());
  out.aggregate = pairwise_sum(out.per_cluster) / S;
  out.standard_error = std::sqrt(sample_variance(out.per_cluster) / S);
  return out;
}

double crpss(const ScoreReport& model, std::span<const std::int64_t> train_sizes,
             std::span<const std::int64_t> truths) {
  if (train_sizes.empty()) throw std::invalid_argument("baseline needs training sizes");
  if (model.per_cluster.size() != truths.size()) throw std::invalid_argument("one truth per scored cluster is required");
  std::vector<std::int64_t> baseline(train_sizes.begin(), train_sizes.end());
  std::sort(baseline.begin(), baseline.end());
  std::vector<double> base(truths.size());
  for (std::size_t i = 0; i < truths.size(); ++i) base[i] = crps_hat(baseline, truths[i]);
  const double crps0 = pairwise_sum(base) / static_cast<double>(base.size());
  if (crps0 == 0.0) throw std::domain_error("baseline CRPS is zero; skill is undefined");
  const double crps_model = pairwise_sum(model.per_cluster) / static_cast<double>(model.per_cluster.size());
  return 1.0 - crps_model / crps0;
}

std::vector<std::int64_t> cluster_sizes(const ClusterSet& set) {
  std::vector<std::int64_t> out;
  for (const auto& c : set.clusters) out.push_back(static_cast<std::int64_t>(c.size()));
  return out;
}

double ks_statistic(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("ks_statistic needs two nonempty samples");
  std::vector<double> a(x.begin(), x.end()), b(y.begin(), y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

std::map<std::string, double> ks_on_indices(std::span<const double> train,
                                            const std::map<std::string, std::vector<double>>& sims,
                                            std::span<const std::size_t> indices) {
  std::vector<double> t;
  for (std::size_t i : indices) t.push_back(train[i]);
  std::map<std::string, double> out;
  for (const auto& [name, sim] : sims) {
    std::vector<double> s;
    for (std::size_t i : indices) s.push_back(sim[i]);
    out[name] = ks_statistic(t, s);
  }
  return out;
}

std::map<std::string, std::vector<double>> bootstrap_ks(std::span<const double> train,
                                                        const std::map<std::string, std::vector<double>>& sims,
                                                        std::size_t B, std::uint64_t seed) {
  if (train.empty()) throw std::invalid_argument("bootstrap_ks needs training sizes");
  for (const auto& [name, sim] : sims)
    if (sim.size() != train.size()) throw std::invalid_argument("simulated sizes for '" + name + "' are misaligned");
  std::map<std::string, std::vector<double>> out;
  Rng rng = Rng::derive(seed, {0xb005});
  std::uniform_int_distribution<std::size_t> pick(0, train.size() - 1);
  std::vector<std::size_t> idx(train.size());
  for (std::size_t b = 0; b < B; ++b) {
    for (auto& i : idx) i = pick(rng);
    for (const auto& [name, v] : ks_on_indices(train, sims, idx)) out[name].push_back(v);
  }
  return out;
}

double transmission_proportion(double mu, double psi, double alpha_q) {
  if (!(alpha_q > 0.0 && alpha_q < 1.0)) throw std::invalid_argument("alpha_q must lie in (0, 1)");
  if (!(mu > 0.0) || !(psi > 0.0)) throw std::invalid_argument("mu and psi must be positive");
  if (std::isinf(psi)) return alpha_q;
  // Threshold x with P(nu > x) = alpha_q on the scale nu psi / mu, then the
  // share of E[nu] carried above it: P(Gamma(psi + 1) > x).
  const double x = boost::math::gamma_q_inv(psi, alpha_q);
  return boost::math::gamma_q(psi + 1.0, x);
}

double zero_reply_fraction(double mu, double psi, double exposure) {
  if (!(mu >= 0.0) || !(psi > 0.0) || !(exposure >= 0.0))
    throw std::invalid_argument("zero_reply_fraction needs mu >= 0, psi > 0, exposure >= 0");
  if (mu == 0.0) return 1.0;
  if (std::isinf(psi)) return std::exp(-mu * exposure);
  return std::exp(-psi * std::log1p(mu * exposure / psi));
}

std::vector<HourBin> mean_size_by_hour(const ClusterSet& set, double period) {
  if (set.empty()) throw std::invalid_argument("mean_size_by_hour needs clusters");
  const auto bins = static_cast<std::size_t>(std::llround(period));
  std::vector<std::vector<double>> sizes(bins);
  for (const auto& c : set.clusters) {
    double h = std::fmod(c.immigrant_time(), period);
    if (h < 0.0) h += period;
    const auto b = std::min(bins - 1, static_cast<std::size_t>(std::floor(h)));
    sizes[b].push_back(static_cast<double>(c.size()));
  }
  std::vector<HourBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const auto& v = sizes[b];
    out[b].count = v.size();
    if (v.empty()) continue;
    double m = 0.0;
    for (double x : v) m += x;
    out[b].mean = m / static_cast<double>(v.size());
    out[b].standard_error = std::sqrt(sample_variance(v) / static_cast<double>(v.size()));
  }
  return out;
}

std::vector<SpectrumPoint> periodogram(std::span<const double> counts) {
  const std::size_t N = counts.size();
  if (N < 48) throw std::invalid_argument("periodogram needs at least 48 hourly counts");
  double mean = 0.0;
  for (double c : counts) mean += c;
  mean /= static_cast<double>(N);
  // FFTW planning is not thread-safe.
  static std::mutex planner;
  double* in = fftw_alloc_real(N);
  fftw_complex* spec = fftw_alloc_complex(N / 2 + 1);
  fftw_plan plan = nullptr;
  {
    std::lock_guard lock(planner);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(N), in, spec, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < N; ++i) in[i] = counts[i] - mean;
  fftw_execute(plan);
  std::vector<SpectrumPoint> out;
  for (std::size_t k = 1; k <= N / 2; ++k) {
    const double re = spec[k][0], im = spec[k][1];
    out.push_back({24.0 * static_cast<double>(k) / static_cast<double>(N), (re * re + im * im) / static_cast<double>(N)});
  }
  {
    std::lock_guard lock(planner);
    fftw_destroy_plan(plan);
  }
  fftw_free(spec);
  fftw_free(in);
  return out;
}

}  // namespace dhawkes
