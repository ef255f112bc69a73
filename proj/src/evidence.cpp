#include "dhawkes/evidence.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "dhawkes/diagnostics.hpp"
#include "dhawkes/parallel.hpp"

namespace dhawkes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_sum(const std::vector<double>& x) {
  double m = kNegInf;
  for (double v : x) m = std::max(m, v);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

double median(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance_of(const std::vector<double>& x) {
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

class Mvn {
 public:
  explicit Mvn(const Eigen::MatrixXd& sample) : mean_(sample.colwise().mean().transpose()) {
    const Eigen::MatrixXd centered = sample.rowwise() - mean_.transpose();
    Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(sample.rows() - 1);
    cov.diagonal().array() += 1e-8;
    llt_.compute(cov);
    if (llt_.info() != Eigen::Success) throw std::runtime_error("bridge proposal covariance is not positive definite");
    L_ = llt_.matrixL();
    log_det_ = 2.0 * L_.diagonal().array().log().sum();
  }
  std::size_t dim() const { return static_cast<std::size_t>(mean_.size()); }
  Eigen::VectorXd draw(Rng& rng) const {
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(mean_.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
    return mean_ + L_ * z;
  }
  double log_density(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd z = L_.triangularView<Eigen::Lower>().solve(x - mean_);
    const double d = static_cast<double>(mean_.size());
    return -0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det_ + z.squaredNorm());
  }

 private:
  Eigen::VectorXd mean_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::MatrixXd L_;
  double log_det_ = 0.0;
};

}  // namespace

EvidenceEstimate bridge_sampling(const Draws& draws, const LogTargetFn& log_target, const BridgeConfig& config) {
  const std::size_t n = draws.iterations;
  const std::size_t half = n / 2;
  if (half < 4 || draws.chains == 0) throw std::invalid_argument("bridge sampling needs at least 8 draws per chain");
  const std::size_t d = draws.dim;
  const std::size_t n_fit = draws.chains * half;
  const std::size_t n_iter = draws.chains * (n - half);
  if (n_fit <= d) throw std::invalid_argument("too few draws to fit the bridge proposal");

  Eigen::MatrixXd fit(static_cast<Eigen::Index>(n_fit), static_cast<Eigen::Index>(d));
  std::vector<Eigen::VectorXd> post;
  Draws iter_half(draws.chains, n - half, d);
  for (std::size_t c = 0; c < draws.chains; ++c) {
    for (std::size_t i = 0; i < half; ++i)
      for (std::size_t k = 0; k < d; ++k)
        fit(static_cast<Eigen::Index>(c * half + i), static_cast<Eigen::Index>(k)) = draws.at(c, i, k);
    for (std::size_t i = half; i < n; ++i) {
      Eigen::VectorXd x(static_cast<Eigen::Index>(d));
      for (std::size_t k = 0; k < d; ++k) {
        x[static_cast<Eigen::Index>(k)] = draws.at(c, i, k);
        iter_half.at(c, i - half, k) = draws.at(c, i, k);
      }
      post.push_back(std::move(x));
    }
  }
  const Mvn proposal(fit);

  const std::size_t n_prop = config.proposal_draws ? config.proposal_draws : draws.total();
  std::vector<Eigen::VectorXd> prop(n_prop);
  {
    Rng rng = Rng::derive(config.seed, {0xb71d6e});
    for (auto& x : prop) x = proposal.draw(rng);
  }

  // q11/q12: target and proposal at posterior draws; q21/q22 at proposal draws.
  std::vector<double> q11(n_iter), q12(n_iter), q21(n_prop), q22(n_prop);
  auto target_at = [&](const Eigen::VectorXd& x) {
    const double v = log_target(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
    return std::isnan(v) ? kNegInf : v;
  };
  parallel_for(
      n_iter,
      [&](std::size_t i) {
        q11[i] = target_at(post[i]);
        q12[i] = proposal.log_density(post[i]);
      },
      config.threads);
  parallel_for(
      n_prop,
      [&](std::size_t i) {
        q21[i] = target_at(prop[i]);
        q22[i] = proposal.log_density(prop[i]);
      },
      config.threads);
  for (double v : q11)
    if (!std::isfinite(v)) throw std::runtime_error("log target is not finite at a posterior draw");

  std::vector<double> l1(n_iter), l2(n_prop);
  for (std::size_t i = 0; i < n_iter; ++i) l1[i] = q11[i] - q12[i];
  for (std::size_t i = 0; i < n_prop; ++i) l2[i] = q21[i] - q22[i];
  const double lstar = median(l1);

  // Effective size of the posterior half: median ESS over coordinates.
  std::vector<double> ess;
  for (std::size_t k = 0; k < d; ++k) {
    const double e = raw_ess(iter_half.column(k), draws.chains);
    if (std::isfinite(e)) ess.push_back(std::min(e, static_cast<double>(n_iter)));
  }
  const double n1_eff = ess.empty() ? static_cast<double>(n_iter) : median(ess);
  const double n2 = static_cast<double>(n_prop);
  const double log_s1 = std::log(n1_eff / (n1_eff + n2));
  const double log_s2 = std::log(n2 / (n1_eff + n2));

  EvidenceEstimate est;
  double log_r = 0.0;  // log of the evidence ratio relative to exp(lstar)
  std::vector<double> num(n_prop), den(n_iter);
  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    for (std::size_t i = 0; i < n_prop; ++i) {
      const double a = l2[i] - lstar;
      num[i] = a - log_add(log_s1 + a, log_s2 + log_r);
    }
    for (std::size_t i = 0; i < n_iter; ++i) {
      const double a = l1[i] - lstar;
      den[i] = -log_add(log_s1 + a, log_s2 + log_r);
    }
    const double next = (log_sum(num) - std::log(n2)) - (log_sum(den) - std::log(static_cast<double>(n_iter)));
    const double change = std::abs(next - log_r);
    log_r = next;
    est.iterations_used = it;
    if (change < config.tolerance) {
      est.converged = true;
      break;
    }
  }
  est.log_ml = log_r + lstar;

  // Approximate relative mean-squared error.
  const double N1 = static_cast<double>(n_iter);
  const double s1 = N1 / (N1 + n2), s2 = n2 / (N1 + n2);
  std::vector<double> f1(n_prop), f2(n_iter);
  for (std::size_t i = 0; i < n_prop; ++i) {
    // p/(s1 p + s2 g) with p the normalised target at a proposal draw
    const double log_g_over_p = q22[i] - (q21[i] - est.log_ml);
    f1[i] = q21[i] == kNegInf ? 0.0 : 1.0 / (s1 + s2 * std::exp(log_g_over_p));
  }
  for (std::size_t i = 0; i < n_iter; ++i) {
    const double log_p_over_g = (q11[i] - est.log_ml) - q12[i];
    f2[i] = 1.0 / (s1 * std::exp(log_p_over_g) + s2);
  }
  double iat = 1.0;
  if (const double e = raw_ess(f2, draws.chains); std::isfinite(e) && e > 0.0) iat = N1 / e;
  const double m1 = mean_of(f1), m2 = mean_of(f2);
  const double re2 = variance_of(f1) / (m1 * m1) / n2 + iat * variance_of(f2) / (m2 * m2) / N1;
  est.coefficient_of_variation = std::sqrt(re2);
  return est;
}

EvidenceEstimate bridge_logml(const PosteriorSamples& samples, const ClusterSet& set, const PriorSpec& prior,
                              const BridgeConfig& config) {
  const LogPosterior target(set, samples.layout, prior, 1);
  const LogTargetFn fn = [&target](std::span<const double> v) { return target(v, {}); };
  return bridge_sampling(samples.unconstrained(), fn, config);
}

double bayes_factor(const EvidenceEstimate& l, const EvidenceEstimate& m) {
  if (!l.converged || !m.converged) throw std::invalid_argument("Bayes factor of an unconverged evidence estimate");
  return l.log_ml - m.log_ml;
}

std::string evidence_strength(double log_bf) {
  const double x = std::abs(log_bf);
  if (x < std::log(3.0)) return "not worth more than a bare mention";
  if (x < std::log(10.0)) return "substantial";
  if (x < std::log(30.0)) return "strong";
  if (x < std::log(100.0)) return "very strong";
  return "decisive";
}

}  // namespace dhawkes
