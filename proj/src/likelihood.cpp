#include "dhawkes/likelihood.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dhawkes/parallel.hpp"

namespace dhawkes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kBlock = 64;
// Below this offspring count the Gamma-function ratios are summed term by term.
constexpr std::size_t kDirectSum = 64;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

int point_class(std::size_t j) { return j == 0 ? 0 : 1; }

double log_gamma_density(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

struct OffspringFactor {
  double value = 0.0;
  double d_exposure = 0.0;
  double d_mu = 0.0;
  double d_psi = 0.0;
};

// Log of the offspring-count factor of one point given its exposure c:
// negative binomial when psi is present, Poisson otherwise.
OffspringFactor offspring_factor(std::size_t z, double c, double mu, const std::optional<double>& psi,
                                 bool want_gradient) {
  OffspringFactor f;
  const double zd = static_cast<double>(z);
  if (z > 0 && mu == 0.0) {
    f.value = kNegInf;
    return f;
  }
  const double z_log_mu = z > 0 ? zd * std::log(mu) : 0.0;
  if (!psi) {
    f.value = z_log_mu - mu * c;
    if (want_gradient) {
      f.d_exposure = -mu;
      f.d_mu = (z > 0 ? zd / mu : 0.0) - c;
    }
    return f;
  }
  const double k = *psi;
  const double denom = k + mu * c;
  if (!(denom > 0.0)) {
    f.value = kNegInf;
    return f;
  }
  // log Gamma(k + z) - log Gamma(k) - z log(k + mu c)
  double ratio = 0.0;
  double digamma_diff = 0.0;
  if (z < kDirectSum) {
    for (std::size_t i = 0; i < z; ++i) {
      ratio += std::log1p((static_cast<double>(i) - mu * c) / denom);
      if (want_gradient) digamma_diff += 1.0 / (k + static_cast<double>(i));
    }
  } else {
    ratio = std::lgamma(k + zd) - std::lgamma(k) - zd * std::log(denom);
    if (want_gradient) digamma_diff = boost::math::digamma(k + zd) - boost::math::digamma(k);
  }
  const double shrink = std::log1p(mu * c / k);
  f.value = ratio + z_log_mu - k * shrink;
  if (want_gradient) {
    f.d_exposure = -(zd + k) * mu / denom;
    f.d_mu = (z > 0 ? zd / mu : 0.0) - (zd + k) * c / denom;
    f.d_psi = digamma_diff - zd / denom - shrink + mu * c / denom;
  }
  return f;
}

}  // namespace

double offspring_intensity(const ModelParams& p, double nu_j, double t_j, bool is_immigrant, double t) {
  if (!(t > t_j)) throw std::invalid_argument("offspring intensity is defined for t > t_j only");
  const double eta = p.eta[is_immigrant ? 0 : 1];
  return nu_j * activity_eval(p.harmonic, t) * eta * std::exp(-eta * (t - t_j));
}

double ground_intensity(const ModelParams& p, const Cluster& c, std::span<const double> nu, double t) {
  double total = 0.0;
  for (std::size_t j = 0; j < c.size() && c.times[j] < t; ++j)
    total += offspring_intensity(p, nu[j], c.times[j], j == 0, t);
  return total;
}

std::vector<double> exposures(const ModelParams& p, const Cluster& c) {
  std::vector<double> out(c.size());
  for (std::size_t j = 0; j < c.size(); ++j)
    out[j] = dot(p.harmonic.coefficients,
                 weighted_integral(p.harmonic, c.times[j], c.window_end, p.eta[point_class(j)]));
  return out;
}

double compensator(const ModelParams& p, const Cluster& c, std::span<const double> nu) {
  if (nu.size() != c.size()) throw std::invalid_argument("nu must have one entry per point");
  const auto cs = exposures(p, c);
  double total = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) total += nu[j] * cs[j];
  return total;
}

double complete_data_loglik(const ModelParams& p, const Cluster& c, std::span<const double> nu) {
  validate(p);
  validate(c);
  if (nu.size() != c.size()) throw std::invalid_argument("nu must have one entry per point");
  double value = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (!(nu[j] > 0.0)) throw std::invalid_argument("nu must be strictly positive");
    if (j > 0) {
      const std::size_t parent = c.parents[j] - 1;
      const double rate = nu[parent] * activity_eval(p.harmonic, c.times[j]);
      if (!(rate > 0.0)) return kNegInf;
      const double eta = p.eta[point_class(parent)];
      value += std::log(rate) + std::log(eta) - eta * (c.times[j] - c.times[parent]);
    }
    const auto& psi = p.psi[point_class(j)];
    if (psi) value += log_gamma_density(nu[j], *psi, *psi / p.mu[point_class(j)]);
  }
  return value - compensator(p, c, nu);
}

double cluster_loglik(const ModelParams& p, const Cluster& c) {
  validate(p);
  validate(c);
  ClusterSet single{{c}, {}};
  return PreparedDataset(single, p.harmonic).loglik(p);
}

double homogeneous_cluster_loglik(const ModelParams& p, const Cluster& c) {
  validate(p);
  validate(c);
  ClusterSet single{{c}, {}};
  return PreparedDataset(single, p.harmonic).loglik(p, nullptr, 1, true);
}

double dataset_loglik(const ModelParams& p, const ClusterSet& set, std::size_t threads) {
  if (set.empty()) throw std::invalid_argument("dataset_loglik needs at least one cluster");
  validate(p);
  return PreparedDataset(set, p.harmonic).loglik(p, nullptr, threads);
}

NuPosterior nu_posterior(const ModelParams& p, const Cluster& c, std::size_t j) {
  const int cls = point_class(j);
  if (!p.psi[cls]) throw std::invalid_argument("reproduction numbers of a Poisson class are fixed at mu");
  const auto z = offspring_counts(c);
  const double exposure =
      dot(p.harmonic.coefficients, weighted_integral(p.harmonic, c.times[j], c.window_end, p.eta[cls]));
  const double psi = *p.psi[cls];
  return NuPosterior{static_cast<double>(z[j]) + psi, exposure + psi / p.mu[cls]};
}

void LoglikGradient::reset(std::size_t harmonic_terms) {
  alpha.assign(harmonic_terms, 0.0);
  eta = {};
  mu = {};
  psi = {};
}

LoglikGradient& LoglikGradient::operator+=(const LoglikGradient& other) {
  if (alpha.size() < other.alpha.size()) alpha.resize(other.alpha.size(), 0.0);
  for (std::size_t k = 0; k < other.alpha.size(); ++k) alpha[k] += other.alpha[k];
  for (int l = 0; l < 2; ++l) {
    eta[l] += other.eta[l];
    mu[l] += other.mu[l];
    psi[l] += other.psi[l];
  }
  return *this;
}

PreparedDataset::PreparedDataset(const ClusterSet& set, const HarmonicSpec& basis) : basis_(basis) {
  const std::size_t K = basis_.harmonics();
  for (std::size_t k = 0; k < K; ++k) frequencies_.push_back(basis_.frequency(k));
  cluster_offsets_.push_back(0);
  for (const Cluster& c : set.clusters) {
    validate(c);
    const auto z = offspring_counts(c);
    for (std::size_t j = 0; j < c.size(); ++j) {
      Point pt{};
      pt.duration = c.window_end - c.times[j];
      pt.offspring = z[j];
      if (j > 0) {
        const std::size_t parent = c.parents[j] - 1;
        pt.gap = c.times[j] - c.times[parent];
        pt.parent_class = point_class(parent);
      }
      points_.push_back(pt);
      for (double w : frequencies_) {
        event_trig_.push_back(std::sin(w * c.times[j]));
        event_trig_.push_back(std::cos(w * c.times[j]));
      }
    }
    for (double w : frequencies_) {
      window_trig_.push_back(std::sin(w * c.window_end));
      window_trig_.push_back(std::cos(w * c.window_end));
    }
    cluster_offsets_.push_back(points_.size());
  }
}

double PreparedDataset::cluster_value(std::size_t cluster, const ModelParams& p, LoglikGradient* grad,
                                      bool force_homogeneous) const {
  const std::size_t K = frequencies_.size();
  const auto& alpha = p.harmonic.coefficients;
  const double* trig_a = window_trig_.data() + 2 * K * cluster;
  const std::size_t begin = cluster_offsets_[cluster];
  const std::size_t end = cluster_offsets_[cluster + 1];
  double value = 0.0;

  for (std::size_t j = begin; j < end; ++j) {
    const Point& pt = points_[j];
    const int cls = j == begin ? 0 : 1;
    const double eta = p.eta[cls];
    const double d = pt.duration;
    const double decay = std::exp(-eta * d);
    const double* trig_t = event_trig_.data() + 2 * K * j;

    double exposure = -std::expm1(-eta * d);
    double d_exposure_eta = d * decay;
    for (std::size_t k = 0; k < K; ++k) {
      const double w = frequencies_[k];
      const double st = trig_t[2 * k], ct = trig_t[2 * k + 1];
      const double sa = trig_a[2 * k], ca = trig_a[2 * k + 1];
      const double norm = eta * eta + w * w;
      const double g = eta / norm;
      const double P1 = eta * st + w * ct, Q1 = eta * sa + w * ca;
      const double P2 = eta * ct - w * st, Q2 = w * sa - eta * ca;
      const double W1 = g * (P1 - decay * Q1);
      const double W2 = g * (P2 + decay * Q2);
      exposure += alpha[2 * k + 1] * W1 + alpha[2 * k + 2] * W2;
      if (grad) {
        const double dg = (w * w - eta * eta) / (norm * norm);
        const double dW1 = dg * (P1 - decay * Q1) + g * (st - decay * sa + d * decay * Q1);
        const double dW2 = dg * (P2 + decay * Q2) + g * (ct - d * decay * Q2 - decay * ca);
        d_exposure_eta += alpha[2 * k + 1] * dW1 + alpha[2 * k + 2] * dW2;
      }
    }
    if (exposure < 0.0) return kNegInf;

    const auto& psi = force_homogeneous ? std::optional<double>{} : p.psi[cls];
    const OffspringFactor f = offspring_factor(pt.offspring, exposure, p.mu[cls], psi, grad != nullptr);
    if (f.value == kNegInf) return kNegInf;
    value += f.value;

    if (grad) {
      grad->eta[cls] += f.d_exposure * d_exposure_eta;
      grad->mu[cls] += f.d_mu;
      if (psi) grad->psi[cls] += f.d_psi;
      for (std::size_t k = 0; k < K; ++k) {
        const double w = frequencies_[k];
        const double st = trig_t[2 * k], ct = trig_t[2 * k + 1];
        const double sa = trig_a[2 * k], ca = trig_a[2 * k + 1];
        const double g = eta / (eta * eta + w * w);
        grad->alpha[2 * k] += f.d_exposure * g * (eta * st + w * ct - decay * (eta * sa + w * ca));
        grad->alpha[2 * k + 1] += f.d_exposure * g * (eta * ct - w * st + decay * (w * sa - eta * ca));
      }
    }

    if (j > begin) {
      double activity = alpha[0];
      for (std::size_t k = 0; k < K; ++k)
        activity += alpha[2 * k + 1] * trig_t[2 * k] + alpha[2 * k + 2] * trig_t[2 * k + 1];
      if (!(activity > 0.0)) return kNegInf;
      const double eta_parent = p.eta[pt.parent_class];
      value += std::log(activity) + std::log(eta_parent) - eta_parent * pt.gap;
      if (grad) {
        grad->eta[pt.parent_class] += 1.0 / eta_parent - pt.gap;
        for (std::size_t k = 0; k < 2 * K; ++k) grad->alpha[k] += trig_t[k] / activity;
      }
    }
  }
  return value;
}

double PreparedDataset::loglik(const ModelParams& p, LoglikGradient* gradient, std::size_t threads,
                               bool force_homogeneous) const {
  if (p.harmonic.cycles != basis_.cycles || p.harmonic.period != basis_.period)
    throw std::invalid_argument("parameters use a different harmonic basis than the prepared data");
  const std::size_t S = clusters();
  const std::size_t blocks = (S + kBlock - 1) / kBlock;
  std::vector<double> block_values(blocks, 0.0);
  std::vector<LoglikGradient> block_grads(gradient ? blocks : 0);
  parallel_for(
      blocks,
      [&](std::size_t b) {
        LoglikGradient* g = nullptr;
        if (gradient) {
          g = &block_grads[b];
          g->reset(2 * basis_.harmonics());
        }
        double total = 0.0;
        for (std::size_t i = b * kBlock; i < std::min(S, (b + 1) * kBlock); ++i) {
          total += cluster_value(i, p, g, force_homogeneous);
          if (total == kNegInf) break;
        }
        block_values[b] = total;
      },
      threads);
  if (gradient) {
    gradient->reset(2 * basis_.harmonics());
    for (const auto& g : block_grads) *gradient += g;
  }
  for (double v : block_values)
    if (v == kNegInf) return kNegInf;
  return pairwise_sum(block_values);
}

std::vector<double> PreparedDataset::cluster_logliks(const ModelParams& p, std::size_t threads) const {
  std::vector<double> out(clusters());
  parallel_for(out.size(), [&](std::size_t i) { out[i] = cluster_value(i, p, nullptr, false); }, threads);
  return out;
}

}  // namespace dhawkes
