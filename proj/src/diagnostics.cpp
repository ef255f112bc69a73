#include "dhawkes/diagnostics.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dhawkes {

namespace {

using Chains = std::vector<std::vector<double>>;

void check_shape(const std::vector<double>& values, std::size_t chains) {
  if (chains < 2) throw std::invalid_argument("diagnostics need at least 2 chains");
  if (values.size() % chains != 0) throw std::invalid_argument("values are not a whole number of chains");
  if (values.size() / chains < 4) throw std::invalid_argument("diagnostics need at least 4 draws per chain");
}

Chains split_chains(const std::vector<double>& values, std::size_t chains) {
  const std::size_t n = values.size() / chains;
  const std::size_t half = n / 2;
  Chains out;
  for (std::size_t c = 0; c < chains; ++c) {
    const auto base = values.begin() + static_cast<std::ptrdiff_t>(c * n);
    out.emplace_back(base, base + static_cast<std::ptrdiff_t>(half));
    out.emplace_back(base + static_cast<std::ptrdiff_t>(n - half), base + static_cast<std::ptrdiff_t>(n));
  }
  return out;
}

Chains whole_chains(const std::vector<double>& values, std::size_t chains) {
  const std::size_t n = values.size() / chains;
  Chains out;
  for (std::size_t c = 0; c < chains; ++c)
    out.emplace_back(values.begin() + static_cast<std::ptrdiff_t>(c * n),
                     values.begin() + static_cast<std::ptrdiff_t>((c + 1) * n));
  return out;
}

// Normal scores of pooled average ranks (Blom offsets).
Chains rank_normalize(const Chains& chains) {
  std::vector<std::pair<double, std::size_t>> pooled;
  for (const auto& ch : chains)
    for (double v : ch) pooled.emplace_back(v, pooled.size());
  std::sort(pooled.begin(), pooled.end());
  const double S = static_cast<double>(pooled.size());
  std::vector<double> z(pooled.size());
  const boost::math::normal_distribution<double> normal;
  for (std::size_t i = 0; i < pooled.size();) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);  // average of ranks i+1..j
    const double score = boost::math::quantile(normal, (rank - 0.375) / (S + 0.25));
    for (std::size_t k = i; k < j; ++k) z[pooled[k].second] = score;
    i = j;
  }
  Chains out = chains;
  std::size_t idx = 0;
  for (auto& ch : out)
    for (double& v : ch) v = z[idx++];
  return out;
}

double mean_of(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size()); }

double basic_rhat(const Chains& chains) {
  const double n = static_cast<double>(chains.front().size());
  std::vector<double> means, vars;
  for (const auto& ch : chains) {
    const double m = mean_of(ch);
    double ss = 0.0;
    for (double v : ch) ss += (v - m) * (v - m);
    means.push_back(m);
    vars.push_back(ss / (n - 1.0));
  }
  const double W = mean_of(vars);
  const double mm = mean_of(means);
  double B = 0.0;
  for (double m : means) B += (m - mm) * (m - mm);
  B /= static_cast<double>(means.size() - 1);  // this is B / n
  if (W == 0.0) return B == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(((n - 1.0) / n * W + B) / W);
}

double ess_of(const Chains& chains) {
  const std::size_t m = chains.size();
  const std::size_t n = chains.front().size();
  const double nd = static_cast<double>(n);
  std::vector<double> means(m), chain_var(m);
  for (std::size_t c = 0; c < m; ++c) means[c] = mean_of(chains[c]);
  // Mean over chains of the biased autocovariance at `lag`.
  auto acov = [&](std::size_t lag) {
    double total = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i + lag < n; ++i) s += (chains[c][i] - means[c]) * (chains[c][i + lag] - means[c]);
      total += s / nd;
    }
    return total / static_cast<double>(m);
  };
  double mean_var = 0.0;
  for (std::size_t c = 0; c < m; ++c) {
    double s = 0.0;
    for (double v : chains[c]) s += (v - means[c]) * (v - means[c]);
    mean_var += s / (nd - 1.0);
  }
  mean_var /= static_cast<double>(m);
  double var_plus = mean_var * (nd - 1.0) / nd;
  if (m > 1) {
    const double mm = mean_of(means);
    double b = 0.0;
    for (double v : means) b += (v - mm) * (v - mm);
    var_plus += b / static_cast<double>(m - 1);
  }
  if (!(var_plus > 0.0)) return std::numeric_limits<double>::quiet_NaN();

  std::vector<double> rho(n, 0.0);
  std::size_t t = 0;
  double rho_even = 1.0;
  rho[0] = rho_even;
  double rho_odd = 1.0 - (mean_var - acov(1)) / var_plus;
  rho[1] = rho_odd;
  while (t + 5 < n && !std::isnan(rho_even + rho_odd) && rho_even + rho_odd > 0.0) {
    t += 2;
    rho_even = 1.0 - (mean_var - acov(t)) / var_plus;
    rho_odd = 1.0 - (mean_var - acov(t + 1)) / var_plus;
    if (rho_even + rho_odd >= 0.0) {
      rho[t] = rho_even;
      rho[t + 1] = rho_odd;
    }
  }
  const std::size_t max_t = t;
  if (rho_even > 0.0) rho[max_t] = rho_even;
  // Geyer's initial monotone sequence.
  for (t = 0; t + 4 <= max_t;) {
    t += 2;
    if (rho[t] + rho[t + 1] > rho[t - 2] + rho[t - 1]) {
      rho[t] = 0.5 * (rho[t - 2] + rho[t - 1]);
      rho[t + 1] = rho[t];
    }
  }
  const double total = static_cast<double>(m) * nd;
  double tau = -1.0 + rho[max_t];
  for (std::size_t i = 0; i < max_t; ++i) tau += 2.0 * rho[i];
  tau = std::max(tau, 1.0 / std::log10(total));
  return total / tau;
}

std::vector<double> folded(const std::vector<double>& values) {
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = std::abs(values[i] - median);
  return out;
}

bool is_constant(const std::vector<double>& values) {
  return std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
}

}  // namespace

double split_rhat(const std::vector<double>& values, std::size_t chains) {
  check_shape(values, chains);
  if (is_constant(values)) return 1.0;
  const double bulk = basic_rhat(rank_normalize(split_chains(values, chains)));
  const double tail = basic_rhat(rank_normalize(split_chains(folded(values), chains)));
  return std::max(bulk, tail);
}

double bulk_ess(const std::vector<double>& values, std::size_t chains) {
  check_shape(values, chains);
  if (is_constant(values)) return std::numeric_limits<double>::quiet_NaN();
  return ess_of(rank_normalize(split_chains(values, chains)));
}

double raw_ess(const std::vector<double>& values, std::size_t chains) {
  if (chains == 0 || values.size() % chains != 0 || values.size() / chains < 4)
    throw std::invalid_argument("raw_ess needs whole chains of at least 4 draws");
  if (is_constant(values)) return std::numeric_limits<double>::quiet_NaN();
  return ess_of(whole_chains(values, chains));
}

Convergence convergence(const std::vector<double>& values, std::size_t chains) {
  Convergence out;
  out.degenerate = (check_shape(values, chains), is_constant(values));
  out.rhat = split_rhat(values, chains);
  out.ess = bulk_ess(values, chains);
  return out;
}

std::vector<Convergence> convergence(const Draws& draws) {
  std::vector<Convergence> out;
  for (std::size_t d = 0; d < draws.dim; ++d) out.push_back(convergence(draws.column(d), draws.chains));
  return out;
}

}  // namespace dhawkes
