#include "dhawkes/immigrant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "dhawkes/io.hpp"

namespace dhawkes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_arrivals(std::span<const double> arrivals, double a0) {
  if (!(a0 > 0.0) || !std::isfinite(a0)) throw std::invalid_argument("observation end a0 must be positive");
  for (double t : arrivals)
    if (!(t >= 0.0 && t < a0)) throw std::invalid_argument("arrivals must lie in [0, a0)");
}

}  // namespace

void validate(const ImmigrantParams& p) {
  validate(p.harmonic);
  if (!(p.rate > 0.0) || !std::isfinite(p.rate)) throw std::invalid_argument("arrival rate must be positive");
}

double immigrant_intensity(const ImmigrantParams& p, double t) { return p.rate * activity_eval(p.harmonic, t); }

double immigrant_loglik(const ImmigrantParams& p, std::span<const double> arrivals, double a0) {
  validate(p);
  check_arrivals(arrivals, a0);
  double ll = 0.0;
  for (double t : arrivals) {
    const double g = immigrant_intensity(p, t);
    if (!(g > 0.0)) return kNegInf;
    ll += std::log(g);
  }
  const auto S = immigrant_integral(p.harmonic, a0);
  double compensator = 0.0;
  for (std::size_t k = 0; k < S.size(); ++k) compensator += p.harmonic.coefficients[k] * S[k];
  return ll - p.rate * compensator;
}

std::vector<double> simulate_arrivals(Rng& rng, const ImmigrantParams& p, double a0) {
  validate(p);
  if (!(a0 > 0.0) || !std::isfinite(a0)) throw std::invalid_argument("observation end a0 must be positive");
  const double bound = activity_upper_bound(p.harmonic);
  const auto n = std::poisson_distribution<long long>(p.rate * bound * a0)(rng);
  std::vector<double> out;
  for (long long i = 0; i < n; ++i) {
    const double t = a0 * rng.uniform();
    if (rng.uniform() * bound < activity_eval(p.harmonic, t)) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ImmigrantParams ImmigrantPosterior::params(std::size_t chain, std::size_t iteration) const {
  ImmigrantParams p{draws.at(chain, iteration, 0), HarmonicSpec::with_cycles(cycles, period)};
  for (std::size_t k = 1; k < draws.dim; ++k) p.harmonic.coefficients[k] = draws.at(chain, iteration, k);
  return p;
}

ImmigrantPosterior fit_immigrants(std::span<const double> arrivals, double a0, std::vector<int> cycles,
                                  double period, const SamplerConfig& config, std::optional<double> sigma_alpha) {
  if (arrivals.empty()) throw std::invalid_argument("fit_immigrants needs at least one arrival");
  check_arrivals(arrivals, a0);
  const HarmonicSpec spec = HarmonicSpec::with_cycles(cycles, period);
  validate(spec);
  const std::size_t K = spec.harmonics();
  const double sd = sigma_alpha ? *sigma_alpha : (K ? 1.0 / std::sqrt(2.0 * static_cast<double>(K)) : 1.0);
  if (!(sd > 0.0)) throw std::invalid_argument("sigma_alpha must be positive");
  const std::size_t dim = 1 + 2 * K;

  // Basis at each arrival and the integrated basis, computed once.
  std::vector<double> basis(arrivals.size() * (2 * K + 1));
  for (std::size_t i = 0; i < arrivals.size(); ++i)
    basis_eval(spec, arrivals[i], std::span<double>(basis.data() + i * (2 * K + 1), 2 * K + 1));
  const auto S = immigrant_integral(spec, a0);
  const double n = static_cast<double>(arrivals.size());

  const LogDensityFn density = [&, K, sd, n](std::span<const double> v, std::span<double> grad) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (double x : v)
      if (!std::isfinite(x)) return kNegInf;
    const double rate = std::exp(v[0]);
    // alpha' S with alpha_0 = 1
    double aS = S[0];
    for (std::size_t k = 1; k <= 2 * K; ++k) aS += v[k] * S[k];
    double value = n * v[0] - rate * aS;
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
      const double* s = basis.data() + i * (2 * K + 1);
      double a = 1.0;
      for (std::size_t k = 1; k <= 2 * K; ++k) a += v[k] * s[k];
      if (!(a > 0.0)) return kNegInf;
      value += std::log(a);
      if (!grad.empty())
        for (std::size_t k = 1; k <= 2 * K; ++k) grad[k] += s[k] / a;
    }
    for (std::size_t k = 1; k <= 2 * K; ++k) value -= 0.5 * v[k] * v[k] / (sd * sd);
    if (!grad.empty()) {
      grad[0] = n - rate * aS;
      for (std::size_t k = 1; k <= 2 * K; ++k) grad[k] += -rate * S[k] - v[k] / (sd * sd);
    }
    return value;
  };
  const InitFn init = [&](Rng& rng) {
    std::normal_distribution<double> jitter(0.0, 0.1);
    for (int attempt = 0; attempt < 1000; ++attempt) {
      std::vector<double> v(dim);
      v[0] = std::log(n / a0) + jitter(rng);
      for (std::size_t k = 1; k < dim; ++k) v[k] = sd * jitter(rng);
      if (std::isfinite(density(v, {}))) return v;
    }
    throw std::runtime_error("no initial point with finite density in 1000 attempts");
  };
  SamplerResult run = run_nuts(density, init, dim, config);

  ImmigrantPosterior out;
  out.cycles = std::move(cycles);
  out.period = period;
  out.names.push_back("lambda0");
  for (std::size_t k = 1; k <= 2 * K; ++k) out.names.push_back("alpha" + std::to_string(k));
  out.draws = std::move(run.draws);
  for (std::size_t i = 0; i < out.draws.values.size(); i += dim) out.draws.values[i] = std::exp(out.draws.values[i]);
  out.chain_stats = std::move(run.stats);
  if (out.draws.chains >= 2 && out.draws.iterations >= 4) {
    out.diagnostics = convergence(out.draws);
    for (std::size_t d = 0; d < dim; ++d) {
      if (!(out.diagnostics[d].rhat <= 1.01)) out.warnings.push_back(out.names[d] + ": R-hat above 1.01");
      if (!(out.diagnostics[d].ess >= 100.0)) out.warnings.push_back(out.names[d] + ": bulk ESS below 100");
    }
  }
  std::size_t divergent = 0;
  for (const auto& st : out.chain_stats) divergent += st.divergences;
  if (divergent > 0) out.warnings.push_back(std::to_string(divergent) + " divergent transitions after warmup");
  return out;
}

void write_immigrant_csv(std::ostream& out, const ImmigrantPosterior& s) {
  out << "chain,iter";
  for (const auto& n : s.names) out << ',' << n;
  out << '\n';
  for (std::size_t c = 0; c < s.draws.chains; ++c)
    for (std::size_t i = 0; i < s.draws.iterations; ++i) {
      out << c + 1 << ',' << i + 1;
      for (double v : s.draws.draw(c, i)) out << ',' << format_double(v);
      out << '\n';
    }
}

}  // namespace dhawkes
