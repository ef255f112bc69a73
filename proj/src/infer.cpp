#include "dhawkes/infer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dhawkes/io.hpp"

namespace dhawkes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_gamma_pdf(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * std::log(2.0 * std::numbers::pi) - std::log(sd) - 0.5 * z * z;
}

int rate_classes(const ModelLayout& layout) { return layout.shared_rates() ? 1 : 2; }

}  // namespace

double PriorSpec::alpha_sd(std::size_t harmonics) const {
  if (sigma_alpha) return *sigma_alpha;
  if (harmonics == 0) return 1.0;
  return 1.0 / std::sqrt(2.0 * static_cast<double>(harmonics));
}

void validate(const PriorSpec& s) {
  const double values[] = {s.eta_shape, s.eta_rate, s.mu_shape, s.mu_rate, s.log_psi_sd};
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("prior hyperparameters must be positive");
  if (s.sigma_alpha && !(*s.sigma_alpha > 0.0)) throw std::invalid_argument("sigma_alpha must be positive");
  if (!std::isfinite(s.log_psi_mean)) throw std::invalid_argument("log_psi_mean must be finite");
}

double log_prior(const ModelParams& p, const PriorSpec& spec) {
  const std::size_t K = p.harmonic.harmonics();
  const double sd = spec.alpha_sd(K);
  double lp = 0.0;
  for (std::size_t k = 1; k <= 2 * K; ++k) lp += log_normal_pdf(p.harmonic.coefficients[k], 0.0, sd);
  const int classes = p.variant == Variant::M1 ? 1 : 2;
  for (int l = 0; l < classes; ++l) {
    lp += log_gamma_pdf(p.eta[l], spec.eta_shape, spec.eta_rate);
    lp += log_gamma_pdf(p.mu[l], spec.mu_shape, spec.mu_rate);
  }
  for (int l = 0; l < 2; ++l) {
    if (!p.psi[l]) continue;
    const double u = std::log(*p.psi[l]);
    lp += log_normal_pdf(u, spec.log_psi_mean, spec.log_psi_sd) - u;
  }
  return lp;
}

std::size_t ModelLayout::dimension() const {
  std::size_t d = harmonic_terms() + 2 * static_cast<std::size_t>(rate_classes(*this));
  for (int l = 0; l < 2; ++l) d += variant_has_psi(variant, l) ? 1 : 0;
  return d;
}

std::vector<std::string> ModelLayout::names() const {
  std::vector<std::string> out;
  for (std::size_t k = 1; k <= harmonic_terms(); ++k) out.push_back("alpha" + std::to_string(k));
  for (int l = 0; l < rate_classes(*this); ++l) out.push_back("eta" + std::to_string(l + 1));
  for (int l = 0; l < rate_classes(*this); ++l) out.push_back("mu" + std::to_string(l + 1));
  for (int l = 0; l < 2; ++l)
    if (variant_has_psi(variant, l)) out.push_back("psi" + std::to_string(l + 1));
  return out;
}

HarmonicSpec ModelLayout::harmonic() const { return HarmonicSpec::with_cycles(cycles, period); }

ModelLayout make_layout(Variant variant, std::vector<int> cycles, double period) {
  if (variant == Variant::Custom) throw std::invalid_argument("inference needs one of the variants M1-M5");
  if (!variant_allows_harmonics(variant) && !cycles.empty())
    throw std::invalid_argument(std::string(to_string(variant)) + " has no circadian terms (K must be 0)");
  ModelLayout layout{variant, std::move(cycles), period};
  validate(layout.harmonic());
  return layout;
}

ModelLayout layout_of(const ModelParams& p) { return make_layout(p.variant, p.harmonic.cycles, p.harmonic.period); }

std::vector<double> to_constrained_vector(const ModelParams& p) {
  const ModelLayout layout = layout_of(p);
  std::vector<double> x(p.harmonic.coefficients.begin() + 1, p.harmonic.coefficients.end());
  for (int l = 0; l < rate_classes(layout); ++l) x.push_back(p.eta[l]);
  for (int l = 0; l < rate_classes(layout); ++l) x.push_back(p.mu[l]);
  for (int l = 0; l < 2; ++l)
    if (variant_has_psi(layout.variant, l)) {
      if (!p.psi[l]) throw std::invalid_argument("variant requires psi" + std::to_string(l + 1));
      x.push_back(*p.psi[l]);
    }
  return x;
}

ModelParams from_constrained_vector(std::span<const double> x, const ModelLayout& layout) {
  if (x.size() != layout.dimension()) throw std::invalid_argument("parameter vector has the wrong dimension");
  ModelParams p;
  p.variant = layout.variant;
  p.harmonic = layout.harmonic();
  const std::size_t H = layout.harmonic_terms();
  std::copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(H), p.harmonic.coefficients.begin() + 1);
  std::size_t i = H;
  if (layout.shared_rates()) {
    p.eta = {x[i], x[i]};
    p.mu = {x[i + 1], x[i + 1]};
    i += 2;
  } else {
    p.eta = {x[i], x[i + 1]};
    p.mu = {x[i + 2], x[i + 3]};
    i += 4;
  }
  for (int l = 0; l < 2; ++l)
    if (variant_has_psi(layout.variant, l)) p.psi[l] = x[i++];
  return p;
}

std::vector<double> to_unconstrained(const ModelParams& p) {
  validate(p);
  const ModelLayout layout = layout_of(p);
  std::vector<double> v = to_constrained_vector(p);
  for (std::size_t i = layout.harmonic_terms(); i < v.size(); ++i) {
    if (!(v[i] > 0.0)) throw std::invalid_argument("positive parameters must be strictly positive to transform");
    v[i] = std::log(v[i]);
  }
  return v;
}

ModelParams from_unconstrained(std::span<const double> v, const ModelLayout& layout, double* log_jacobian) {
  if (v.size() != layout.dimension()) throw std::invalid_argument("unconstrained vector has the wrong dimension");
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument("unconstrained vector has non-finite entries");
  std::vector<double> x(v.begin(), v.end());
  double jac = 0.0;
  for (std::size_t i = layout.harmonic_terms(); i < x.size(); ++i) {
    jac += x[i];
    x[i] = std::exp(x[i]);
  }
  if (log_jacobian) *log_jacobian = jac;
  return from_constrained_vector(x, layout);
}

LogPosterior::LogPosterior(const ClusterSet& set, ModelLayout layout, PriorSpec prior, std::size_t threads)
    : data_(set, layout.harmonic()), layout_(std::move(layout)), prior_(prior), threads_(threads) {
  validate(prior_);
}

double LogPosterior::operator()(std::span<const double> v, std::span<double> grad) const {
  std::fill(grad.begin(), grad.end(), 0.0);
  if (v.size() != layout_.dimension()) throw std::invalid_argument("unconstrained vector has the wrong dimension");
  for (double x : v)
    if (!std::isfinite(x)) return kNegInf;
  double log_jac = 0.0;
  const ModelParams p = from_unconstrained(v, layout_, &log_jac);
  for (int l = 0; l < 2; ++l) {
    if (!(p.eta[l] > 0.0) || !std::isfinite(p.eta[l]) || !(p.mu[l] > 0.0) || !std::isfinite(p.mu[l])) return kNegInf;
    if (p.psi[l] && (!(*p.psi[l] > 0.0) || !std::isfinite(*p.psi[l]))) return kNegInf;
  }

  LoglikGradient g;
  const double ll = data_.loglik(p, grad.empty() ? nullptr : &g, threads_);
  if (ll == kNegInf || std::isnan(ll)) return kNegInf;
  const double value = ll + log_prior(p, prior_) + log_jac;
  if (grad.empty()) return value;

  const std::size_t H = layout_.harmonic_terms();
  const double sd = prior_.alpha_sd(H / 2);
  for (std::size_t k = 0; k < H; ++k) {
    const double a = p.harmonic.coefficients[k + 1];
    grad[k] = g.alpha[k] - a / (sd * sd);
  }
  std::size_t i = H;
  // d/du [loglik + ln Gamma(x; shape, rate) + u] with x = e^u
  auto gamma_term = [](double x, double dll, double shape, double rate) {
    return x * dll + (shape - 1.0) - rate * x + 1.0;
  };
  if (layout_.shared_rates()) {
    grad[i++] = gamma_term(p.eta[0], g.eta[0] + g.eta[1], prior_.eta_shape, prior_.eta_rate);
    grad[i++] = gamma_term(p.mu[0], g.mu[0] + g.mu[1], prior_.mu_shape, prior_.mu_rate);
  } else {
    for (int l = 0; l < 2; ++l) grad[i++] = gamma_term(p.eta[l], g.eta[l], prior_.eta_shape, prior_.eta_rate);
    for (int l = 0; l < 2; ++l) grad[i++] = gamma_term(p.mu[l], g.mu[l], prior_.mu_shape, prior_.mu_rate);
  }
  for (int l = 0; l < 2; ++l) {
    if (!p.psi[l]) continue;
    const double u = v[i];
    const double s = prior_.log_psi_sd;
    grad[i++] = *p.psi[l] * g.psi[l] - (u - prior_.log_psi_mean) / (s * s);
  }
  return value;
}

ModelParams sample_prior(Rng& rng, const ModelLayout& layout, const PriorSpec& spec) {
  std::vector<double> x;
  std::normal_distribution<double> alpha(0.0, spec.alpha_sd(layout.cycles.size()));
  for (std::size_t k = 0; k < layout.harmonic_terms(); ++k) x.push_back(alpha(rng));
  std::gamma_distribution<double> eta(spec.eta_shape, 1.0 / spec.eta_rate);
  std::gamma_distribution<double> mu(spec.mu_shape, 1.0 / spec.mu_rate);
  for (int l = 0; l < rate_classes(layout); ++l) x.push_back(eta(rng));
  for (int l = 0; l < rate_classes(layout); ++l) x.push_back(mu(rng));
  std::normal_distribution<double> log_psi(spec.log_psi_mean, spec.log_psi_sd);
  for (int l = 0; l < 2; ++l)
    if (variant_has_psi(layout.variant, l)) x.push_back(std::exp(log_psi(rng)));
  return from_constrained_vector(x, layout);
}

ModelParams PosteriorSamples::params(std::size_t chain, std::size_t iteration) const {
  return from_constrained_vector(draws.draw(chain, iteration), layout);
}

Draws PosteriorSamples::unconstrained() const {
  Draws out = draws;
  const std::size_t H = layout.harmonic_terms();
  for (std::size_t c = 0; c < out.chains; ++c)
    for (std::size_t i = 0; i < out.iterations; ++i)
      for (std::size_t d = H; d < out.dim; ++d) out.at(c, i, d) = std::log(out.at(c, i, d));
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> PosteriorSamples::thinned(std::size_t R) const {
  const std::size_t S = draws.total();
  if (R == 0 || R > S) throw std::invalid_argument("R must lie in [1, number of draws]");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t r = 0; r < R; ++r) {
    const std::size_t idx = r * S / R;
    out.emplace_back(idx / draws.iterations, idx % draws.iterations);
  }
  return out;
}

void diagnose(PosteriorSamples& s, const ConvergenceTargets& targets) {
  s.warnings.clear();
  s.diagnostics.clear();
  if (s.draws.chains >= 2 && s.draws.iterations >= 4) {
    s.diagnostics = convergence(s.draws);
    for (std::size_t d = 0; d < s.names.size(); ++d) {
      const auto& c = s.diagnostics[d];
      if (c.degenerate) {
        s.warnings.push_back(s.names[d] + ": constant draws");
        continue;
      }
      if (!(c.rhat <= targets.max_rhat))
        s.warnings.push_back(s.names[d] + ": R-hat " + format_double(c.rhat) + " exceeds " +
                             format_double(targets.max_rhat));
      if (!(c.ess >= targets.min_ess))
        s.warnings.push_back(s.names[d] + ": bulk ESS " + format_double(c.ess) + " below " +
                             format_double(targets.min_ess));
    }
  } else {
    s.warnings.push_back("too few chains or draws for convergence diagnostics");
  }
  std::size_t divergent = 0;
  for (const auto& st : s.chain_stats) divergent += st.divergences;
  if (divergent > 0) s.warnings.push_back(std::to_string(divergent) + " divergent transitions after warmup");
}

PosteriorSamples sample_posterior(const ClusterSet& set, const ModelLayout& layout, const PriorSpec& prior,
                                  const SamplerConfig& config, const ConvergenceTargets& targets) {
  const LogPosterior target(set, layout, prior, 1);
  const LogDensityFn density = [&target](std::span<const double> v, std::span<double> g) { return target(v, g); };
  const InitFn init = [&](Rng& rng) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const auto v = to_unconstrained(sample_prior(rng, layout, prior));
      if (std::isfinite(target(v, {}))) return v;
    }
    throw std::runtime_error("no prior draw with finite posterior density in 1000 attempts");
  };
  SamplerResult run = run_nuts(density, init, layout.dimension(), config);

  PosteriorSamples out;
  out.layout = layout;
  out.names = layout.names();
  out.draws = std::move(run.draws);
  const std::size_t H = layout.harmonic_terms();
  for (std::size_t k = 0; k < out.draws.values.size(); ++k)
    if (k % out.draws.dim >= H) out.draws.values[k] = std::exp(out.draws.values[k]);
  out.chain_stats = std::move(run.stats);
  diagnose(out, targets);
  return out;
}

void write_posterior_csv(std::ostream& out, const PosteriorSamples& s) {
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

PosteriorSamples read_posterior_csv(std::istream& in, const ModelLayout& layout) {
  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
  };
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty posterior file", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  const auto names = layout.names();
  if (header.size() != names.size() + 2 || header[0] != "chain" || header[1] != "iter" ||
      !std::equal(names.begin(), names.end(), header.begin() + 2))
    throw DataError("posterior columns do not match the " + std::string(to_string(layout.variant)) + " layout", 1);

  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> rows;
  std::size_t line_no = 1, max_chain = 0, max_iter = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) throw DataError("wrong number of fields", line_no);
    auto parse_index = [&](const std::string& f) {
      std::size_t v = 0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || v == 0) throw DataError("bad chain/iter index", line_no);
      return v;
    };
    const std::size_t c = parse_index(fields[0]), it = parse_index(fields[1]);
    std::vector<double> x;
    for (std::size_t k = 2; k < fields.size(); ++k) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(fields[k].data(), fields[k].data() + fields[k].size(), v);
      if (ec != std::errc() || ptr != fields[k].data() + fields[k].size() || !std::isfinite(v))
        throw DataError("malformed value '" + fields[k] + "'", line_no);
      x.push_back(v);
    }
    if (!rows.emplace(std::make_pair(c, it), std::move(x)).second) throw DataError("duplicate draw", line_no);
    max_chain = std::max(max_chain, c);
    max_iter = std::max(max_iter, it);
  }
  if (rows.empty()) throw DataError("posterior file has no draws");
  if (rows.size() != max_chain * max_iter) throw DataError("posterior draws are not a full chains x iterations grid");

  PosteriorSamples s;
  s.layout = layout;
  s.names = names;
  s.draws = Draws(max_chain, max_iter, names.size());
  for (const auto& [key, x] : rows) std::copy(x.begin(), x.end(), s.draws.draw(key.first - 1, key.second - 1).begin());
  for (std::size_t k = 0; k < s.draws.values.size(); ++k)
    if (k % s.draws.dim >= layout.harmonic_terms() && !(s.draws.values[k] > 0.0))
      throw DataError("non-positive rate or dispersion in posterior draws");
  diagnose(s);
  return s;
}

}  // namespace dhawkes
