#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dhawkes/diagnostics.hpp"
#include "dhawkes/likelihood.hpp"
#include "dhawkes/params.hpp"
#include "dhawkes/sampler.hpp"

namespace dhawkes {

/// alpha_k ~ N(0, sigma_alpha^2), eta ~ Gamma(shape, rate), mu ~ Gamma(shape, rate),
/// ln psi ~ N(mean, sd^2). sigma_alpha defaults to 1/sqrt(2K).
struct PriorSpec {
  std::optional<double> sigma_alpha;
  double eta_shape = 1.0, eta_rate = 1.0;
  double mu_shape = 4.0, mu_rate = 8.0;
  double log_psi_mean = 0.0, log_psi_sd = 1.0;

  double alpha_sd(std::size_t harmonics) const;
};

void validate(const PriorSpec& spec);

/// Log prior density of the parameters present in the variant, in the
/// natural parameterisation (psi has a log-normal density here).
double log_prior(const ModelParams& p, const PriorSpec& spec);

/// Parameter layout of a variant. The unconstrained vector is
///   [alpha_1..alpha_2K, ln eta_1, (ln eta_2), ln mu_1, (ln mu_2), (ln psi_1), (ln psi_2)]
/// where the bracketed entries are present only when the variant has them
/// (M1 shares eta and mu between classes).
struct ModelLayout {
  Variant variant = Variant::M2;
  std::vector<int> cycles;
  double period = 24.0;

  std::size_t harmonic_terms() const { return 2 * cycles.size(); }
  bool shared_rates() const { return variant == Variant::M1; }
  std::size_t dimension() const;
  std::vector<std::string> names() const;
  HarmonicSpec harmonic() const;
};

/// Throws for Custom or for harmonics in a variant without them.
ModelLayout make_layout(Variant variant, std::vector<int> cycles = {}, double period = 24.0);
ModelLayout layout_of(const ModelParams& p);

std::vector<double> to_unconstrained(const ModelParams& p);
/// Inverse map; `log_jacobian` receives the sum of the log-scale components.
ModelParams from_unconstrained(std::span<const double> v, const ModelLayout& layout,
                               double* log_jacobian = nullptr);

/// Natural-scale values in the order of ModelLayout::names().
std::vector<double> to_constrained_vector(const ModelParams& p);
ModelParams from_constrained_vector(std::span<const double> x, const ModelLayout& layout);

/// Unnormalised log posterior on the unconstrained scale with analytic gradient:
/// log-likelihood + log prior + log Jacobian.
class LogPosterior {
 public:
  LogPosterior(const ClusterSet& set, ModelLayout layout, PriorSpec prior = {}, std::size_t threads = 1);

  double operator()(std::span<const double> v, std::span<double> grad = {}) const;
  const ModelLayout& layout() const { return layout_; }
  const PriorSpec& prior() const { return prior_; }

 private:
  PreparedDataset data_;
  ModelLayout layout_;
  PriorSpec prior_;
  std::size_t threads_;
};

/// One draw from the prior, in natural parameters.
ModelParams sample_prior(Rng& rng, const ModelLayout& layout, const PriorSpec& spec);

struct PosteriorSamples {
  ModelLayout layout;
  std::vector<std::string> names;
  Draws draws;                        // natural scale
  std::vector<Convergence> diagnostics;
  std::vector<ChainStats> chain_stats;
  std::vector<std::string> warnings;

  bool flagged() const { return !warnings.empty(); }
  ModelParams params(std::size_t chain, std::size_t iteration) const;
  Draws unconstrained() const;
  /// Draw indices spread evenly over the pooled chains (chain-major order).
  std::vector<std::pair<std::size_t, std::size_t>> thinned(std::size_t R) const;
};

/// Diagnostics contract used to raise warnings.
struct ConvergenceTargets {
  double max_rhat = 1.01;
  double min_ess = 100.0;
};

/// Runs NUTS from prior draws (initial points with -inf density are redrawn).
PosteriorSamples sample_posterior(const ClusterSet& set, const ModelLayout& layout, const PriorSpec& prior,
                                  const SamplerConfig& config, const ConvergenceTargets& targets = {});

/// Recomputes diagnostics and warnings from the draws.
void diagnose(PosteriorSamples& s, const ConvergenceTargets& targets = {});

/// `chain,iter,<names>` with natural-scale values.
void write_posterior_csv(std::ostream& out, const PosteriorSamples& s);
/// Reads a posterior CSV; the column names must match the layout.
PosteriorSamples read_posterior_csv(std::istream& in, const ModelLayout& layout);

}  // namespace dhawkes
