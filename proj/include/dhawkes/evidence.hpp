#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "dhawkes/infer.hpp"
#include "dhawkes/sampler.hpp"

namespace dhawkes {

struct BridgeConfig {
  std::size_t proposal_draws = 0;  // 0: as many as the retained posterior draws
  double tolerance = 1e-6;         // on successive log-evidence iterates
  std::size_t max_iterations = 1000;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
};

struct EvidenceEstimate {
  double log_ml = 0.0;
  double coefficient_of_variation = 0.0;
  std::size_t iterations_used = 0;
  bool converged = false;
};

/// Log of an unnormalised density on the unconstrained scale.
using LogTargetFn = std::function<double(std::span<const double>)>;

/// Iterative bridge sampling with a moment-matched normal proposal. The first
/// half of every chain fits the proposal; the second half and fresh proposal
/// draws drive the optimal-bridge fixed point. The relative error uses the
/// approximate relative mean-squared error with an autocorrelation correction
/// for the posterior half.
EvidenceEstimate bridge_sampling(const Draws& unconstrained, const LogTargetFn& log_target,
                                 const BridgeConfig& config);

/// Evidence of a fitted variant on its training data.
EvidenceEstimate bridge_logml(const PosteriorSamples& samples, const ClusterSet& set, const PriorSpec& prior,
                              const BridgeConfig& config);

/// ln of the Bayes factor of model l over model m. Throws std::invalid_argument
/// when either estimate did not converge.
double bayes_factor(const EvidenceEstimate& l, const EvidenceEstimate& m);

/// Conventional verbal grade of ln BF (negative values are graded for the
/// other model): "not worth more than a bare mention", "substantial",
/// "strong", "very strong", "decisive".
std::string evidence_strength(double log_bf);

}  // namespace dhawkes
