#pragma once

#include <vector>

#include "dhawkes/sampler.hpp"

namespace dhawkes {

struct Convergence {
  double rhat = 1.0;   // max of bulk and folded rank-normalised split R-hat
  double ess = 0.0;    // bulk effective sample size
  bool degenerate = false;  // constant draws: R-hat reported as 1, ESS as NaN
};

/// Per-coordinate diagnostics. Needs at least 2 chains of at least 4 draws.
std::vector<Convergence> convergence(const Draws& draws);

/// Single-coordinate versions on chain-major values (chains x iterations).
Convergence convergence(const std::vector<double>& values, std::size_t chains);
double split_rhat(const std::vector<double>& values, std::size_t chains);
double bulk_ess(const std::vector<double>& values, std::size_t chains);

/// ESS of unsplit, untransformed chains (no rank normalisation).
double raw_ess(const std::vector<double>& values, std::size_t chains);

}  // namespace dhawkes
