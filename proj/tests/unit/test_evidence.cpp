#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "dhawkes/evidence.hpp"
#include "dhawkes/simulate.hpp"
#include "oracles.hpp"
#include "toys.hpp"

using namespace dhawkes;

using oracle::posterior_draws;
using oracle::value_only;

TEST_CASE("bridge sampling on analytic toys") {
  oracle::Engine g(1);
  std::vector<int> counts(30);
  for (auto& c : counts) c = std::poisson_distribution<int>(3.2)(g);
  const auto gp = oracle::gamma_poisson(counts, 2.0, 0.5);
  BridgeConfig cfg;
  cfg.seed = 2;
  auto e = bridge_sampling(posterior_draws(gp.density, 3), value_only(gp.density), cfg);
  CHECK(e.converged);
  CHECK(std::abs(e.log_ml - gp.log_evidence) < 0.01);
  CHECK(e.coefficient_of_variation < 0.005);

  std::vector<double> y(25);
  for (auto& v : y) v = std::normal_distribution<double>(1.3, 2.0)(g);
  const auto nn = oracle::normal_normal(y, 2.0, 3.0);
  e = bridge_sampling(posterior_draws(nn.density, 4), value_only(nn.density), cfg);
  CHECK(e.converged);
  CHECK(std::abs(e.log_ml - nn.log_evidence) < 0.005);
  CHECK(e.coefficient_of_variation < 0.005);
}

TEST_CASE("bridge sampling invariances") {
  oracle::Engine g(5);
  std::vector<double> y(10);
  for (auto& v : y) v = std::normal_distribution<double>(0.0, 1.0)(g);
  const auto nn = oracle::normal_normal(y, 1.0, 1.0);
  const auto draws = posterior_draws(nn.density, 6);
  BridgeConfig cfg;
  cfg.seed = 7;
  const auto base = bridge_sampling(draws, value_only(nn.density), cfg);

  const auto shifted = bridge_sampling(
      draws, [&](std::span<const double> x) { return nn.density(x, {}) + 5.0; }, cfg);
  CHECK(shifted.log_ml - base.log_ml == doctest::Approx(5.0).epsilon(1e-8));

  // swap the halves of every chain
  Draws swapped = draws;
  const std::size_t half = draws.iterations / 2;
  for (std::size_t c = 0; c < draws.chains; ++c)
    for (std::size_t i = 0; i < draws.iterations; ++i)
      swapped.at(c, i, 0) = draws.at(c, (i + half) % draws.iterations, 0);
  const auto other = bridge_sampling(swapped, value_only(nn.density), cfg);
  CHECK(std::abs(other.log_ml - base.log_ml) < 4.0 * std::max(base.coefficient_of_variation, 1e-4));
}

TEST_CASE("bayes_factor and grading") {
  EvidenceEstimate a{-100.0, 0.001, 5, true}, b{-103.0, 0.001, 5, true};
  CHECK(bayes_factor(a, a) == 0.0);
  CHECK(bayes_factor(a, b) == doctest::Approx(3.0));
  b.converged = false;
  CHECK_THROWS_AS(bayes_factor(a, b), std::invalid_argument);
  CHECK(evidence_strength(0.5) == "not worth more than a bare mention");
  CHECK(evidence_strength(1.5) == "substantial");
  CHECK(evidence_strength(2.31) == "strong");
  CHECK(evidence_strength(4.0) == "very strong");
  CHECK(evidence_strength(10.0) == "decisive");
  CHECK(evidence_strength(-2.31) == "strong");
}

TEST_CASE("true generating model has the largest evidence") {
  ModelParams truth;
  truth.variant = Variant::M3;
  truth.harmonic = HarmonicSpec::with_cycles({1, 2});
  truth.harmonic.coefficients = {1.0, -0.129, -0.483, -0.125, 0.2165};
  truth.eta = {0.25, 0.34};
  truth.mu = {0.65, 0.65};

  int wins = 0;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    oracle::Engine g(200 + rep);
    std::vector<double> seeds(400);
    for (auto& s : seeds) s = std::uniform_real_distribution<double>(0.0, 720.0)(g);
    std::sort(seeds.begin(), seeds.end());
    SimConfig sim;
    sim.master_seed = 200 + rep;
    const auto set = simulate_dataset(truth, seeds, sim);

    SamplerConfig cfg;
    cfg.warmup = 500;
    cfg.iterations = 500;
    cfg.seed = rep;
    BridgeConfig bridge;
    bridge.seed = rep;
    std::vector<double> logml;
    for (Variant v : {Variant::M1, Variant::M2, Variant::M3, Variant::M4, Variant::M5}) {
      const auto layout = variant_allows_harmonics(v) ? make_layout(v, {1, 2}) : make_layout(v);
      const auto post = sample_posterior(set, layout, {}, cfg);
      logml.push_back(bridge_logml(post, set, {}, bridge).log_ml);
    }
    wins += std::max_element(logml.begin(), logml.end()) - logml.begin() == 2;
  }
  CHECK(wins >= 8);
}
