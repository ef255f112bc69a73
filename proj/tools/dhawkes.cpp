// Command-line front end: simulate, fit, fit-immigrants, evidence, predict,
// assess, spectrum, split.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "dhawkes/assess.hpp"
#include "dhawkes/evidence.hpp"
#include "dhawkes/immigrant.hpp"
#include "dhawkes/infer.hpp"
#include "dhawkes/io.hpp"
#include "dhawkes/likelihood.hpp"
#include "dhawkes/parallel.hpp"
#include "dhawkes/simulate.hpp"

#ifndef DHAWKES_VERSION
#define DHAWKES_VERSION "dev"
#endif

using namespace dhawkes;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelOptions {
  std::string model = "M4";
  int K = -1;
  std::vector<int> cycles;
  double period = 24.0;

  void add(CLI::App* app, bool with_model = true) {
    if (with_model) app->add_option("--model", model, "Variant M1..M5")->check(CLI::IsMember({"M1", "M2", "M3", "M4", "M5"}));
    app->add_option("--K", K, "Number of harmonics (cycles 1..K); default 0 for M1/M2, 2 otherwise")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--cycles", cycles, "Explicit cycles per period, overriding --K");
    app->add_option("--period", period, "Activity period in hours")->check(CLI::PositiveNumber);
  }

  ModelLayout layout() const {
    const Variant v = parse_variant(model);
    std::vector<int> c = cycles;
    if (c.empty()) {
      const int k = K >= 0 ? K : (variant_allows_harmonics(v) ? 2 : 0);
      for (int i = 1; i <= k; ++i) c.push_back(i);
    }
    if (!variant_allows_harmonics(v) && !c.empty())
      throw UsageError(model + " has no circadian terms; use --K 0");
    return make_layout(v, c, period);
  }
};

struct SamplerOptions {
  std::size_t chains = 4, warmup = 1000, samples = 1000;
  double target_accept = 0.8;
  int max_depth = 10;

  void add(CLI::App* app) {
    app->add_option("--chains", chains, "Number of chains")->check(CLI::PositiveNumber);
    app->add_option("--warmup", warmup, "Warmup iterations per chain");
    app->add_option("--samples", samples, "Kept draws per chain")->check(CLI::PositiveNumber);
    app->add_option("--target-accept", target_accept, "Target acceptance statistic")->check(CLI::Range(0.5, 0.999));
    app->add_option("--max-depth", max_depth, "Maximum tree depth")->check(CLI::Range(1, 20));
  }

  SamplerConfig config(std::uint64_t seed) const {
    SamplerConfig c;
    c.chains = chains;
    c.warmup = warmup;
    c.iterations = samples;
    c.target_accept = target_accept;
    c.max_depth = max_depth;
    c.seed = seed;
    return c;
  }
};

std::string to_text(const json& j) { return j.dump(2) + "\n"; }

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::vector<double> quantiles(std::vector<double> x, std::initializer_list<double> probs) {
  std::sort(x.begin(), x.end());
  std::vector<double> out;
  for (double p : probs) {
    const double h = p * static_cast<double>(x.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, x.size() - 1);
    out.push_back(x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]));
  }
  return out;
}

PosteriorSamples load_posterior(const std::string& path, const ModelLayout& layout) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return read_posterior_csv(in, layout);
}

json posterior_summary(const PosteriorSamples& s) {
  json params = json::array();
  for (std::size_t d = 0; d < s.names.size(); ++d) {
    const auto col = s.draws.column(d);
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(col.size());
    double var = 0.0;
    for (double v : col) var += (v - mean) * (v - mean);
    const auto q = quantiles(col, {0.05, 0.5, 0.95});
    json p{{"name", s.names[d]}, {"mean", mean}, {"sd", std::sqrt(var / static_cast<double>(col.size() - 1))},
           {"q05", q[0]}, {"median", q[1]}, {"q95", q[2]}};
    if (!s.diagnostics.empty()) {
      p["rhat"] = number(s.diagnostics[d].rhat);
      p["ess_bulk"] = number(s.diagnostics[d].ess);
    }
    params.push_back(p);
  }
  json chains = json::array();
  for (const auto& st : s.chain_stats)
    chains.push_back({{"step_size", st.step_size}, {"mean_accept", st.mean_accept},
                      {"divergences", st.divergences}, {"max_depth_hits", st.max_depth_hits}});
  return {{"variant", std::string(to_string(s.layout.variant))}, {"cycles_per_period", s.layout.cycles},
          {"period_hours", s.layout.period}, {"parameters", params}, {"chains", chains}, {"warnings", s.warnings}};
}

std::vector<double> immigrant_times(const ClusterSet& set) {
  std::vector<double> out;
  for (const auto& c : set.clusters) out.push_back(c.immigrant_time());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branching Hawkes models for discussion trees"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", DHAWKES_VERSION);
  std::size_t threads = 0;
  double window = 48.0;
  app.add_option("--threads", threads, "Worker threads (default: DHAWKES_THREADS or 1)");
  app.add_option("--window-hours", window, "Observation window after each post")->check(CLI::PositiveNumber);

  std::string out_path;
  std::optional<std::uint64_t> seed;
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", out_path, "Output file")->required(); };
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", seed, "Master random seed"); };

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate discussion trees");
  std::string params_path, seeds_path, seeds_from, sim_posterior;
  double horizon = 48.0;
  std::size_t max_points = 100000;
  bool allow_truncated = false;
  ModelOptions sim_model;
  sim->add_option("--params", params_path, "Parameter JSON");
  sim->add_option("--posterior", sim_posterior, "Posterior CSV; seed i uses an evenly spaced draw");
  sim_model.add(sim);
  sim->add_option("--seeds", seeds_path, "CSV of immigrant times (header 'time')");
  sim->add_option("--seeds-from", seeds_from, "Use the immigrant times of a tree CSV");
  sim->add_option("--horizon", horizon, "Hours simulated after each immigrant")->check(CLI::PositiveNumber);
  sim->add_option("--max-points", max_points, "Point cap per cluster")->check(CLI::PositiveNumber);
  sim->add_flag("--allow-truncated", allow_truncated, "Write clusters that hit the cap instead of failing");
  add_seed(sim);
  add_out(sim);

  // fit
  auto* fit = app.add_subcommand("fit", "Sample the posterior of a variant");
  std::string data_path;
  ModelOptions fit_model;
  SamplerOptions fit_sampler;
  fit->add_option("--data", data_path, "Tree CSV")->required();
  fit_model.add(fit);
  fit_sampler.add(fit);
  add_seed(fit);
  add_out(fit);

  // fit-immigrants
  auto* fimm = app.add_subcommand("fit-immigrants", "Fit the periodic Poisson model of post arrivals");
  ModelOptions imm_model;
  SamplerOptions imm_sampler;
  double a0 = 0.0;
  fimm->add_option("--data", data_path, "Tree CSV")->required();
  fimm->add_option("--a0", a0, "End of the observation period (default: next period boundary after the last post)");
  imm_model.add(fimm, false);
  imm_sampler.add(fimm);
  add_seed(fimm);
  add_out(fimm);

  // evidence
  auto* evi = app.add_subcommand("evidence", "Bridge-sampling estimate of the log evidence");
  std::string posterior_path;
  ModelOptions evi_model;
  std::size_t proposal_draws = 0;
  evi->add_option("--data", data_path, "Training tree CSV")->required();
  evi->add_option("--posterior", posterior_path, "Posterior CSV from fit")->required();
  evi->add_option("--proposal-draws", proposal_draws, "Proposal draws (default: number of posterior draws)");
  evi_model.add(evi);
  add_seed(evi);
  add_out(evi);

  // predict
  auto* pred = app.add_subcommand("predict", "Predict final discussion sizes");
  ModelOptions pred_model;
  double s = 0.0;
  std::size_t R = 100;
  pred->add_option("--data", data_path, "Tree CSV of clusters to forecast")->required();
  pred->add_option("--posterior", posterior_path, "Posterior CSV")->required();
  pred->add_option("--s", s, "Learning interval in hours")->check(CLI::NonNegativeNumber);
  pred->add_option("--horizon", horizon, "Forecast horizon after the post")->check(CLI::PositiveNumber);
  pred->add_option("--R", R, "Posterior draws per cluster")->check(CLI::PositiveNumber);
  pred->add_option("--max-points", max_points, "Point cap per simulated cluster")->check(CLI::PositiveNumber);
  pred_model.add(pred);
  add_seed(pred);
  add_out(pred);

  // assess
  auto* ass = app.add_subcommand("assess", "Predictive scores and goodness of fit");
  std::string metric, train_path;
  std::vector<std::string> sim_specs;
  ModelOptions ass_model;
  std::size_t B = 1000;
  double alpha_q = 0.2;
  ass->add_option("--metric", metric, "lpd | crps | ks | rquantile | hourly")
      ->required()
      ->check(CLI::IsMember({"lpd", "crps", "ks", "rquantile", "hourly"}));
  ass->add_option("--data", data_path, "Test tree CSV (training data for ks)")->required();
  ass->add_option("--train", train_path, "Training tree CSV (crps baseline)");
  ass->add_option("--posterior", posterior_path, "Posterior CSV");
  ass->add_option("--sim", sim_specs, "NAME=trees.csv simulated from the --data immigrants (ks)");
  ass->add_option("--R", R, "Posterior draws")->check(CLI::PositiveNumber);
  ass->add_option("--s", s, "Learning interval in hours (crps)")->check(CLI::NonNegativeNumber);
  ass->add_option("--horizon", horizon, "Forecast horizon (crps)")->check(CLI::PositiveNumber);
  ass->add_option("--B", B, "Bootstrap resamples (ks)")->check(CLI::PositiveNumber);
  ass->add_option("--alpha-q", alpha_q, "Top fraction for transmission quantiles")->check(CLI::Range(1e-9, 1.0 - 1e-9));
  ass->add_option("--max-points", max_points, "Point cap per simulated cluster")->check(CLI::PositiveNumber);
  ass_model.add(ass);
  add_seed(ass);
  add_out(ass);

  // spectrum
  auto* spec = app.add_subcommand("spectrum", "Periodogram of hourly activity");
  spec->add_option("--data", data_path, "Tree CSV")->required();
  add_out(spec);

  // split
  auto* split = app.add_subcommand("split", "Sample disjoint training and test clusters");
  double train_frac = 0.5;
  std::vector<double> train_period, test_period;
  std::string test_out;
  split->add_option("--data", data_path, "Tree CSV")->required();
  split->add_option("--frac", train_frac, "Fraction of each period's pool to sample")->check(CLI::Range(1e-9, 1.0 - 1e-9));
  split->add_option("--train-period", train_period, "BEGIN END hours")->expected(2)->required();
  split->add_option("--test-period", test_period, "BEGIN END hours")->expected(2)->required();
  split->add_option("--test-out", test_out, "Test CSV")->required();
  add_seed(split);
  add_out(split);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const auto started = std::chrono::steady_clock::now();
  CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  json extra_manifest = json::object();

  try {
    if (threads > 0) set_default_threads(threads);
    const bool stochastic = name != "spectrum" && !(name == "assess" && (metric == "lpd" || metric == "rquantile" ||
                                                                          metric == "hourly"));
    if (stochastic && !seed) throw UsageError(name + " requires --seed");
    const std::uint64_t master = seed.value_or(0);

    if (name == "simulate") {
      if (params_path.empty() == sim_posterior.empty()) throw UsageError("simulate needs exactly one of --params, --posterior");
      if (seeds_path.empty() == seeds_from.empty()) throw UsageError("simulate needs exactly one of --seeds, --seeds-from");
      std::vector<double> seeds;
      if (!seeds_path.empty()) {
        std::ifstream in(seeds_path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open '" + seeds_path + "' for reading");
        seeds = read_seeds(in);
      } else {
        seeds = immigrant_times(load_clusters(seeds_from, window));
      }
      if (seeds.empty()) throw std::runtime_error("no immigrant times to simulate from");
      SimConfig config{master, max_points, horizon, 0};
      SimulationResult result;
      if (!params_path.empty()) {
        const ModelParams p = params_from_json(read_file(params_path));
        result = simulate_dataset_unchecked(p, seeds, config);
      } else {
        const PosteriorSamples post = load_posterior(sim_posterior, sim_model.layout());
        // Seed i is simulated under draw i of an even thinning of the pooled chains.
        const std::size_t S = post.draws.total();
        std::vector<std::size_t> draw_of(seeds.size());
        for (std::size_t i = 0; i < seeds.size(); ++i) draw_of[i] = (i * S / seeds.size()) % S;
        std::vector<Propagation> runs(seeds.size());
        parallel_for(seeds.size(), [&](std::size_t i) {
          Rng rng = Rng::derive(master, {i});
          const std::size_t idx = draw_of[i];
          const Cluster root{{seeds[i]}, {0}, seeds[i]};
          runs[i] = propagate_cluster(rng, post.params(idx / post.draws.iterations, idx % post.draws.iterations), root,
                                      seeds[i], seeds[i] + horizon, max_points);
        });
        for (std::size_t i = 0; i < runs.size(); ++i) {
          if (runs[i].truncated) result.truncated.push_back(i);
          result.set.clusters.push_back(std::move(runs[i].cluster));
        }
      }
      if (!result.truncated.empty()) {
        std::cerr << "warning: " << result.truncated.size() << " cluster(s) reached --max-points\n";
        if (!allow_truncated) throw TruncationError(result.set, result.truncated);
      }
      std::ostringstream os;
      write_nodes(os, result.set);
      write_file(out_path, os.str());
      extra_manifest["truncated_clusters"] = result.truncated;
    } else if (name == "fit") {
      const ModelLayout layout = fit_model.layout();
      const ClusterSet data = load_clusters(data_path, window);
      if (data.empty()) throw std::runtime_error("no clusters in '" + data_path + "'");
      const PosteriorSamples post = sample_posterior(data, layout, PriorSpec{}, fit_sampler.config(master));
      std::ostringstream os;
      write_posterior_csv(os, post);
      write_file(out_path, os.str());
      write_file(out_path + ".summary.json", to_text(posterior_summary(post)));
      for (const auto& w : post.warnings) std::cerr << "warning: " << w << '\n';
    } else if (name == "fit-immigrants") {
      const ClusterSet data = load_clusters(data_path, window);
      const auto arrivals = immigrant_times(data);
      if (arrivals.empty()) throw std::runtime_error("no posts in '" + data_path + "'");
      double end = a0;
      if (end <= 0.0) end = (std::floor(arrivals.back() / imm_model.period) + 1.0) * imm_model.period;
      std::vector<int> cycles = imm_model.cycles;
      if (cycles.empty())
        for (int i = 1; i <= (imm_model.K >= 0 ? imm_model.K : 2); ++i) cycles.push_back(i);
      const auto post = fit_immigrants(arrivals, end, cycles, imm_model.period, imm_sampler.config(master));
      std::ostringstream os;
      write_immigrant_csv(os, post);
      write_file(out_path, os.str());
      for (const auto& w : post.warnings) std::cerr << "warning: " << w << '\n';
      extra_manifest["a0"] = end;
    } else if (name == "evidence") {
      const ModelLayout layout = evi_model.layout();
      const ClusterSet data = load_clusters(data_path, window);
      const PosteriorSamples post = load_posterior(posterior_path, layout);
      for (const auto& w : post.warnings) std::cerr << "warning: " << w << '\n';
      BridgeConfig config;
      config.seed = master;
      config.proposal_draws = proposal_draws;
      const auto est = bridge_logml(post, data, PriorSpec{}, config);
      json j{{"variant", std::string(to_string(layout.variant))}, {"log_ml", number(est.log_ml)},
             {"coefficient_of_variation", number(est.coefficient_of_variation)},
             {"iterations_used", est.iterations_used}, {"converged", est.converged},
             {"posterior_warnings", post.warnings}};
      write_file(out_path, to_text(j));
      if (!est.converged) std::cerr << "warning: bridge fixed point did not converge\n";
    } else if (name == "predict") {
      const ModelLayout layout = pred_model.layout();
      const ClusterSet data = load_clusters(data_path, window);
      const PosteriorSamples post = load_posterior(posterior_path, layout);
      if (!(horizon > s)) throw UsageError("--horizon must exceed --s");
      const auto preds = predict_set(post, data, s, horizon, R, master, 0, max_points);
      std::ostringstream os;
      os << "cluster,immigrant_time,observed,truth,mean,q05,median,q95,truncated\n";
      std::size_t warned = 0;
      for (std::size_t i = 0; i < preds.size(); ++i) {
        std::vector<double> x(preds[i].sizes.begin(), preds[i].sizes.end());
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(x.size());
        const auto q = quantiles(x, {0.05, 0.5, 0.95});
        os << i << ',' << format_double(data.clusters[i].immigrant_time()) << ','
           << observed_prefix(data.clusters[i], s).size() << ',' << data.clusters[i].size() << ','
           << format_double(mean) << ',' << format_double(q[0]) << ',' << format_double(q[1]) << ','
           << format_double(q[2]) << ',' << preds[i].truncated << '\n';
        if (preds[i].truncated * 100 > R) ++warned;
      }
      if (warned) std::cerr << "warning: " << warned << " cluster(s) hit the point cap in more than 1% of draws\n";
      write_file(out_path, os.str());
    } else if (name == "assess") {
      const ClusterSet data = load_clusters(data_path, window);
      json j{{"metric", metric}};
      if (metric == "hourly") {
        json bins = json::array();
        const auto table = mean_size_by_hour(data);
        for (std::size_t h = 0; h < table.size(); ++h)
          bins.push_back({{"hour", h}, {"mean", table[h].mean}, {"standard_error", table[h].standard_error},
                          {"count", table[h].count}});
        j["bins"] = bins;
      } else if (metric == "ks") {
        if (sim_specs.empty()) throw UsageError("ks needs at least one --sim NAME=PATH");
        std::vector<double> train;
        for (auto n : cluster_sizes(data)) train.push_back(static_cast<double>(n));
        std::map<std::string, std::vector<double>> sims;
        for (const auto& spec_text : sim_specs) {
          const auto eq = spec_text.find('=');
          if (eq == std::string::npos || eq == 0) throw UsageError("--sim expects NAME=PATH");
          const ClusterSet simulated = load_clusters(spec_text.substr(eq + 1), window);
          auto& v = sims[spec_text.substr(0, eq)];
          for (auto n : cluster_sizes(simulated)) v.push_back(static_cast<double>(n));
        }
        const auto boot = bootstrap_ks(train, sims, B, master);
        json models = json::object();
        for (const auto& [model, stats] : boot) {
          const auto q = quantiles(stats, {0.025, 0.5, 0.975});
          models[model] = {{"ks_full_sample", ks_statistic(train, sims.at(model))},
                           {"bootstrap_median", q[1]}, {"bootstrap_q025", q[0]}, {"bootstrap_q975", q[2]},
                           {"bootstrap", stats}};
        }
        j["B"] = B;
        j["models"] = models;
      } else {
        if (posterior_path.empty()) throw UsageError(metric + " needs --posterior");
        const ModelLayout layout = ass_model.layout();
        const PosteriorSamples post = load_posterior(posterior_path, layout);
        j["variant"] = std::string(to_string(layout.variant));
        if (metric == "lpd") {
          const auto report = lpd(post, data, R);
          json per = json::array();
          for (double v : report.per_cluster) per.push_back(number(v));
          j.update({{"R", R}, {"aggregate", number(report.aggregate)},
                    {"standard_error", number(report.standard_error)}, {"flagged", report.flagged},
                    {"per_cluster", per}});
        } else if (metric == "crps") {
          if (!(horizon > s)) throw UsageError("--horizon must exceed --s");
          const auto preds = predict_set(post, data, s, horizon, R, master, 0, max_points);
          const auto truths = cluster_sizes(data);
          const auto report = crps(preds, truths);
          j.update({{"R", R}, {"s", s}, {"horizon", horizon}, {"aggregate", report.aggregate},
                    {"standard_error", report.standard_error}, {"flagged", report.flagged},
                    {"per_cluster", report.per_cluster}});
          if (!train_path.empty()) {
            const ClusterSet train = load_clusters(train_path, window);
            j["crpss"] = crpss(report, cluster_sizes(train), truths);
          }
        } else {  // rquantile
          std::vector<std::vector<double>> r(2), zero(2);
          for (std::size_t c = 0; c < post.draws.chains; ++c)
            for (std::size_t i = 0; i < post.draws.iterations; ++i) {
              const ModelParams p = post.params(c, i);
              for (int l = 0; l < 2; ++l) {
                const double psi = p.psi[l] ? *p.psi[l] : kNoDispersion;
                r[l].push_back(transmission_proportion(p.mu[l], psi, alpha_q));
              }
              if (!data.empty()) {
                // zero-reply share of posts at their own exposure c_{t_1}
                double z = 0.0;
                for (const auto& cl : data.clusters) {
                  const double exposure = exposures(p, cl)[0];
                  z += zero_reply_fraction(p.mu[0], p.psi[0] ? *p.psi[0] : kNoDispersion, exposure);
                }
                zero[0].push_back(z / static_cast<double>(data.size()));
              }
            }
          json classes = json::array();
          for (int l = 0; l < 2; ++l) {
            const auto q = quantiles(r[l], {0.025, 0.5, 0.975});
            json entry{{"class", l == 0 ? "immigrant" : "offspring"}, {"alpha_q", alpha_q},
                       {"r_median", q[1]}, {"r_q025", q[0]}, {"r_q975", q[2]}};
            if (l == 0 && !zero[0].empty()) {
              const auto zq = quantiles(zero[0], {0.025, 0.5, 0.975});
              entry["zero_reply_median"] = zq[1];
              entry["zero_reply_q025"] = zq[0];
              entry["zero_reply_q975"] = zq[2];
            }
            classes.push_back(entry);
          }
          j["classes"] = classes;
        }
      }
      write_file(out_path, to_text(j));
    } else if (name == "spectrum") {
      const ClusterSet data = load_clusters(data_path, window);
      const HourlySeries series = hourly_counts(data);
      std::vector<double> counts(series.counts.begin(), series.counts.end());
      std::ostringstream os;
      os << "frequency_per_day,power\n";
      for (const auto& pt : periodogram(counts)) os << format_double(pt.frequency) << ',' << format_double(pt.power) << '\n';
      write_file(out_path, os.str());
    } else if (name == "split") {
      const ClusterSet data = load_clusters(data_path, window);
      const auto [train, test] = split_train_test(data, train_frac, master, {train_period[0], train_period[1]},
                                                  {test_period[0], test_period[1]});
      std::ostringstream a, b;
      write_nodes(a, train);
      write_nodes(b, test);
      write_file(out_path, a.str());
      write_file(test_out, b.str());
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  json manifest{{"command", name},
                {"arguments", std::vector<std::string>(argv + 1, argv + argc)},
                {"seed", seed ? json(*seed) : json(nullptr)},
                {"threads", default_threads()},
                {"version", DHAWKES_VERSION},
                {"wall_time_seconds", seconds}};
  manifest.update(extra_manifest);
  try {
    write_file(out_path + ".manifest.json", to_text(manifest));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
