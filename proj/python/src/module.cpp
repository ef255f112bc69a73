#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dhawkes/assess.hpp"
#include "dhawkes/evidence.hpp"
#include "dhawkes/harmonic.hpp"
#include "dhawkes/infer.hpp"
#include "dhawkes/io.hpp"
#include "dhawkes/likelihood.hpp"
#include "dhawkes/simulate.hpp"
#include "dhawkes/tree_data.hpp"

namespace py = pybind11;
using namespace dhawkes;

namespace {

// draws as a (chains, iterations, dim) array
py::array_t<double> draws_array(const Draws& d) {
  py::array_t<double> out({d.chains, d.iterations, d.dim});
  std::copy(d.values.begin(), d.values.end(), out.mutable_data());
  return out;
}

ClusterSet clusters_from_csv(const std::string& text, double window_hours) {
  std::istringstream in(text);
  const auto nodes = parse_nodes(in);
  return build_clusters(nodes, window_hours);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Branching point-process models for online discussion trees";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  py::class_<Cluster>(m, "Cluster")
      .def(py::init([](std::vector<double> times, std::vector<std::size_t> parents, double window_end) {
             Cluster c{std::move(times), std::move(parents), window_end};
             validate(c);
             return c;
           }),
           py::arg("times"), py::arg("parents"), py::arg("window_end"))
      .def_readonly("times", &Cluster::times)
      .def_readonly("parents", &Cluster::parents)
      .def_readonly("window_end", &Cluster::window_end)
      .def("__len__", &Cluster::size)
      .def("offspring_counts", [](const Cluster& c) { return offspring_counts(c); })
      .def("__repr__", [](const Cluster& c) {
        return "<Cluster n=" + std::to_string(c.size()) + " t1=" + format_double(c.immigrant_time()) + ">";
      });

  py::class_<ClusterSet>(m, "ClusterSet")
      .def(py::init([](std::vector<Cluster> clusters) { return ClusterSet{std::move(clusters), {}}; }),
           py::arg("clusters"))
      .def_readonly("clusters", &ClusterSet::clusters)
      .def("__len__", &ClusterSet::size)
      .def("__getitem__", [](const ClusterSet& s, std::size_t i) {
        if (i >= s.size()) throw py::index_error();
        return s.clusters[i];
      })
      .def("sizes", [](const ClusterSet& s) { return cluster_sizes(s); })
      .def("to_csv", [](const ClusterSet& s) {
        std::ostringstream out;
        write_nodes(out, s);
        return out.str();
      });

  m.def("load_clusters", &load_clusters, py::arg("path"), py::arg("window_hours") = 48.0,
        "Read an id,time,parent_id CSV file and build windowed clusters.");
  m.def("clusters_from_csv", &clusters_from_csv, py::arg("text"), py::arg("window_hours") = 48.0);

  py::class_<HarmonicSpec>(m, "HarmonicSpec")
      .def(py::init([](std::vector<int> cycles, std::vector<double> coefficients, double period) {
             HarmonicSpec h{period, std::move(cycles), std::move(coefficients)};
             if (h.coefficients.empty()) h.coefficients.assign(h.basis_size(), 0.0);
             h.coefficients[0] = 1.0;
             validate(h);
             return h;
           }),
           py::arg("cycles") = std::vector<int>{}, py::arg("coefficients") = std::vector<double>{},
           py::arg("period") = 24.0)
      .def_readonly("period", &HarmonicSpec::period)
      .def_readonly("cycles", &HarmonicSpec::cycles)
      .def_readonly("coefficients", &HarmonicSpec::coefficients)
      .def("basis", [](const HarmonicSpec& h, double t) { return basis_eval(h, t); }, py::arg("t"))
      .def("activity", [](const HarmonicSpec& h, double t) { return activity_eval(h, t); }, py::arg("t"))
      .def("upper_bound", &activity_upper_bound)
      .def("weighted_integral", &weighted_integral, py::arg("t"), py::arg("a"), py::arg("eta"))
      .def("immigrant_integral", &immigrant_integral, py::arg("a0"));

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](const std::string& variant, std::array<double, 2> eta, std::array<double, 2> mu,
                       std::array<std::optional<double>, 2> psi, std::optional<HarmonicSpec> harmonic) {
             ModelParams p;
             p.variant = parse_variant(variant);
             p.eta = eta;
             p.mu = mu;
             p.psi = psi;
             if (harmonic) p.harmonic = *harmonic;
             validate(p);
             return p;
           }),
           py::arg("variant"), py::arg("eta"), py::arg("mu"),
           py::arg("psi") = std::array<std::optional<double>, 2>{}, py::arg("harmonic") = std::nullopt)
      .def_readonly("eta", &ModelParams::eta)
      .def_readonly("mu", &ModelParams::mu)
      .def_readonly("psi", &ModelParams::psi)
      .def_readonly("harmonic", &ModelParams::harmonic)
      .def_property_readonly("variant", [](const ModelParams& p) { return std::string(to_string(p.variant)); })
      .def("to_json", &params_to_json)
      .def_static("from_json", &params_from_json, py::arg("text"));

  m.def("cluster_loglik", &cluster_loglik, py::arg("params"), py::arg("cluster"));
  m.def("homogeneous_cluster_loglik", &homogeneous_cluster_loglik, py::arg("params"), py::arg("cluster"));
  m.def("dataset_loglik", &dataset_loglik, py::arg("params"), py::arg("set"), py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());

  m.def(
      "simulate",
      [](const ModelParams& p, const std::vector<double>& seeds, std::uint64_t seed, double horizon,
         std::size_t max_points, std::size_t threads) {
        SimConfig cfg{seed, max_points, horizon, threads};
        return simulate_dataset(p, seeds, cfg);
      },
      py::arg("params"), py::arg("seeds"), py::arg("seed"), py::arg("horizon") = 48.0,
      py::arg("max_points") = 100000, py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>(),
      "One simulated discussion per immigrant time.");

  py::class_<PosteriorSamples>(m, "PosteriorSamples")
      .def_readonly("names", &PosteriorSamples::names)
      .def_readonly("warnings", &PosteriorSamples::warnings)
      .def_property_readonly("draws", [](const PosteriorSamples& s) { return draws_array(s.draws); })
      .def_property_readonly("rhat",
                             [](const PosteriorSamples& s) {
                               std::vector<double> r;
                               for (const auto& d : s.diagnostics) r.push_back(d.rhat);
                               return r;
                             })
      .def_property_readonly("ess",
                             [](const PosteriorSamples& s) {
                               std::vector<double> r;
                               for (const auto& d : s.diagnostics) r.push_back(d.ess);
                               return r;
                             })
      .def("params", &PosteriorSamples::params, py::arg("chain"), py::arg("iteration"))
      .def("to_csv", [](const PosteriorSamples& s) {
        std::ostringstream out;
        write_posterior_csv(out, s);
        return out.str();
      });

  m.def(
      "fit",
      [](const ClusterSet& set, const std::string& variant, std::vector<int> cycles, double period,
         std::size_t chains, std::size_t warmup, std::size_t samples, std::uint64_t seed, std::size_t threads) {
        const auto layout = make_layout(parse_variant(variant), std::move(cycles), period);
        SamplerConfig cfg;
        cfg.chains = chains;
        cfg.warmup = warmup;
        cfg.iterations = samples;
        cfg.seed = seed;
        cfg.threads = threads;
        return sample_posterior(set, layout, PriorSpec{}, cfg);
      },
      py::arg("set"), py::arg("variant"), py::arg("cycles") = std::vector<int>{}, py::arg("period") = 24.0,
      py::arg("chains") = 4, py::arg("warmup") = 1000, py::arg("samples") = 1000, py::arg("seed"),
      py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());

  m.def(
      "log_evidence",
      [](const PosteriorSamples& s, const ClusterSet& set, std::uint64_t seed) {
        BridgeConfig cfg;
        cfg.seed = seed;
        const auto e = bridge_logml(s, set, PriorSpec{}, cfg);
        py::dict out;
        out["log_ml"] = e.log_ml;
        out["cv"] = e.coefficient_of_variation;
        out["iterations"] = e.iterations_used;
        out["converged"] = e.converged;
        return out;
      },
      py::arg("samples"), py::arg("set"), py::arg("seed"));

  m.def(
      "lpd",
      [](const PosteriorSamples& s, const ClusterSet& test, std::size_t R) {
        const auto r = lpd(s, test, R);
        return py::make_tuple(r.aggregate, r.standard_error, r.per_cluster);
      },
      py::arg("samples"), py::arg("test"), py::arg("R") = 100);

  m.def("crps_hat", [](std::vector<std::int64_t> predictions, std::int64_t truth) {
    std::sort(predictions.begin(), predictions.end());
    return crps_hat(predictions, truth);
  }, py::arg("predictions"), py::arg("truth"));
  m.def("ks_statistic", [](const std::vector<double>& x, const std::vector<double>& y) {
    return ks_statistic(x, y);
  }, py::arg("x"), py::arg("y"));
  m.def("transmission_proportion", &transmission_proportion, py::arg("mu"), py::arg("psi"), py::arg("alpha_q"));
  m.def("periodogram", [](const std::vector<double>& counts) {
    std::vector<double> freq, power;
    for (const auto& p : periodogram(counts)) {
      freq.push_back(p.frequency);
      power.push_back(p.power);
    }
    return py::make_tuple(freq, power);
  }, py::arg("hourly_counts"), "Returns (cycles per day, power).");
}
