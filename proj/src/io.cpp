#include "dhawkes/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dhawkes {

using nlohmann::json;

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), ptr);
}

std::string params_to_json(const ModelParams& p) {
  json j;
  j["variant"] = std::string(to_string(p.variant));
  j["period_hours"] = p.harmonic.period;
  j["cycles_per_period"] = p.harmonic.cycles;
  j["alpha"] = p.harmonic.coefficients;
  j["eta"] = p.eta;
  j["mu"] = p.mu;
  json psi = json::array();
  for (const auto& v : p.psi) psi.push_back(v ? json(*v) : json(nullptr));
  j["psi"] = psi;
  return j.dump(2) + "\n";
}

ModelParams params_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed parameter JSON: ") + e.what());
  }
  try {
    ModelParams p;
    p.variant = parse_variant(j.value("variant", std::string("custom")));
    p.harmonic.period = j.value("period_hours", 24.0);
    p.harmonic.cycles = j.value("cycles_per_period", std::vector<int>{});
    if (j.contains("alpha")) {
      p.harmonic.coefficients = j.at("alpha").get<std::vector<double>>();
    } else {
      p.harmonic.coefficients.assign(p.harmonic.basis_size(), 0.0);
      p.harmonic.coefficients[0] = 1.0;
    }
    p.eta = j.at("eta").get<std::array<double, 2>>();
    p.mu = j.at("mu").get<std::array<double, 2>>();
    if (j.contains("psi")) {
      const auto& psi = j.at("psi");
      if (!psi.is_array() || psi.size() != 2) throw std::invalid_argument("psi must be a two-element array");
      for (int l = 0; l < 2; ++l)
        if (!psi[l].is_null()) p.psi[l] = psi[l].get<double>();
    }
    validate(p);
    return p;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("invalid parameter JSON: ") + e.what());
  }
}

std::vector<double> read_seeds(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> seeds;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (line != "time") throw DataError("seed file header must be 'time'", line_no);
      header = true;
      continue;
    }
    double t = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), t);
    if (ec != std::errc() || ptr != line.data() + line.size() || !std::isfinite(t) || t < 0.0)
      throw DataError("malformed seed time '" + line + "'", line_no);
    seeds.push_back(t);
  }
  if (!header) throw DataError("empty seed file");
  return seeds;
}

void write_seeds(std::ostream& out, const std::vector<double>& seeds) {
  out << "time\n";
  for (double t : seeds) out << format_double(t) << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

ClusterSet load_clusters(const std::string& path, double window_hours) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  const auto nodes = parse_nodes(in);
  return build_clusters(nodes, window_hours);
}

}  // namespace dhawkes
