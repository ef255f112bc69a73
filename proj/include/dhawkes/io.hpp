#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dhawkes/params.hpp"
#include "dhawkes/tree_data.hpp"

namespace dhawkes {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

/// Parameter files are JSON objects:
///   {"variant": "M4", "period_hours": 24, "cycles_per_period": [1, 2],
///    "alpha": [1, ...], "eta": [e1, e2], "mu": [m1, m2], "psi": [p1 | null, p2 | null]}
/// "alpha" may be omitted (flat activity), as may "psi" (Poisson offspring).
std::string params_to_json(const ModelParams& p);
ModelParams params_from_json(std::string_view text);

/// One immigrant time per row under a `time` header.
std::vector<double> read_seeds(std::istream& in);
void write_seeds(std::ostream& out, const std::vector<double>& seeds);

/// Whole-file helpers; throw std::runtime_error when a file cannot be opened.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

/// Reads a node CSV and builds windowed clusters.
ClusterSet load_clusters(const std::string& path, double window_hours = 48.0);

}  // namespace dhawkes
