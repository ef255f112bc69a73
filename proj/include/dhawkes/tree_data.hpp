#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dhawkes {

/// One row of a discussion corpus. Times are hours since the corpus epoch.
struct Node {
  std::string id;
  double time = 0.0;
  std::optional<std::string> parent_id;  // empty for posts (immigrants)

  bool operator==(const Node&) const = default;
};

/// A single discussion tree observed on [times[0], window_end).
///
/// `parents` uses the 1-based branching convention: parents[0] == 0 marks the
/// immigrant and parents[k] == j means point j-1 (0-based) is the parent of
/// point k. Times are strictly increasing.
struct Cluster {
  std::vector<double> times;
  std::vector<std::size_t> parents;
  double window_end = 0.0;

  std::size_t size() const { return times.size(); }
  double immigrant_time() const { return times.front(); }

  bool operator==(const Cluster&) const = default;
};

struct ClusterSet {
  std::vector<Cluster> clusters;
  std::string epoch_label;

  std::size_t size() const { return clusters.size(); }
  bool empty() const { return clusters.empty(); }

  bool operator==(const ClusterSet&) const = default;
};

/// Input data problem: malformed rows, broken links, invalid clusters.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& message, std::size_t line = 0);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Throws DataError when the cluster invariants do not hold.
void validate(const Cluster& cluster);

/// Parses `id,time,parent_id` CSV (header required). Row order is preserved.
std::vector<Node> parse_nodes(std::istream& in);

/// Writes nodes in the format read by parse_nodes. Ids are `<cluster>_<point>`.
void write_nodes(std::ostream& out, const ClusterSet& set);

/// Groups nodes into one cluster per post, truncated to
/// [t_post, t_post + window_hours). Clusters are ordered by immigrant time.
ClusterSet build_clusters(std::span<const Node> nodes, double window_hours = 48.0);

/// Half-open time interval [begin, end) in hours.
struct TimeInterval {
  double begin = 0.0;
  double end = 0.0;
  bool contains(double t) const { return t >= begin && t < end; }
};

/// Samples round(frac * pool) clusters whose immigrant lies in each period.
/// Test clusters are drawn from the test pool after removing the training
/// draw, so no cluster appears in both outputs.
std::pair<ClusterSet, ClusterSet> split_train_test(const ClusterSet& set, double train_frac,
                                                   std::uint64_t seed, TimeInterval train_period,
                                                   TimeInterval test_period);

/// z_j: number of direct replies of each point.
std::vector<std::size_t> offspring_counts(const Cluster& cluster);

/// Node counts per wall-clock hour, starting at floor(earliest time).
struct HourlySeries {
  std::int64_t first_hour = 0;
  std::vector<std::int64_t> counts;
};

HourlySeries hourly_counts(const ClusterSet& set);

}  // namespace dhawkes
