#include "dhawkes/tree_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "dhawkes/io.hpp"
#include "dhawkes/rng.hpp"

namespace dhawkes {

namespace {

constexpr double kTieShift = 1e-9;

std::string line_message(const std::string& message, std::size_t line) {
  return line == 0 ? message : "line " + std::to_string(line) + ": " + message;
}

void strip_cr(std::string& s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
}

// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_record(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back().push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back().push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back();
    } else {
      fields.back().push_back(ch);
    }
  }
  if (quoted) throw DataError("unterminated quoted field", line_no);
  return fields;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

}  // namespace

DataError::DataError(const std::string& message, std::size_t line)
    : std::runtime_error(line_message(message, line)), line_(line) {}

void validate(const Cluster& c) {
  const std::size_t n = c.times.size();
  if (n == 0) throw DataError("cluster has no points");
  if (c.parents.size() != n) throw DataError("times and parents differ in length");
  if (c.parents[0] != 0) throw DataError("first point must be the immigrant (parent 0)");
  if (!std::isfinite(c.window_end) || !(c.window_end > c.times[0]))
    throw DataError("window end must exceed the immigrant time");
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(c.times[k])) throw DataError("non-finite event time");
    if (!(c.times[k] < c.window_end)) throw DataError("event at or after the window end");
    if (k == 0) continue;
    if (!(c.times[k] > c.times[k - 1])) throw DataError("event times must be strictly increasing");
    const std::size_t parent = c.parents[k];
    if (parent < 1 || parent > k) throw DataError("parent index must precede its child");
  }
}

std::vector<Node> parse_nodes(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("missing header", 1);
  strip_cr(line);
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  {
    const auto header = split_record(line, 1);
    if (header.size() != 3 || trim(header[0]) != "id" || trim(header[1]) != "time" ||
        trim(header[2]) != "parent_id")
      throw DataError("expected header id,time,parent_id", 1);
  }

  std::vector<Node> nodes;
  std::unordered_map<std::string, std::size_t> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (trim(line).empty()) continue;
    auto fields = split_record(line, line_no);
    if (fields.size() != 3) throw DataError("expected 3 fields", line_no);
    Node node;
    node.id = trim(fields[0]);
    if (node.id.empty()) throw DataError("empty id", line_no);
    const std::string time_text = trim(fields[1]);
    const char* first = time_text.data();
    const char* last = first + time_text.size();
    const auto [ptr, ec] = std::from_chars(first, last, node.time);
    if (ec != std::errc() || ptr != last || time_text.empty())
      throw DataError("malformed time '" + time_text + "'", line_no);
    if (!std::isfinite(node.time)) throw DataError("non-finite time", line_no);
    if (node.time < 0.0) throw DataError("negative time", line_no);
    std::string parent = trim(fields[2]);
    if (!parent.empty()) node.parent_id = std::move(parent);
    if (!seen.emplace(node.id, line_no).second) throw DataError("duplicate id '" + node.id + "'", line_no);
    nodes.push_back(std::move(node));
  }
  return nodes;
}

void write_nodes(std::ostream& out, const ClusterSet& set) {
  out << "id,time,parent_id\n";
  for (std::size_t i = 0; i < set.clusters.size(); ++i) {
    const Cluster& c = set.clusters[i];
    const std::string prefix = "c" + std::to_string(i) + "_";
    for (std::size_t k = 0; k < c.size(); ++k) {
      out << prefix << k << ',' << format_double(c.times[k]) << ',';
      if (c.parents[k] != 0) out << prefix << (c.parents[k] - 1);
      out << '\n';
    }
  }
}

ClusterSet build_clusters(std::span<const Node> nodes, double window_hours) {
  if (!(window_hours > 0.0) || !std::isfinite(window_hours))
    throw std::invalid_argument("window_hours must be positive and finite");
  const std::size_t n = nodes.size();
  std::unordered_map<std::string_view, std::size_t> index;
  index.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!index.emplace(nodes[i].id, i).second) throw DataError("duplicate id '" + nodes[i].id + "'");
  }

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(n, kNone);
  for (std::size_t i = 0; i < n; ++i) {
    if (!nodes[i].parent_id) continue;
    const auto it = index.find(*nodes[i].parent_id);
    if (it == index.end())
      throw DataError("node '" + nodes[i].id + "' refers to missing parent '" + *nodes[i].parent_id + "'");
    parent[i] = it->second;
    if (nodes[i].time < nodes[it->second].time)
      throw DataError("node '" + nodes[i].id + "' is earlier than its parent");
  }

  // Resolve each node's root and depth; a walk that revisits an in-progress
  // node has found a cycle.
  std::vector<std::size_t> root(n, kNone), depth(n, 0);
  std::vector<char> state(n, 0);
  std::vector<std::size_t> path;
  for (std::size_t start = 0; start < n; ++start) {
    if (state[start] == 2) continue;
    path.clear();
    std::size_t cur = start;
    while (cur != kNone && state[cur] == 0) {
      state[cur] = 1;
      path.push_back(cur);
      cur = parent[cur];
    }
    if (cur != kNone && state[cur] == 1) throw DataError("reply links contain a cycle at '" + nodes[cur].id + "'");
    std::size_t r = cur == kNone ? path.back() : root[cur];
    std::size_t d = cur == kNone ? 0 : depth[cur] + 1;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      const std::size_t node = *it;
      root[node] = r;
      if (parent[node] == kNone) {
        depth[node] = 0;
        d = 1;
      } else {
        depth[node] = d++;
      }
      state[node] = 2;
    }
  }

  std::vector<std::size_t> roots;
  std::unordered_map<std::size_t, std::size_t> cluster_of_root;
  for (std::size_t i = 0; i < n; ++i) {
    if (parent[i] == kNone) {
      cluster_of_root.emplace(i, roots.size());
      roots.push_back(i);
    }
  }
  std::vector<std::vector<std::size_t>> members(roots.size());
  for (std::size_t i = 0; i < n; ++i) members[cluster_of_root.at(root[i])].push_back(i);

  ClusterSet set;
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t ci = 0; ci < roots.size(); ++ci) {
    auto& m = members[ci];
    std::sort(m.begin(), m.end(), [&](std::size_t a, std::size_t b) {
      if (nodes[a].time != nodes[b].time) return nodes[a].time < nodes[b].time;
      if (depth[a] != depth[b]) return depth[a] < depth[b];
      return a < b;
    });
    std::vector<double> times(m.size());
    for (std::size_t k = 0; k < m.size(); ++k) {
      times[k] = nodes[m[k]].time;
      if (k > 0 && times[k] <= times[k - 1]) times[k] = times[k - 1] + kTieShift;
    }
    Cluster c;
    c.window_end = times[0] + window_hours;
    std::unordered_map<std::size_t, std::size_t> position;  // node -> 1-based position
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (!(times[k] < c.window_end)) continue;
      std::size_t parent_pos = 0;
      if (k > 0) {
        const auto it = position.find(parent[m[k]]);
        if (it == position.end()) continue;  // parent fell outside the window
        parent_pos = it->second;
      }
      c.times.push_back(times[k]);
      c.parents.push_back(parent_pos);
      position.emplace(m[k], c.times.size());
    }
    set.clusters.push_back(std::move(c));
    order.emplace_back(times[0], roots[ci]);
  }

  std::vector<std::size_t> perm(set.clusters.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return nodes[order[a].second].time != nodes[order[b].second].time
               ? nodes[order[a].second].time < nodes[order[b].second].time
               : nodes[order[a].second].id < nodes[order[b].second].id;
  });
  ClusterSet sorted;
  sorted.clusters.reserve(perm.size());
  for (std::size_t i : perm) sorted.clusters.push_back(std::move(set.clusters[i]));
  return sorted;
}

std::pair<ClusterSet, ClusterSet> split_train_test(const ClusterSet& set, double train_frac,
                                                   std::uint64_t seed, TimeInterval train_period,
                                                   TimeInterval test_period) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw std::invalid_argument("train_frac must lie in (0, 1)");
  std::vector<std::size_t> train_pool, test_pool;
  for (std::size_t i = 0; i < set.clusters.size(); ++i) {
    const double t1 = set.clusters[i].immigrant_time();
    if (train_period.contains(t1)) train_pool.push_back(i);
    if (test_period.contains(t1)) test_pool.push_back(i);
  }
  if (train_pool.empty()) throw DataError("no clusters in the training period");
  if (test_pool.empty()) throw DataError("no clusters in the test period");

  Rng rng = Rng::derive(seed, {0x5b1u});
  auto draw = [&rng](std::vector<std::size_t> pool, std::size_t k) {
    k = std::min(k, pool.size());
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
  };

  const auto train_count = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(train_pool.size())));
  const auto test_count = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(test_pool.size())));
  const auto train_idx = draw(train_pool, std::max<std::size_t>(train_count, 1));
  std::vector<std::size_t> remaining;
  std::set_difference(test_pool.begin(), test_pool.end(), train_idx.begin(), train_idx.end(),
                      std::back_inserter(remaining));
  if (remaining.empty()) throw DataError("test pool is empty after removing training clusters");
  const auto test_idx = draw(remaining, std::max<std::size_t>(test_count, 1));

  ClusterSet train{{}, set.epoch_label}, test{{}, set.epoch_label};
  for (std::size_t i : train_idx) train.clusters.push_back(set.clusters[i]);
  for (std::size_t i : test_idx) test.clusters.push_back(set.clusters[i]);
  return {std::move(train), std::move(test)};
}

std::vector<std::size_t> offspring_counts(const Cluster& c) {
  std::vector<std::size_t> z(c.size(), 0);
  for (std::size_t k = 1; k < c.size(); ++k) ++z[c.parents[k] - 1];
  return z;
}

HourlySeries hourly_counts(const ClusterSet& set) {
  if (set.empty()) throw std::invalid_argument("hourly_counts needs a nonempty set");
  double lo = set.clusters.front().times.front();
  double hi = lo;
  for (const auto& c : set.clusters) {
    lo = std::min(lo, c.times.front());
    hi = std::max(hi, c.times.back());
  }
  HourlySeries series;
  series.first_hour = static_cast<std::int64_t>(std::floor(lo));
  const auto last_hour = static_cast<std::int64_t>(std::floor(hi));
  series.counts.assign(static_cast<std::size_t>(last_hour - series.first_hour + 1), 0);
  for (const auto& c : set.clusters)
    for (double t : c.times) ++series.counts[static_cast<std::size_t>(static_cast<std::int64_t>(std::floor(t)) - series.first_hour)];
  return series;
}

}  // namespace dhawkes
