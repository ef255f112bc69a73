#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "dhawkes/tree_data.hpp"

using namespace dhawkes;

namespace {

std::vector<Node> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_nodes(in);
}

ClusterSet build(const std::string& text, double window = 48.0) {
  const auto nodes = parse(text);
  return build_clusters(nodes, window);
}

}  // namespace

TEST_CASE("parse_nodes reads rows in order") {
  const auto nodes = parse("id,time,parent_id\na,0.0,\nb,1.5,a\n");
  REQUIRE(nodes.size() == 2);
  CHECK(nodes[0] == Node{"a", 0.0, std::nullopt});
  CHECK(nodes[1] == Node{"b", 1.5, std::string("a")});
}

TEST_CASE("parse_nodes on header only") { CHECK(parse("id,time,parent_id\n").empty()); }

TEST_CASE("parse_nodes accepts dangling parents; build_clusters rejects them") {
  const auto nodes = parse("id,time,parent_id\na,0,\nc,2.0,zzz\n");
  CHECK(nodes.size() == 2);
  CHECK_THROWS_AS(build_clusters(nodes), DataError);
}

TEST_CASE("parse_nodes errors carry line numbers") {
  auto line_of = [](const std::string& text) {
    try {
      parse(text);
    } catch (const DataError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(line_of("id,time,parent_id\na,0,\nb,xyz,a\n") == 3);
  CHECK(line_of("id,time,parent_id\na,0,\nb,1\n") == 3);
  CHECK(line_of("id,time,parent_id\na,0,\na,1,\n") == 3);
  CHECK(line_of("id,time,parent_id\na,-1,\n") == 2);
  CHECK(line_of("name,t\n") == 1);
}

TEST_CASE("build_clusters groups replies under their post") {
  auto set = build("id,time,parent_id\np,10,\nr1,11,p\nr2,12,p\n");
  REQUIRE(set.size() == 1);
  CHECK(set.clusters[0].parents == std::vector<std::size_t>{0, 1, 1});
  CHECK(set.clusters[0].window_end == doctest::Approx(58.0));

  set = build("id,time,parent_id\np,10,\nr1,11,p\nr2,12,r1\n");
  CHECK(set.clusters[0].parents == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("replies past the window are dropped with their descendants") {
  const auto set = build("id,time,parent_id\np,0,\nlate,49,p\nlater,49.5,late\nok,47,p\n");
  REQUIRE(set.size() == 1);
  CHECK(set.clusters[0].size() == 2);
  CHECK(set.clusters[0].times == std::vector<double>{0.0, 47.0});
}

TEST_CASE("lone post is a singleton cluster") {
  const auto set = build("id,time,parent_id\np,3,\n");
  REQUIRE(set.size() == 1);
  CHECK(set.clusters[0].parents == std::vector<std::size_t>{0});
}

TEST_CASE("build_clusters rejects cycles and replies earlier than parents") {
  CHECK_THROWS_AS(build("id,time,parent_id\np,0,\na,1,b\nb,1,a\n"), DataError);
  CHECK_THROWS_AS(build("id,time,parent_id\np,5,\na,1,p\n"), DataError);
}

TEST_CASE("tied times are separated in input order") {
  const auto set = build("id,time,parent_id\np,0,\na,1,p\nb,1,p\n");
  const auto& c = set.clusters[0];
  REQUIRE(c.size() == 3);
  CHECK(c.times[1] == 1.0);
  CHECK(c.times[2] == doctest::Approx(1.0 + 1e-9).epsilon(1e-15));
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("round trip through the node format") {
  const auto set = build(
      "id,time,parent_id\np,0.25,\na,1.125,p\nb,3.5,a\nq,7.75,\nc,8,q\nd,8,q\n");
  std::ostringstream out;
  write_nodes(out, set);
  CHECK(build(out.str()) == set);
}

TEST_CASE("build_clusters ignores row order") {
  std::vector<std::string> rows{"p,0,", "a,1,p", "b,2,a", "c,2.5,p", "q,3,", "d,4,q", "e,30,d"};
  const auto reference = build("id,time,parent_id\n" + [&] {
    std::string s;
    for (auto& r : rows) s += r + "\n";
    return s;
  }());
  std::mt19937 g(3);
  for (int rep = 0; rep < 20; ++rep) {
    std::shuffle(rows.begin(), rows.end(), g);
    std::string s = "id,time,parent_id\n";
    for (auto& r : rows) s += r + "\n";
    CHECK(build(s) == reference);
  }
}

TEST_CASE("retained comments equal the sum of n - 1") {
  const auto set = build("id,time,parent_id\np,0,\na,1,p\nb,60,p\nq,2,\nc,3,q\nd,4,c\n");
  std::size_t replies = 0;
  for (const auto& c : set.clusters) replies += c.size() - 1;
  CHECK(replies == 3);
}

TEST_CASE("offspring_counts") {
  auto z = [](std::vector<std::size_t> beta) {
    Cluster c;
    for (std::size_t i = 0; i < beta.size(); ++i) c.times.push_back(static_cast<double>(i));
    c.parents = beta;
    c.window_end = static_cast<double>(beta.size());
    return offspring_counts(c);
  };
  CHECK(z({0, 1, 1, 2}) == std::vector<std::size_t>{2, 1, 0, 0});
  CHECK(z({0}) == std::vector<std::size_t>{0});
  CHECK(z({0, 1, 1, 1, 1}) == std::vector<std::size_t>{4, 0, 0, 0, 0});
}

TEST_CASE("hourly_counts bins by clock hour with explicit zeros") {
  ClusterSet set;
  set.clusters.push_back(Cluster{{0.1, 0.9, 1.5}, {0, 1, 1}, 48.1});
  auto h = hourly_counts(set);
  CHECK(h.first_hour == 0);
  CHECK(h.counts == std::vector<std::int64_t>{2, 1});

  set.clusters.push_back(Cluster{{3.2}, {0}, 51.2});
  h = hourly_counts(set);
  CHECK(h.counts == std::vector<std::int64_t>{2, 1, 0, 1});
}

TEST_CASE("validate rejects broken clusters") {
  CHECK_THROWS_AS(validate(Cluster{{1.0, 0.5}, {0, 1}, 10.0}), DataError);
  CHECK_THROWS_AS(validate(Cluster{{1.0, 2.0}, {0, 2}, 10.0}), DataError);
  CHECK_THROWS_AS(validate(Cluster{{1.0, 2.0}, {0, 1}, 2.0}), DataError);
  CHECK_THROWS_AS(validate(Cluster{{1.0}, {1}, 2.0}), DataError);
  CHECK_NOTHROW(validate(Cluster{{1.0, 2.0}, {0, 1}, 2.5}));
}

TEST_CASE("split_train_test") {
  ClusterSet set;
  for (int i = 0; i < 200; ++i) set.clusters.push_back(Cluster{{i * 1.0}, {0}, i + 48.0});

  SUBCASE("disjoint and deterministic") {
    const auto [train, test] = split_train_test(set, 0.1, 7, {0, 120}, {80, 200});
    CHECK(train.size() == 12);
    CHECK(test.size() == 12);
    std::set<double> seen;
    for (const auto& c : train.clusters) seen.insert(c.times[0]);
    for (const auto& c : test.clusters) CHECK(seen.count(c.times[0]) == 0);
    const auto again = split_train_test(set, 0.1, 7, {0, 120}, {80, 200});
    CHECK(again.first == train);
    CHECK(again.second == test);
  }

  SUBCASE("two clusters split one and one") {
    ClusterSet two;
    two.clusters = {set.clusters[0], set.clusters[1]};
    const auto [train, test] = split_train_test(two, 0.5, 11, {0, 2}, {0, 2});
    CHECK(train.size() == 1);
    CHECK(test.size() == 1);
    CHECK(train.clusters[0] != test.clusters[0]);
  }

  SUBCASE("empty pools") {
    CHECK_THROWS_AS(split_train_test(set, 0.1, 1, {500, 600}, {0, 10}), DataError);
    CHECK_THROWS_AS(split_train_test(set, 0.1, 1, {0, 10}, {500, 600}), DataError);
    CHECK_THROWS(split_train_test(set, 1.5, 1, {0, 10}, {0, 10}));
  }
}
