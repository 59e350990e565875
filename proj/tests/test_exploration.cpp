#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lrp/errors.hpp"
#include "lrp/exploration.hpp"
#include "lrp/oracle.hpp"
#include "support.hpp"

using namespace lrp;
using lrp::testing::edge_id;
using lrp::testing::ScriptedMarks;

namespace {

const DifferenceSet kNoDelta;

}  // namespace

TEST_CASE("initialisation") {
  const auto k = Kernel::nearest_neighbour(2, 0.45);
  const RegionGraph g0(k, ball(2, 0));
  CHECK(g0.num_edges() == 0);
  CHECK(g0.tail_probability(0) == doctest::Approx(1 - std::pow(0.55, 4)));
  const RegionGraph g(k, ball(2, 5));
  for (std::uint32_t v = 0; v < g.num_vertices(); ++v) {
    const bool inner = g.region().vertex(v).l1() < 5;
    CHECK((g.tail_probability(v) == 0.0) == inner);
  }
  const FieldMarks m(g, MarkField(3));
  Exploration a(g, kNoDelta, 0.2, m), b(g, kNoDelta, 0.2, m);
  CHECK(a.is_active(g.origin()));
  CHECK(a.unexplored_count() == g.num_edges());
  CHECK(a.run().statuses == b.run().statuses);
}

TEST_CASE("isolated origin exhausts at once") {
  const auto k = Kernel::nearest_neighbour(2, 0.45);
  const RegionGraph g(k, ball(2, 3));
  ScriptedMarks m;
  for (auto id : g.out_edges(g.origin())) m.set(id, Channel::kU, 0.9);
  const auto r = Exploration(g, kNoDelta, 0.0, m, {AssertLevel::kFullTrace}).run();
  CHECK(r.termination == Termination::kExhausted);
  CHECK(r.explored_vertices() == std::vector<std::uint32_t>{g.origin()});
  for (auto id : g.out_edges(g.origin())) CHECK(r.statuses[id] == EdgeStatus::kClosedInG);
}

TEST_CASE("deterministic open path reaches T") {
  const auto k = Kernel::nearest_neighbour(2, 1.0);
  for (int n = 1; n <= 5; ++n) {
    CHECK(explore(k, kNoDelta, 0.3, n, MarkField(n)).termination == Termination::kReachedT);
  }
}

TEST_CASE("single stages") {
  // Z^1, n=2, nn kernel; Delta = {+-1} only where needed.
  const auto k = Kernel::nearest_neighbour(1, 0.5);
  const RegionGraph g(k, ball(1, 2));
  const auto o = g.origin();
  const auto e_right = edge_id(g, Vertex{0}, Vertex{1});
  const auto e_left = edge_id(g, Vertex{-1}, Vertex{0});

  SUBCASE("closed in G") {
    ScriptedMarks m;
    m.set(e_right, Channel::kPriority, 0.01);
    m.set(e_right, Channel::kU, 0.7);
    Exploration ex(g, kNoDelta, 0.0, m);
    ex.step();
    CHECK(ex.status(e_right) == EdgeStatus::kClosedInG);
    CHECK(ex.is_active(o));
    CHECK(!ex.is_active(static_cast<std::uint32_t>(g.region().index_of(Vertex{1}))));
  }
  SUBCASE("Delta edge closed by the W mark") {
    const DifferenceSet delta(Orientation::kUndirected, {Vertex{1}, Vertex{-1}});
    ScriptedMarks m;
    m.set(e_right, Channel::kPriority, 0.01);
    m.set(e_right, Channel::kU, 0.2);
    m.set(e_right, Channel::kW, 0.95);
    Exploration ex(g, delta, 0.1, m);
    ex.step();
    CHECK(ex.status(e_right) == EdgeStatus::kClosedInHByStep5);
    CHECK(!ex.is_active(static_cast<std::uint32_t>(g.region().index_of(Vertex{1}))));
  }
  SUBCASE("both endpoints active") {
    // Triangle-free in Z^1 nn, so use range-2 kernel: o-1, o-2, 1-2.
    const auto k2 = Kernel::table(1, Orientation::kUndirected, {{Vertex{1}, 0.5}, {Vertex{2}, 0.5}});
    const RegionGraph g2(k2, ball(1, 2));
    const auto a = edge_id(g2, Vertex{0}, Vertex{1});
    const auto b = edge_id(g2, Vertex{0}, Vertex{2});
    const auto c = edge_id(g2, Vertex{1}, Vertex{2});
    ScriptedMarks m;
    for (std::size_t id = 0; id < g2.num_edges(); ++id) m.set(id, Channel::kU, 0.9);
    m.set(a, Channel::kPriority, 0.01);
    m.set(b, Channel::kPriority, 0.02);
    m.set(c, Channel::kPriority, 0.03);
    m.set(a, Channel::kU, 0.1);
    m.set(b, Channel::kU, 0.1);
    m.set(c, Channel::kU, 0.1);
    Exploration ex(g2, kNoDelta, 0.0, m);
    ex.step();  // a: F-check at 1 reveals 1-2 open (fail), 1 active
    CHECK(ex.status(a) == EdgeStatus::kOpenInH);
    CHECK(ex.status(c) == EdgeStatus::kOpenInG);
    ex.step();  // b: 0-2 ... far endpoint 2 inactive
    ex.step();
    // c now has both endpoints active: explored without a reveal
    const auto before = ex.status(c);
    while (ex.in_unexplored(c) && !ex.terminated()) ex.step();
    CHECK(ex.status(c) == before);
  }
}

TEST_CASE("f_check") {
  const auto k = Kernel::nearest_neighbour(1, 0.5);
  const RegionGraph g(k, ball(1, 3));
  const auto v1 = static_cast<std::uint32_t>(g.region().index_of(Vertex{1}));
  const auto e01 = edge_id(g, Vertex{0}, Vertex{1});
  const auto e12 = edge_id(g, Vertex{1}, Vertex{2});

  SUBCASE("empty neighbourhood passes") {
    ScriptedMarks m;
    Exploration ex(g, kNoDelta, 0.0, m);
    ex.activate_for_test(static_cast<std::uint32_t>(g.region().index_of(Vertex{2})));
    CHECK(ex.f_check(static_cast<std::uint32_t>(e01), v1));
  }
  SUBCASE("closed marks pass and leave L") {
    ScriptedMarks m;
    m.set(e12, Channel::kU, 0.8);
    Exploration ex(g, kNoDelta, 0.0, m);
    CHECK(ex.f_check(static_cast<std::uint32_t>(e01), v1));
    CHECK(!ex.in_unexplored(static_cast<std::uint32_t>(e12)));
    CHECK(ex.status(static_cast<std::uint32_t>(e12)) == EdgeStatus::kClosedInG);
  }
  SUBCASE("one open mark fails and enters E") {
    ScriptedMarks m;
    m.set(e12, Channel::kU, 0.2);
    Exploration ex(g, kNoDelta, 0.0, m);
    CHECK(!ex.f_check(static_cast<std::uint32_t>(e01), v1));
    CHECK(ex.in_unexplored(static_cast<std::uint32_t>(e12)));
    CHECK(ex.status(static_cast<std::uint32_t>(e12)) == EdgeStatus::kOpenInG);
  }
}

TEST_CASE("s_check") {
  const auto k = Kernel::nearest_neighbour(1, 0.5);
  const RegionGraph g(k, ball(1, 3));
  const auto v1 = static_cast<std::uint32_t>(g.region().index_of(Vertex{1}));
  const auto e01 = static_cast<std::uint32_t>(edge_id(g, Vertex{0}, Vertex{1}));
  const DifferenceSet delta(Orientation::kUndirected, {Vertex{1}, Vertex{-1}});
  ScriptedMarks m;
  SUBCASE("empty neighbourhood tags") {
    Exploration ex(g, kNoDelta, 0.5, m);
    CHECK(ex.s_check(e01, v1));
    CHECK(ex.is_boundary(v1));
  }
  SUBCASE("q = 0 never tags") {
    Exploration ex(g, delta, 0.0, m);
    CHECK(!ex.s_check(e01, v1));
    CHECK(ex.is_active(v1));
  }
  SUBCASE("q = 1 always tags") {
    Exploration ex(g, delta, 1.0, m);
    CHECK(ex.s_check(e01, v1));
    for (auto id : g.out_edges(v1)) CHECK(!ex.in_unexplored(id));
  }
}

TEST_CASE("exploration equals BFS without Delta") {
  const auto k = Kernel::nearest_neighbour(2, 0.45);
  const RegionGraph g(k, ball(2, 6));
  ExplorationOptions opt;
  opt.stop_at_boundary = false;
  opt.asserts = AssertLevel::kLemmaChecks;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const FieldMarks m(g, MarkField(seed));
    const auto r = Exploration(g, kNoDelta, 0.37, m, opt).run();
    const auto bfs = bfs_cluster(g, m);
    REQUIRE(r.explored_vertices() == bfs.vertices);
    CHECK(r.boundary_reached == bfs.reaches_boundary);
    // Discovery edges are open in G_J and cover the cluster as a tree.
    std::size_t h = 0;
    for (std::size_t id = 0; id < g.num_edges(); ++id) {
      if (r.statuses[id] == EdgeStatus::kOpenInH || r.statuses[id] == EdgeStatus::kTagged) {
        ++h;
        CHECK(std::binary_search(bfs.edges.begin(), bfs.edges.end(), static_cast<std::uint32_t>(id)));
      }
    }
    CHECK(h + 1 == bfs.vertices.size());
  }
}

TEST_CASE("q = 1 removes every Delta edge from H") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 2;
    const auto j = lrp::testing::random_table(rng, d);
    const auto jp = lrp::testing::random_perturbation(rng, j);
    const auto delta = delta_of(j, jp);
    const int n = 2 + trial % 4;
    const RegionGraph g(j, ball(d, n));
    const FieldMarks m(g, MarkField(trial));
    const auto r = Exploration(g, delta, 1.0, m, {AssertLevel::kLemmaChecks, false}).run();
    const auto cluster_off = cluster_of(g, [&](std::uint32_t id) {
      return !delta.contains(g.displacement(id)) && m.edge_mark(id, Channel::kU) <= g.edge(id).j;
    });
    for (std::size_t id = 0; id < g.num_edges(); ++id) {
      if (delta.contains(g.displacement(id))) {
        const auto s = r.statuses[id];
        const bool ok = s == EdgeStatus::kUnseen || s == EdgeStatus::kClosedInG || s == EdgeStatus::kClosedInHByStep5;
        CHECK(ok);
      }
    }
    const auto c = r.untagged_cluster(g);
    CHECK(std::includes(cluster_off.begin(), cluster_off.end(), c.begin(), c.end()));
  }
}

TEST_CASE("randomized runs satisfy the consistency checks") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uq(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int d = 1 + trial % 2;
    const auto j = lrp::testing::random_table(rng, d);
    const auto jp = lrp::testing::random_perturbation(rng, j);
    const auto delta = delta_of(j, jp);
    const int n = 1 + trial % 6;
    const double q = trial % 7 == 0 ? 0.0 : uq(rng);
    ExplorationOptions opt{AssertLevel::kFullTrace, trial % 2 == 0};
    const auto r = explore(j, delta, q, n, MarkField(1000 + trial), opt);
    CHECK(r.termination != Termination::kRunning);
    CHECK(!r.trace.empty());
    const RegionGraph g(j, ball(d, n));
    CHECK(r.stages <= g.num_edges() + g.num_vertices());
    // Tag-leaf: tagged vertices touch exactly one H edge.
    for (auto v : r.tagged_vertices) {
      int deg = 0;
      for (auto id : g.out_edges(v)) {
        const bool h = r.statuses[id] == EdgeStatus::kOpenInH || r.statuses[id] == EdgeStatus::kTagged;
        deg += h;
      }
      CHECK(deg == 1);
    }
    std::vector<std::uint32_t> inter;
    std::set_intersection(r.active.begin(), r.active.end(), r.boundary.begin(), r.boundary.end(),
                          std::back_inserter(inter));
    CHECK(inter.empty());
  }
}

TEST_CASE("edge marginal when explored") {
  const auto k = Kernel::nearest_neighbour(2, 0.45);
  const RegionGraph g(k, ball(2, 2));
  const auto e = edge_id(g, Vertex{0, 0}, Vertex{1, 0});
  int explored = 0, open = 0;
  for (std::uint64_t s = 0; s < 20000; ++s) {
    const FieldMarks m(g, MarkField(s));
    const auto r = Exploration(g, kNoDelta, 0.0, m, {AssertLevel::kOff, false}).run();
    if (r.statuses[e] == EdgeStatus::kUnseen) continue;
    ++explored;
    open += r.statuses[e] != EdgeStatus::kClosedInG;
  }
  const double p = open / double(explored);
  CHECK(std::abs(p - 0.45) < 4 * std::sqrt(0.45 * 0.55 / explored));
}

TEST_CASE("trace export") {
  const auto k = Kernel::nearest_neighbour(2, 0.45);
  const RegionGraph g(k, ball(2, 2));
  const FieldMarks m(g, MarkField(9));
  const auto r = Exploration(g, kNoDelta, 0.0, m, {AssertLevel::kFullTrace}).run();
  std::ostringstream os;
  write_trace(os, g, r.trace);
  const std::string text = os.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(r.trace.size()));
}

TEST_CASE("assert level parsing") {
  CHECK(parse_assert_level("off") == AssertLevel::kOff);
  CHECK(parse_assert_level("lemma-checks") == AssertLevel::kLemmaChecks);
  CHECK(parse_assert_level("full-trace") == AssertLevel::kFullTrace);
  CHECK_THROWS_AS(parse_assert_level("loud"), Error);
}
