#include <cmath>

#include "doctest.h"
#include "lrp/errors.hpp"
#include "lrp/montecarlo.hpp"
#include "lrp/oracle.hpp"

using namespace lrp;

namespace {

EnumerationSpec plain(const Kernel& j, int n) {
  return {j, std::nullopt, ball(j.dim(), n), std::nullopt, std::nullopt, CouplingMode::kConservative, std::nullopt};
}

}  // namespace

TEST_CASE("bfs cluster") {
  const auto k = Kernel::nearest_neighbour(2, 1.0);
  const auto c = bfs_cluster(k, 3, MarkField(1));
  CHECK(c.vertices.size() == ball(2, 3).size());
  CHECK(c.reaches_boundary);
  const RegionGraph g(Kernel::nearest_neighbour(2, 0.45), ball(2, 3));
  struct Closed final : MarkSource {
    double edge_mark(std::size_t, Channel) const override { return 0.99; }
    double vertex_mark(std::uint32_t) const override { return 0.99; }
  } closed;
  const auto iso = bfs_cluster(g, closed);
  CHECK(iso.vertices == std::vector<std::uint32_t>{g.origin()});
  CHECK(iso.edges.empty());
}

TEST_CASE("two fair edges") {
  const auto d = enumerate_exact(plain(Kernel::nearest_neighbour(1, 0.5), 1), Functional::kClusterSize);
  CHECK(std::abs(d.probability(1) - 0.25) < 1e-14);
  CHECK(std::abs(d.probability(2) - 0.5) < 1e-14);
  CHECK(std::abs(d.probability(3) - 0.25) < 1e-14);
  CHECK(std::abs(d.mean() - 2.0) < 1e-14);
  CHECK(std::abs(d.total() - 1.0) < 1e-12);
  CHECK(d.atoms == 4);
}

TEST_CASE("connection on a path") {
  auto spec = plain(Kernel::nearest_neighbour(1, 0.3), 2);
  spec.target = Vertex{2};
  const auto d = enumerate_exact(spec, Functional::kConnection);
  CHECK(std::abs(d.probability(1) - 0.09) < 1e-14);
}

TEST_CASE("exploration functionals") {
  const auto j = Kernel::nearest_neighbour(1, 0.5);
  const auto jp = j.with_overrides({{Vertex{1}, 1.0 / 16}});
  EnumerationSpec spec{j, jp, ball(1, 1), std::nullopt, std::nullopt, CouplingMode::kConservative, std::nullopt};
  const auto h = enumerate_exact(spec, Functional::kExplorationClusterSize);
  CHECK(std::abs(h.total() - 1.0) < 1e-12);
  CHECK(h.atoms == 2 * 12 * 12 * 4);
  const auto halo = enumerate_exact(spec, Functional::kExplorationHaloSize);
  CHECK(std::abs(halo.total() - 1.0) < 1e-12);
  // The halo contains C^H_o.
  for (std::size_t k = 1; k <= 3; ++k) CHECK(halo.cdf(k) <= h.cdf(k) + 1e-12);
}

TEST_CASE("size guard") {
  auto spec = plain(Kernel::nearest_neighbour(2, 0.5), 3);
  try {
    enumerate_exact(spec, Functional::kExplorationClusterSize);
    FAIL("expected a size error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSize);
  }
  CHECK(atom_count(plain(Kernel::nearest_neighbour(2, 0.5), 2), Functional::kClusterSize) == 65536.0);
}

TEST_CASE("exact domination") {
  const auto j = Kernel::nearest_neighbour(1, 0.5);
  SUBCASE("acceptance instance") {
    const auto r = exact_domination_check(j, j.with_overrides({{Vertex{1}, 1.0 / 16}}), ball(1, 1));
    CHECK(r.dominated);
    CHECK(r.p == doctest::Approx(0.75));
    // |C'_o|: each edge open w.p. J' = 1/16.
    const double a = 1.0 / 16;
    CHECK(std::abs(r.prime.probability(1) - (1 - a) * (1 - a)) < 1e-12);
    CHECK(std::abs(r.prime.probability(3) - a * a) < 1e-12);
    // Halo under pJ = 3/8 with J = 1/2: an edge counts iff U <= J; C_o only grows through U <= pJ.
    CHECK(std::abs(r.halo.probability(1) - 0.25) < 1e-12);
    CHECK(std::abs(r.halo.probability(3) - 0.25) < 1e-12);
  }
  SUBCASE("Delta covers the support with J' = 0") {
    const auto r = exact_domination_check(j, j.with_overrides({{Vertex{1}, 0.0}}), ball(1, 2));
    CHECK(r.dominated);
    CHECK(r.prime.probability(1) == doctest::Approx(1.0));
  }
  SUBCASE("corrupted p is detected") {
    const auto r = exact_domination_check(j, j.with_overrides({{Vertex{1}, 0.45}}), ball(1, 2), 0.1);
    CHECK(!r.dominated);
    REQUIRE(r.counterexample.has_value());
  }
}

TEST_CASE("montecarlo agrees with enumeration") {
  const auto j = Kernel::nearest_neighbour(1, 0.5);
  const auto exact = enumerate_exact(plain(j, 1), Functional::kClusterSize);
  const auto s = estimate_susceptibility(j, 1, 100000, 0);
  CHECK(std::abs(s.estimate - exact.mean()) < 4 * s.stderr_);
}
