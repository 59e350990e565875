#include <cmath>

#include "doctest.h"
#include "lrp/errors.hpp"
#include "lrp/kernel.hpp"

using namespace lrp;

namespace {

Kernel line(double j1) { return Kernel::nearest_neighbour(1, j1); }

}  // namespace

TEST_CASE("kernel values") {
  CHECK(line(0.5).value(Vertex{1}) == 0.5);
  CHECK(line(0.5).value(Vertex{-1}) == 0.5);
  CHECK(Kernel::polynomial_phi(1, Orientation::kUndirected, 0.0, 3.0).value(Vertex{5}) == 0.0);
  const double v = Kernel::polynomial_phi(1, Orientation::kUndirected, 1.0, 3.0).value(Vertex{2});
  CHECK(v == doctest::Approx(0.1175030974).epsilon(1e-10));
  CHECK_THROWS_AS(line(0.5).value(Vertex{0}), Error);
}

TEST_CASE("undirected kernels are symmetric") {
  const auto k = Kernel::table(2, Orientation::kUndirected, {{Vertex{1, 2}, 0.3}, {Vertex{0, 1}, 0.1}});
  for (int x = -3; x <= 3; ++x) {
    for (int y = -3; y <= 3; ++y) {
      if (x == 0 && y == 0) continue;
      CHECK(k.value(Vertex{x, y}) == k.value(Vertex{-x, -y}));
    }
  }
  CHECK_THROWS_AS(Kernel::table(1, Orientation::kUndirected, {{Vertex{1}, 0.3}, {Vertex{-1}, 0.2}}), Error);
}

TEST_CASE("balls") {
  CHECK(ball(1, 0).size() == 1);
  CHECK(ball(2, 1).size() == 5);
  CHECK(ball(2, 3).size() == 25);
  for (int n = 0; n <= 8; ++n) {
    const auto b = ball(2, n);
    CHECK(b.size() == static_cast<std::size_t>(2 * n * n + 2 * n + 1));
    for (const auto& v : b.vertices()) CHECK(ball(2, n + 1).contains(v));
    CHECK(std::is_sorted(b.vertices().begin(), b.vertices().end()));
  }
}

TEST_CASE("potential edges") {
  CHECK(potential_edges(ball(1, 1), line(0.5)).size() == 2);
  CHECK(potential_edges(ball(2, 1), Kernel::nearest_neighbour(2, 0.5)).size() == 4);
  const auto k = Kernel::table(1, Orientation::kUndirected, {{Vertex{1}, 0.2}, {Vertex{2}, 0.1}});
  const auto e = potential_edges(ball(1, 2), k);
  CHECK(e.size() == 7);
  CHECK(e == potential_edges(ball(1, 2), k));
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = i + 1; j < e.size(); ++j) CHECK(!(e[i] == e[j]));
  }
}

TEST_CASE("delta_of") {
  const auto j = line(0.5);
  const auto d = delta_of(j, j.with_overrides({{Vertex{1}, 0.25}}));
  CHECK(d.size() == 2);
  CHECK(d.contains(Vertex{1}));
  CHECK(d.contains(Vertex{-1}));
  auto kind = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kDomain;
  };
  CHECK(kind([&] { delta_of(j, j); }) == ErrorKind::kEmptyDelta);
  CHECK(kind([&] { delta_of(j, j.with_overrides({{Vertex{1}, 0.6}})); }) == ErrorKind::kOrderViolation);
  const auto phi = Kernel::polynomial_phi(1, Orientation::kUndirected, 1.0, 3.0);
  CHECK(kind([&] { delta_of(phi, Kernel::polynomial_phi(1, Orientation::kUndirected, 0.9, 3.0)); }) ==
        ErrorKind::kInfiniteDelta);
  CHECK(delta_of(phi, phi.with_overrides({{Vertex{3}, 0.0}})).size() == 2);
}

TEST_CASE("tail_open_probability") {
  const auto k = Kernel::nearest_neighbour(1, 0.5);
  CHECK(tail_open_probability(k, ball(1, 3), Vertex{3}) == 0.5);
  CHECK(tail_open_probability(k, ball(1, 3), Vertex{0}) == 0.0);
  const auto k2 = Kernel::nearest_neighbour(2, 0.5);
  CHECK(tail_open_probability(k2, ball(2, 3), Vertex{3, 0}) == doctest::Approx(0.875).epsilon(1e-15));
  CHECK(tail_open_probability(Kernel::nearest_neighbour(2, 1.0), ball(2, 2), Vertex{2, 0}) == 1.0);
}

TEST_CASE("tail probability monotone in n and kernel") {
  const auto phi = Kernel::polynomial_phi(1, Orientation::kUndirected, 0.5, 2.5);
  const auto big = Kernel::polynomial_phi(1, Orientation::kUndirected, 0.8, 2.5);
  double prev = 1.0;
  for (int n = 0; n <= 6; ++n) {
    const double t = tail_open_probability(phi, ball(1, n), Vertex{0});
    CHECK(t <= prev + 1e-12);
    CHECK(t <= tail_open_probability(big, ball(1, n), Vertex{0}) + 1e-12);
    prev = t;
  }
  const auto iv = tail_open_interval(phi, ball(1, 2), Vertex{0});
  CHECK(iv.lo <= iv.hi);
}

TEST_CASE("log_survival_product") {
  const auto k = Kernel::nearest_neighbour(1, 0.5);
  CHECK(log_survival_product(k, DifferenceSet(Orientation::kUndirected, {Vertex{1}, Vertex{-1}})).value == 1.0);
  const auto k2 = Kernel::nearest_neighbour(2, 0.3);
  const auto s = log_survival_product(k2, DifferenceSet(Orientation::kUndirected, {Vertex{1, 0}, Vertex{-1, 0}}));
  CHECK(s.value == doctest::Approx(0.49).epsilon(1e-14));
  const auto one = Kernel::table(1, Orientation::kUndirected, {{Vertex{1}, 0.5}, {Vertex{2}, 1.0}});
  try {
    log_survival_product(one, DifferenceSet(Orientation::kUndirected, {Vertex{1}, Vertex{-1}}));
    FAIL("expected ZeroProduct");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kZeroProduct);
  }
  // Infinite support: a positive lower bound below the truncated product.
  const auto phi = Kernel::polynomial_phi(1, Orientation::kUndirected, 0.5, 3.0);
  const auto b = log_survival_product(phi, DifferenceSet(Orientation::kUndirected, {Vertex{1}, Vertex{-1}}));
  CHECK(b.value > 0.0);
  double truncated = 1.0;
  for (int z = 2; z <= 50; ++z) truncated *= std::pow(1.0 - phi.value(Vertex{z}), 2);
  CHECK(b.value <= truncated);
  CHECK(b.value >= truncated * std::exp(-1e-3));
}
