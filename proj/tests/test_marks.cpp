#include <cmath>
#include <set>

#include "doctest.h"
#include "lrp/marks.hpp"

using namespace lrp;

TEST_CASE("philox known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("open unit mapping excludes endpoints") {
  CHECK(to_open_unit(0) > 0.0);
  CHECK(to_open_unit(~std::uint64_t{0}) < 1.0);
}

TEST_CASE("marks are deterministic and canonical") {
  const MarkField f(42);
  const Vertex x{0, 0}, y{1, 0};
  const auto e = EdgeKey::undirected(x, y);
  CHECK(f.mark(e, Channel::kU) == f.mark(e, Channel::kU));
  CHECK(f.mark(EdgeKey::undirected(y, x), Channel::kU) == f.mark(e, Channel::kU));
  CHECK(f.endpoint_mark(EdgeKey::undirected(y, x), x) == f.endpoint_mark(e, x));
  CHECK(f.endpoint_mark(e, x) != f.endpoint_mark(e, y));
  CHECK(f.mark(e, Channel::kU) != f.mark(e, Channel::kW));
  CHECK(MarkField(43).mark(e, Channel::kU) != f.mark(e, Channel::kU));
  // Directed keys keep their order.
  CHECK(f.mark(EdgeKey::directed(x, y), Channel::kU) != f.mark(EdgeKey::directed(y, x), Channel::kU));
}

TEST_CASE("mark mean over a million edges") {
  const MarkField f(7);
  double sum = 0.0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) {
    const double u = f.mark(EdgeKey::undirected(Vertex{i, 0}, Vertex{i, 1}), Channel::kU);
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.002);
}

TEST_CASE("edge order") {
  const MarkField f(1);
  const std::vector<EdgeKey> one{EdgeKey::undirected(Vertex{0}, Vertex{1})};
  CHECK(edge_order(f, one) == one);
  const std::vector<EdgeKey> three{EdgeKey::undirected(Vertex{0}, Vertex{1}), EdgeKey::undirected(Vertex{-1}, Vertex{0}),
                                   EdgeKey::undirected(Vertex{1}, Vertex{2})};
  CHECK(edge_order(f, three) == edge_order(f, three));
  std::array<int, 3> first{};
  const int seeds = 10'000;
  for (int s = 0; s < seeds; ++s) {
    const auto o = edge_order(MarkField(s), three);
    for (int k = 0; k < 3; ++k) first[k] += o.front() == three[k];
  }
  for (int k = 0; k < 3; ++k) CHECK(std::abs(first[k] / double(seeds) - 1.0 / 3.0) < 0.02);
}

TEST_CASE("derived seeds differ") {
  std::set<std::uint64_t> s;
  for (std::uint64_t i = 0; i < 100; ++i) s.insert(derive_seed(5, i));
  CHECK(s.size() == 100);
}
