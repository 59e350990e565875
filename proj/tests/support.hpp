#pragma once

#include <map>
#include <random>
#include <vector>

#include "lrp/graph.hpp"
#include "lrp/kernel.hpp"

namespace lrp::testing {

/// Marks set by hand; anything not set reads as 0.5.
class ScriptedMarks final : public MarkSource {
 public:
  double edge_mark(std::size_t id, Channel c) const override {
    auto it = edge_.find({id, c});
    if (it != edge_.end()) return it->second;
    return c == Channel::kPriority ? 0.5 + (id + 1.0) / 1e6 : 0.5;
  }
  double vertex_mark(std::uint32_t v) const override {
    auto it = vertex_.find(v);
    return it == vertex_.end() ? 0.999999 : it->second;
  }
  void set(std::size_t id, Channel c, double u) { edge_[{id, c}] = u; }
  void set_vertex(std::uint32_t v, double u) { vertex_[v] = u; }

 private:
  std::map<std::pair<std::size_t, Channel>, double> edge_;
  std::map<std::uint32_t, double> vertex_;
};

inline std::size_t edge_id(const RegionGraph& g, const Vertex& a, const Vertex& b) {
  const auto key = EdgeKey::make(g.kernel().orientation(), a, b);
  for (std::size_t id = 0; id < g.num_edges(); ++id) {
    if (g.key(id) == key) return id;
  }
  throw std::runtime_error("no such edge");
}

/// Random finitely supported table kernel on Z^d with range 1 or 2.
inline Kernel random_table(std::mt19937_64& rng, int d, Orientation o = Orientation::kUndirected) {
  std::uniform_real_distribution<double> u(0.0, 0.9);
  std::bernoulli_distribution keep(0.6);
  const int r = std::uniform_int_distribution<int>(1, 2)(rng);
  Kernel::Entries e;
  for (const auto& z : cube_displacements(d, r)) {
    if (o == Orientation::kUndirected && !(Vertex(d) < z)) continue;
    if (z.l1() == 1 || keep(rng)) e.emplace_back(z, u(rng) + 0.05);
  }
  return Kernel::table(d, o, e);
}

/// Random J' below J on a random nonempty orbit subset.
inline Kernel random_perturbation(std::mt19937_64& rng, const Kernel& j) {
  const auto supp = j.support();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Kernel::Entries o;
  for (const auto& z : supp) {
    if (j.orientation() == Orientation::kUndirected && !(Vertex(j.dim()) < z)) continue;
    if (o.empty() || u(rng) < 0.3) o.emplace_back(z, j.value(z) * u(rng) * 0.95);
  }
  return j.with_overrides(o);
}

}  // namespace lrp::testing
