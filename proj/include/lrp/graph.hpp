#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "lrp/kernel.hpp"
#include "lrp/marks.hpp"

namespace lrp {

/// One potential edge of a region. `u` is the first endpoint of the canonical key
/// (the tail for directed kernels).
struct EdgeSlot {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  double j = 0.0;
  Digest digest;
};

/// Potential-edge graph of a kernel restricted to a finite region, with per-vertex
/// boundary probabilities. Built once and shared read-only by every replica.
/// Edge ids follow the lexicographic order of the canonical keys.
class RegionGraph {
 public:
  RegionGraph(const Kernel& kernel, Region region);

  const Kernel& kernel() const { return kernel_; }
  const Region& region() const { return region_; }
  bool directed() const { return kernel_.orientation() == Orientation::kDirected; }

  std::size_t num_vertices() const { return region_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::uint32_t origin() const { return static_cast<std::uint32_t>(region_.origin_index()); }

  const EdgeSlot& edge(std::size_t id) const { return edges_[id]; }
  EdgeKey key(std::size_t id) const;
  Vertex displacement(std::size_t id) const;
  std::uint32_t other(std::size_t id, std::uint32_t v) const {
    return edges_[id].u == v ? edges_[id].v : edges_[id].u;
  }

  /// Edges along which exploration may leave v: all incident edges when undirected,
  /// out-edges when directed.
  std::span<const std::uint32_t> out_edges(std::uint32_t v) const {
    return {out_.data() + out_start_[v], out_.data() + out_start_[v + 1]};
  }
  /// In-edges of v; empty for undirected graphs.
  std::span<const std::uint32_t> in_edges(std::uint32_t v) const {
    return {in_.data() + in_start_[v], in_.data() + in_start_[v + 1]};
  }

  /// Probability that v has an open (out-)edge leaving the region.
  double tail_probability(std::uint32_t v) const { return tail_[v]; }
  const Digest& vertex_digest(std::uint32_t v) const { return vertex_digest_[v]; }

  /// Channel holding the V mark of edge `id` attached to endpoint `v`.
  Channel v_channel(std::size_t id, std::uint32_t v) const {
    return edges_[id].u == v ? Channel::kVx : Channel::kVy;
  }

 private:
  Kernel kernel_;
  Region region_;
  std::vector<EdgeSlot> edges_;
  std::vector<std::uint32_t> out_start_, out_;
  std::vector<std::uint32_t> in_start_, in_;
  std::vector<double> tail_;
  std::vector<Digest> vertex_digest_;
};

/// Source of edge and vertex marks for a RegionGraph. The production source reads
/// a MarkField; the exact-enumeration oracle substitutes scripted values.
class MarkSource {
 public:
  virtual ~MarkSource() = default;
  virtual double edge_mark(std::size_t edge_id, Channel channel) const = 0;
  virtual double vertex_mark(std::uint32_t vertex) const = 0;
};

class FieldMarks final : public MarkSource {
 public:
  FieldMarks(const RegionGraph& graph, MarkField field) : graph_(graph), field_(field) {}

  double edge_mark(std::size_t edge_id, Channel channel) const override {
    return field_.mark(graph_.edge(edge_id).digest, channel);
  }
  double vertex_mark(std::uint32_t vertex) const override {
    return field_.mark(graph_.vertex_digest(vertex), Channel::kExterior);
  }
  const MarkField& field() const { return field_; }

 private:
  const RegionGraph& graph_;
  MarkField field_;
};

/// Cluster of o in the subgraph of open edges, following out-edges when directed.
/// Returns sorted vertex indices.
template <class Open>
std::vector<std::uint32_t> cluster_of(const RegionGraph& g, Open open) {
  std::vector<std::uint8_t> seen(g.num_vertices(), 0);
  std::vector<std::uint32_t> queue{g.origin()};
  seen[g.origin()] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto v = queue[head];
    for (auto id : g.out_edges(v)) {
      const auto w = g.other(id, v);
      if (!seen[w] && open(id)) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  std::sort(queue.begin(), queue.end());
  return queue;
}

/// Boundary indicator: v has an open edge to the region's complement.
inline bool boundary_open(const RegionGraph& g, const MarkSource& marks, std::uint32_t v) {
  return marks.vertex_mark(v) <= g.tail_probability(v);
}

}  // namespace lrp
