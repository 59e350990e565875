#include "lrp/graph.hpp"

#include <algorithm>
#include <optional>

#include "lrp/errors.hpp"

namespace lrp {

RegionGraph::RegionGraph(const Kernel& kernel, Region region)
    : kernel_(kernel), region_(std::move(region)) {
  if (kernel_.dim() != region_.dim()) {
    throw Error(ErrorKind::kValidation, "lattice.region_graph", "kernel and region dimensions differ");
  }
  const bool undirected = !directed();
  const auto& verts = region_.vertices();
  auto add = [&](std::uint32_t a, std::uint32_t b, double j) {
    EdgeSlot s;
    s.u = a;
    s.v = b;
    s.j = j;
    s.digest = digest(EdgeKey::make(kernel_.orientation(), verts[a], verts[b]));
    edges_.push_back(s);
  };
  if (kernel_.support_radius()) {
    const auto supp = kernel_.support();
    std::vector<double> values;
    for (const auto& z : supp) values.push_back(kernel_.value(z));
    for (std::uint32_t a = 0; a < verts.size(); ++a) {
      for (std::size_t k = 0; k < supp.size(); ++k) {
        const Vertex w = verts[a] + supp[k];
        if (undirected && !(verts[a] < w)) continue;
        const auto b = region_.index_of(w);
        if (b < 0) continue;
        add(a, static_cast<std::uint32_t>(b), values[k]);
      }
    }
  } else {
    for (std::uint32_t a = 0; a < verts.size(); ++a) {
      for (std::uint32_t b = undirected ? a + 1 : 0; b < verts.size(); ++b) {
        if (a == b) continue;
        const double j = kernel_.value(verts[b] - verts[a]);
        if (j > 0.0) add(a, b, j);
      }
    }
  }

  // CSR adjacency. Undirected: out lists hold every incident edge.
  const std::size_t nv = verts.size();
  std::vector<std::uint32_t> out_count(nv, 0), in_count(nv, 0);
  for (const auto& e : edges_) {
    ++out_count[e.u];
    if (undirected) {
      ++out_count[e.v];
    } else {
      ++in_count[e.v];
    }
  }
  auto prefix = [nv](const std::vector<std::uint32_t>& c, std::vector<std::uint32_t>& start) {
    start.assign(nv + 1, 0);
    for (std::size_t i = 0; i < nv; ++i) start[i + 1] = start[i] + c[i];
  };
  prefix(out_count, out_start_);
  prefix(in_count, in_start_);
  out_.resize(out_start_[nv]);
  in_.resize(in_start_[nv]);
  std::vector<std::uint32_t> out_fill(out_start_.begin(), out_start_.end() - 1);
  std::vector<std::uint32_t> in_fill(in_start_.begin(), in_start_.end() - 1);
  for (std::uint32_t id = 0; id < edges_.size(); ++id) {
    const auto& e = edges_[id];
    out_[out_fill[e.u]++] = id;
    if (undirected) {
      out_[out_fill[e.v]++] = id;
    } else {
      in_[in_fill[e.v]++] = id;
    }
  }

  tail_.resize(nv);
  vertex_digest_.resize(nv);
  std::optional<LogSumInterval> total;
  if (!kernel_.support_radius()) total = total_log_survival(kernel_);
  for (std::uint32_t v = 0; v < nv; ++v) {
    tail_[v] = tail_open_interval(kernel_, region_, verts[v], total ? &*total : nullptr).value();
    vertex_digest_[v] = digest(verts[v]);
  }
}

EdgeKey RegionGraph::key(std::size_t id) const {
  const auto& e = edges_[id];
  return EdgeKey::make(kernel_.orientation(), region_.vertex(e.u), region_.vertex(e.v));
}

Vertex RegionGraph::displacement(std::size_t id) const {
  const auto& e = edges_[id];
  return region_.vertex(e.v) - region_.vertex(e.u);
}

}  // namespace lrp
