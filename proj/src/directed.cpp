#include "lrp/directed.hpp"

#include "lrp/errors.hpp"

namespace lrp {

namespace {

void require_directed(const Kernel& j, const char* where) {
  if (j.orientation() != Orientation::kDirected) {
    throw Error(ErrorKind::kValidation, where, "kernel is not directed");
  }
}

}  // namespace

Kernel oriented_kernel(int space_dim, const Kernel::Entries& steps) {
  Kernel::Entries e;
  for (const auto& [s, value] : steps) {
    if (s.dim() != space_dim) throw Error(ErrorKind::kValidation, "directed.oriented_kernel", "step dimension");
    Vertex z(space_dim + 1);
    for (int i = 0; i < space_dim; ++i) z[i] = s[i];
    z[space_dim] = 1;
    e.emplace_back(z, value);
  }
  return Kernel::table(space_dim + 1, Orientation::kDirected, e);
}

Kernel oriented_square_lattice(double left, double right) {
  return oriented_kernel(1, {{Vertex{-1}, left}, {Vertex{1}, right}});
}

ExplorationResult directed_explore(const Kernel& j, const DifferenceSet& delta, double q, int n,
                                   const MarkField& field, ExplorationOptions options) {
  require_directed(j, "directed.directed_explore");
  const RegionGraph g(j, default_region(j, n));
  const FieldMarks marks(g, field);
  return Exploration(g, delta, q, marks, options).run();
}

BfsCluster directed_bfs(const Kernel& j, int n, const MarkField& field) {
  require_directed(j, "directed.directed_bfs");
  const RegionGraph g(j, default_region(j, n));
  return bfs_cluster(g, FieldMarks(g, field));
}

DirectedCoupling directed_coupling(const Kernel& j, const Kernel& jp, int n, std::uint64_t seed,
                                   CouplerOptions options) {
  require_directed(j, "directed.directed_coupling");
  DirectedCoupling out;
  out.sample = realize_coupled(j, jp, n, seed, options);
  out.containment = check_containment(out.sample);
  return out;
}

}  // namespace lrp
