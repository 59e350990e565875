#pragma once

#include <cstdint>

#include "lrp/coupling.hpp"
#include "lrp/oracle.hpp"

namespace lrp {

/// Oriented kernel on Z^space_dim x Z: a directed table supported on displacements
/// (s, +1). `steps` lists the spatial parts s with their probabilities.
Kernel oriented_kernel(int space_dim, const Kernel::Entries& steps);

/// Oriented square lattice: out-edges (x,t) -> (x-1,t+1) and (x+1,t+1).
Kernel oriented_square_lattice(double left, double right);

/// Exploration following out-edges only, on the kernel's default region (the
/// space-time box for oriented kernels, the l1 ball otherwise).
ExplorationResult directed_explore(const Kernel& j, const DifferenceSet& delta, double q, int n,
                                   const MarkField& field, ExplorationOptions options = {});

/// Forward-reachability cluster of o on the default region.
BfsCluster directed_bfs(const Kernel& j, int n, const MarkField& field);

struct DirectedCoupling {
  CoupledSample sample;
  Containment containment = Containment::kNotApplicable;
};

DirectedCoupling directed_coupling(const Kernel& j, const Kernel& jp, int n, std::uint64_t seed,
                                   CouplerOptions options = {});

}  // namespace lrp
