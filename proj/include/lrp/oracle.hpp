#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lrp/coupling.hpp"

namespace lrp {

struct BfsCluster {
  std::vector<std::uint32_t> vertices;  ///< sorted
  std::vector<std::uint32_t> edges;     ///< open edges with both endpoints in the cluster, sorted
  bool reaches_boundary = false;        ///< some cluster vertex has an open edge leaving the region
};

/// Breadth-first search for the cluster of o in G_J restricted to the region,
/// revealing U marks of region-internal potential edges. Directed graphs follow out-edges.
BfsCluster bfs_cluster(const RegionGraph& g, const MarkSource& marks);
BfsCluster bfs_cluster(const Kernel& j, int n, const MarkField& field);

enum class Functional {
  kClusterSize,            ///< |C_o| in G_J
  kConnection,             ///< 1{o -> target} in G_J
  kPrimeClusterSize,       ///< |C'_o| under the coupling rule
  kStarClusterSize,        ///< |C*_o| in the four-condition graph
  kExplorationClusterSize, ///< |C^H_o|, untagged open-in-H cluster of the exploration
  kExplorationHaloSize,    ///< vertex count of B_{G_J}(C^H_o, 1)
  kHaloSizePJ,             ///< vertex count of B_{G_J}(C_o, 1), C_o from G_{pJ}
};

const char* to_string(Functional f);
Functional parse_functional(const std::string& s);

struct ExactDistribution {
  Functional functional = Functional::kClusterSize;
  std::vector<std::pair<std::size_t, double>> support;  ///< (value, probability), increasing value
  std::size_t atoms = 0;

  double probability(std::size_t value) const;
  double cdf(std::size_t value) const;
  double mean() const;
  double total() const;
};

struct EnumerationSpec {
  Kernel j;
  std::optional<Kernel> jp;         ///< required by the coupling functionals
  Region region;
  std::optional<double> q;          ///< overrides the value from compute_q; default 0 without J'
  std::optional<double> p;          ///< retention for kHaloSizePJ; default 1 - q
  CouplingMode mode = CouplingMode::kConservative;
  std::optional<Vertex> target;     ///< for kConnection
  bool stop_at_boundary = true;     ///< exploration functionals: stop once T is reached
};

inline constexpr double kMaxAtoms = 1e7;

/// Exact law of a functional by enumerating every joint outcome of the finitely many
/// mark comparisons it depends on. Each edge contributes a small alphabet of atoms with
/// exact interval-length probabilities; exploration functionals also enumerate every
/// edge order and the nondegenerate boundary indicators. Throws a size error above
/// kMaxAtoms atoms.
ExactDistribution enumerate_exact(const EnumerationSpec& spec, Functional functional);
/// Atom count the enumeration would visit.
double atom_count(const EnumerationSpec& spec, Functional functional);

struct DominationCheck {
  bool dominated = true;
  std::optional<std::size_t> counterexample;  ///< first k with CDF'(k) < CDF_halo(k)
  double p = 0.0;
  ExactDistribution prime;
  ExactDistribution halo;
};

/// First-order stochastic dominance of the halo size over |C'_o| from exact CDFs,
/// to 1e-12.
DominationCheck exact_domination_check(const Kernel& j, const Kernel& jp, const Region& region,
                                       std::optional<double> p_override = std::nullopt);

}  // namespace lrp
