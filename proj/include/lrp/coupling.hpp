#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lrp/exploration.hpp"

namespace lrp {

/// Parameters of the strict-monotonicity coupling for J' < J.
struct CouplingParams {
  double q = 0.0;
  double p = 1.0;                 ///< 1 - q
  double m = 0.0;                 ///< min over Delta of 1 - (J'/J)^(1/3)
  std::size_t delta_count = 0;    ///< |Delta| as a displacement count
  SurvivalBound survival;         ///< lower bound on prod over Delta^c of (1 - J)
  DifferenceSet delta;
};

/// q = min(m, m^|Delta| * prod_{z not in Delta}(1 - J(z))) with
/// m = min_{z in Delta} (1 - (J'(z)/J(z))^(1/3)); p = 1 - q.
CouplingParams compute_q(const Kernel& j, const Kernel& jp, const DifferenceSet& delta);
CouplingParams compute_q(const Kernel& j, const Kernel& jp);

/// How the G_{J'} cluster is realized inside the four-condition graph.
enum class CouplingMode {
  /// Every edge needs the four conditions plus X <= min(1, J'/(J (1-q)^3)).
  /// Off Delta the cap binds, so this is a stochastic lower bound for G_{J'}.
  kConservative,
  /// Delta edges as above; off Delta an edge is open iff U <= J' (= J). Exact marginals.
  kExactMarginal,
};

const char* to_string(CouplingMode m);

struct CouplerOptions {
  CouplingMode mode = CouplingMode::kConservative;
  std::optional<double> q_override;
  AssertLevel asserts = AssertLevel::kOff;
};

struct CoupledSample {
  ExplorationResult exploration;
  std::vector<std::uint32_t> cluster_h;      ///< untagged open-in-H cluster of o
  std::vector<std::uint32_t> cluster_star;   ///< cluster of o in the four-condition graph
  std::vector<std::uint32_t> cluster_prime;  ///< cluster of o under the J' rule
  std::vector<std::uint32_t> halo_edges;     ///< G_J-open edges leaving cluster_h, plus its internal ones
  std::vector<std::uint32_t> halo_vertices;  ///< cluster_h plus its G_J neighbours (out-neighbours if directed)
};

enum class Containment { kHolds, kViolated, kNotApplicable };

const char* to_string(Containment c);

/// Finite-volume coupling of G_{J'}, the four-condition graph and G_J with the
/// exploration. Immutable after construction; sample() may run concurrently.
class Coupler {
 public:
  Coupler(const Kernel& j, const Kernel& jp, Region region, CouplerOptions options = {});

  const CouplingParams& params() const { return params_; }
  double q() const { return q_; }
  const RegionGraph& graph() const { return graph_; }
  const Kernel& j() const { return graph_.kernel(); }
  const Kernel& jp() const { return jp_; }
  CouplingMode mode() const { return options_.mode; }

  /// Per-edge thinning threshold on the X channel.
  double prime_threshold(std::size_t edge) const { return prime_threshold_[edge]; }
  double prime_value(std::size_t edge) const { return prime_value_[edge]; }
  bool in_delta(std::size_t edge) const { return in_delta_[edge] != 0; }

  bool four_open(const MarkSource& marks, std::size_t edge) const;
  bool prime_open(const MarkSource& marks, std::size_t edge) const;

  CoupledSample sample(const MarkSource& marks) const;
  CoupledSample sample(std::uint64_t seed) const;

 private:
  Kernel jp_;
  RegionGraph graph_;
  CouplerOptions options_;
  CouplingParams params_;
  double q_ = 0.0;
  std::vector<double> prime_threshold_;
  std::vector<double> prime_value_;
  std::vector<std::uint8_t> in_delta_;
};

/// Region used for a kernel: the space-time box for oriented kernels (every support
/// displacement advances the last coordinate by one), the l1 ball otherwise.
Region default_region(const Kernel& k, int n);
bool is_oriented(const Kernel& k);

CoupledSample realize_coupled(const Kernel& j, const Kernel& jp, int n, std::uint64_t seed,
                              CouplerOptions options = {});

/// Not applicable when the exploration reached T; otherwise C'_o must lie in the
/// vertex set of B_{G_J}(C^H_o, 1).
Containment check_containment(const CoupledSample& s);
/// The same test for the four-condition cluster, which contains C'_o.
Containment check_star_containment(const CoupledSample& s);

struct DominationReport {
  double p = 0.0;
  double q = 0.0;
  std::size_t replicas = 0;
  std::uint64_t seed0 = 0;
  std::vector<std::size_t> sizes;           ///< grid k = 1..|region|
  std::vector<double> cdf_prime;            ///< P(|C'_o| <= k)
  std::vector<double> cdf_halo;             ///< P(|V(B_{G_J}(C_o,1))| <= k), C_o from fresh G_{pJ}
  std::vector<double> band;                 ///< 4 sigma binomial band of the difference
  double max_violation = 0.0;               ///< max_k (cdf_halo - cdf_prime), <= 0 under domination
  bool dominated_within_band = true;
};

/// Empirical comparison of |C'_o| against the halo size of an independently sampled
/// G_{pJ} cluster (fresh seeds derived from each replica seed).
DominationReport domination_report(const Kernel& j, const Kernel& jp, int n, std::size_t replicas,
                                   std::uint64_t seed0, unsigned workers = 1, CouplerOptions options = {});

/// Vertex count of B_{G_J}(C_o, 1) where C_o is the cluster of o in G_{pJ} under the
/// canonical coupling with G_J on the same U marks.
std::size_t halo_size_pj(const RegionGraph& g, const MarkSource& marks, double p);

}  // namespace lrp
