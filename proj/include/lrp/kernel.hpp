#pragma once

#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "lrp/lattice.hpp"

namespace lrp {

enum class KernelFamily { kTable, kPolynomialPhi, kProductScaled };

const char* to_string(KernelFamily f);

/// Translation-invariant connectivity function z -> J(o, o+z) on Z^d.
///
/// Three families are supported: a finite table, the polynomial phi-form
/// J(z) = 1 - exp(-beta |z|_2^-alpha) with alpha > d, and a scaled kernel
/// min(1, s * inner). A finite set of pointwise overrides can be layered on top of
/// any family, which is how perturbed kernels J' are built from J.
///
/// Undirected kernels are negation-symmetric: table entries and overrides are
/// mirrored on construction, and conflicting mirrored values are rejected.
/// Kernels are immutable and cheap to copy.
class Kernel {
 public:
  using Entries = std::vector<std::pair<Vertex, double>>;

  static Kernel table(int d, Orientation o, const Entries& entries);
  static Kernel polynomial_phi(int d, Orientation o, double beta, double alpha);
  /// min(1, factor * inner). With factor in [0,1] this is the retained kernel pJ.
  static Kernel product_scaled(const Kernel& inner, double factor);

  /// Convenience: value on the 2d unit displacements (all of them, both signs).
  static Kernel nearest_neighbour(int d, double value);

  Kernel with_overrides(const Entries& overrides) const;

  double value(const Vertex& z) const;

  int dim() const;
  Orientation orientation() const;
  KernelFamily family() const;
  const std::map<Vertex, double>& overrides() const;
  /// Factor of a product-scaled kernel, params of the phi-form; zero otherwise.
  double scale_factor() const;
  double beta() const;
  double alpha() const;
  const Kernel* inner() const;
  const std::map<Vertex, double>& table_entries() const;

  /// l_inf radius of the support when it is finite.
  std::optional<int> support_radius() const;
  /// Displacements with positive value, lexicographic. Finite-support kernels only.
  std::vector<Vertex> support() const;
  /// l_inf radius beyond which the kernel is determined by its far field (no table
  /// entries and no overrides beyond it).
  int finite_part_radius() const;

  /// Upper bound on the sum of J(z) over |z|_inf > r.
  double tail_sum_bound(int r) const;
  /// Upper bound on sup of J(z) over |z|_inf > r.
  double sup_beyond(int r) const;
  /// sup_z J(z) < 1 (membership in the class of kernels that never take the value one).
  bool below_one() const;

  struct Node;

 private:
  explicit Kernel(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  double base_value(const Vertex& z) const;
  double base_tail(int r) const;
  std::shared_ptr<const Node> node_;
};

/// Finite set of displacements z with J(z) != J'(z). Closed under negation for
/// undirected kernels. The edge xy belongs to Delta iff (y - x) is a member.
class DifferenceSet {
 public:
  DifferenceSet() = default;
  DifferenceSet(Orientation o, std::vector<Vertex> displacements);

  const std::vector<Vertex>& displacements() const { return displacements_; }
  std::size_t size() const { return displacements_.size(); }
  bool empty() const { return displacements_.empty(); }
  Orientation orientation() const { return orientation_; }
  bool contains(const Vertex& z) const;
  /// Does the potential edge from `from` to `to` lie in Delta.
  bool contains_edge(const Vertex& from, const Vertex& to) const { return contains(to - from); }

 private:
  Orientation orientation_ = Orientation::kUndirected;
  std::vector<Vertex> displacements_;
};

/// Probability of a potential edge at the given displacement.
double kernel_value(const Kernel& k, const Vertex& displacement);

/// All potential edges with both endpoints in `region` and positive probability,
/// in lexicographic order of their canonical keys.
std::vector<EdgeKey> potential_edges(const Region& region, const Kernel& k);

/// Difference set of J' < J; throws EmptyDelta, OrderViolation or InfiniteDelta.
DifferenceSet delta_of(const Kernel& j, const Kernel& jp);

struct TailInterval {
  double lo = 0.0;
  double hi = 0.0;
  double value() const { return 0.5 * (lo + hi); }
};

struct LogSumInterval {
  double lo = 0.0;  ///< bracket for the sum over all z != 0 of log(1 - J(z)); terms with J = 1 are skipped
  double hi = 0.0;
  bool hits_one = false;
  int window_radius = 0;
};

/// Sum of log(1 - J(z)) over all nonzero z, bracketed. Used for infinite supports,
/// where it is computed once and shared by every vertex of a region.
LogSumInterval total_log_survival(const Kernel& k);

/// Probability that v has at least one open edge to the complement of `region`
/// (directed kernels: an open out-edge). Bracketed by a rigorous interval whose
/// width is at most 1e-12 whenever the tail allows it within the window cap.
TailInterval tail_open_interval(const Kernel& k, const Region& region, const Vertex& v,
                                const LogSumInterval* total = nullptr);
double tail_open_probability(const Kernel& k, const Region& region, const Vertex& v);

struct SurvivalBound {
  double value = 0.0;        ///< lower bound on prod_{z not in Delta} (1 - J(z))
  int window_radius = 0;     ///< l_inf radius summed exactly
  double tail_bound = 0.0;   ///< tail_sum_bound(window_radius) used for the correction
  double max_off_delta = 0.0;
};

/// Conservative lower bound on prod over z outside Delta of (1 - J(z)).
/// Exact log-sum over a window plus the geometric tail estimate
/// sum_n sum_z J^n / n <= (sum_z J) / (1 - a) for the remainder.
SurvivalBound log_survival_product(const Kernel& k, const DifferenceSet& excluded);

}  // namespace lrp
