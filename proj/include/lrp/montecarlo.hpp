#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lrp/graph.hpp"

namespace lrp {

struct EstimateReport {
  double estimate = 0.0;
  double stderr_ = 0.0;          ///< sample standard deviation / sqrt(replicas)
  std::size_t replicas = 0;
  std::uint64_t seed0 = 0;       ///< replica i uses seed0 + i
  int n = 0;
};

/// Fraction of replicas in which the cluster of o reaches a boundary vertex (a vertex
/// with an open edge leaving the region).
EstimateReport estimate_theta(const Kernel& j, int n, std::size_t replicas, std::uint64_t seed0,
                              unsigned workers = 1);
EstimateReport estimate_theta(const RegionGraph& g, std::size_t replicas, std::uint64_t seed0,
                              unsigned workers = 1);

/// Mean size of the cluster of o within the region.
EstimateReport estimate_susceptibility(const Kernel& j, int n, std::size_t replicas, std::uint64_t seed0,
                                       unsigned workers = 1);

/// Per-replica boundary indicator, stopping the search at the first boundary vertex.
bool reaches_boundary(const RegionGraph& g, const MarkSource& marks);

struct DecayFit {
  std::vector<EstimateReport> points;
  std::vector<int> dropped;      ///< radii with no boundary hit, left out of the fit
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares fit of log theta_n against n. Throws a fit error with fewer than three
/// usable radii.
DecayFit estimate_decay(const Kernel& j, const std::vector<int>& n_list, std::size_t replicas,
                        std::uint64_t seed0, unsigned workers = 1);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

struct CurvePoint {
  int n = 0;
  double parameter = 0.0;
  double theta = 0.0;
  double stderr_ = 0.0;
};

struct Bisection {
  double estimate = 0.0;  ///< midpoint of the final bracket
  double lo = 0.0;
  double hi = 0.0;
  std::vector<CurvePoint> evaluations;
};

/// Bisects a parameter x in [lo, hi] for the crossing theta_n(kernel(x)) = target,
/// assuming theta is nondecreasing in x. Every evaluation reuses seeds seed0 + i.
/// Throws a bracketing error if theta(hi) < target.
Bisection bisect_crossing(const std::function<Kernel(double)>& kernel, int n, double lo, double hi,
                          std::size_t replicas, double target, double tol, std::uint64_t seed0,
                          unsigned workers = 1);

/// phi-parameterized family J = 1 - exp(-beta phi): a finite phi table, or the
/// polynomial phi(z) = |z|^-alpha.
struct PhiFamily {
  int d = 2;
  Orientation orientation = Orientation::kUndirected;
  std::optional<Kernel::Entries> table;
  double alpha = 0.0;

  Kernel at(double beta) const;
};

Bisection bisect_beta_c(const PhiFamily& family, int n, std::size_t replicas, double theta_target, double tol,
                        double beta_max, std::uint64_t seed0, unsigned workers = 1);

struct SeparationRow {
  int n = 0;
  Bisection s_j;
  Bisection s_jp;
  double se_j = 0.0;
  double se_jp = 0.0;
  double gap = 0.0;       ///< s(J') - s(J)
  double gap_se = 0.0;
  double z = 0.0;         ///< gap / gap_se
};

struct SeparationReport {
  std::vector<SeparationRow> rows;
  std::size_t replicas = 0;
  std::uint64_t seed0 = 0;
};

/// For each n, the scale multipliers s(K, n) with theta_n(min(1, s K)) = 0.5 for K = J
/// and K = J', and their gap. The standard error of each crossing combines the final
/// bracket width (uniform) with binomial noise divided by the local slope of theta,
/// measured at s (1 +- 0.05).
SeparationReport monotonicity_experiment(const Kernel& j, const Kernel& jp, const std::vector<int>& n_list,
                                         std::size_t replicas, std::uint64_t seed0, double s_max = 4.0,
                                         double tol = 1e-3, unsigned workers = 1);

/// CSV rows "n,parameter,theta,stderr" with a header line.
std::string to_csv(const std::vector<CurvePoint>& points);

}  // namespace lrp
