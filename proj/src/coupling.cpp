#include "lrp/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "lrp/errors.hpp"
#include "lrp/parallel.hpp"

namespace lrp {

const char* to_string(CouplingMode m) {
  return m == CouplingMode::kConservative ? "conservative" : "exact_marginal";
}

const char* to_string(Containment c) {
  switch (c) {
    case Containment::kHolds: return "holds";
    case Containment::kViolated: return "violated";
    case Containment::kNotApplicable: return "not_applicable";
  }
  return "?";
}

CouplingParams compute_q(const Kernel& j, const Kernel& jp, const DifferenceSet& delta) {
  const char* where = "coupling.compute_q";
  if (delta.empty()) throw Error(ErrorKind::kEmptyDelta, where, "Delta is empty");
  if (!jp.below_one()) throw Error(ErrorKind::kValidation, where, "J' takes the value 1");
  CouplingParams out;
  out.delta = delta;
  out.delta_count = delta.size();
  out.m = 1.0;
  for (const auto& z : delta.displacements()) {
    const double a = j.value(z);
    const double b = jp.value(z);
    if (!(b < a)) {
      throw Error(ErrorKind::kOrderViolation, where, "J' must be strictly below J on Delta at " + z.str());
    }
    out.m = std::min(out.m, 1.0 - std::cbrt(b / a));
  }
  out.survival = log_survival_product(j, delta);
  out.q = std::min(out.m, std::pow(out.m, static_cast<double>(out.delta_count)) * out.survival.value);
  out.p = 1.0 - out.q;
  // The edge-level inequality J (1-q)^3 >= J' on Delta.
  const double keep3 = std::pow(1.0 - out.q, 3);
  for (const auto& z : delta.displacements()) {
    const double a = j.value(z);
    const double b = jp.value(z);
    if (a * keep3 < b * (1.0 - 1e-12)) {
      throw Error(ErrorKind::kInternalConsistency, where, "J (1-q)^3 < J' at " + z.str());
    }
  }
  return out;
}

CouplingParams compute_q(const Kernel& j, const Kernel& jp) { return compute_q(j, jp, delta_of(j, jp)); }

bool is_oriented(const Kernel& k) {
  if (k.orientation() != Orientation::kDirected || !k.support_radius()) return false;
  const auto supp = k.support();
  if (supp.empty()) return false;
  return std::all_of(supp.begin(), supp.end(), [&](const Vertex& z) { return z[k.dim() - 1] == 1; });
}

Region default_region(const Kernel& k, int n) {
  if (is_oriented(k) && k.dim() >= 2) return space_time_box(k.dim() - 1, n);
  return ball(k.dim(), n);
}

Coupler::Coupler(const Kernel& j, const Kernel& jp, Region region, CouplerOptions options)
    : jp_(jp), graph_(j, std::move(region)), options_(options), params_(compute_q(j, jp)) {
  q_ = options_.q_override.value_or(params_.q);
  if (!(q_ >= 0.0 && q_ <= 1.0)) throw Error(ErrorKind::kValidation, "coupling.realize_coupled", "q outside [0,1]");
  const double keep3 = std::pow(1.0 - q_, 3);
  const std::size_t ne = graph_.num_edges();
  prime_threshold_.resize(ne);
  prime_value_.resize(ne);
  in_delta_.resize(ne);
  for (std::size_t id = 0; id < ne; ++id) {
    const Vertex z = graph_.displacement(id);
    const double a = graph_.edge(id).j;
    const double b = jp_.value(z);
    prime_value_[id] = b;
    in_delta_[id] = params_.delta.contains(z) ? 1 : 0;
    const double denom = a * keep3;
    prime_threshold_[id] = denom > 0.0 ? std::min(1.0, b / denom) : (b > 0.0 ? 1.0 : 0.0);
  }
}

bool Coupler::four_open(const MarkSource& marks, std::size_t id) const {
  const double keep = 1.0 - q_;
  return marks.edge_mark(id, Channel::kU) <= graph_.edge(id).j && marks.edge_mark(id, Channel::kW) <= keep &&
         marks.edge_mark(id, Channel::kVx) <= keep && marks.edge_mark(id, Channel::kVy) <= keep;
}

bool Coupler::prime_open(const MarkSource& marks, std::size_t id) const {
  if (options_.mode == CouplingMode::kExactMarginal && !in_delta_[id]) {
    return marks.edge_mark(id, Channel::kU) <= prime_value_[id];
  }
  return four_open(marks, id) && marks.edge_mark(id, Channel::kX) <= prime_threshold_[id];
}

CoupledSample Coupler::sample(const MarkSource& marks) const {
  CoupledSample s;
  ExplorationOptions eo;
  eo.asserts = options_.asserts;
  s.exploration = Exploration(graph_, params_.delta, q_, marks, eo).run();
  s.cluster_h = s.exploration.untagged_cluster(graph_);
  s.cluster_star = cluster_of(graph_, [&](std::uint32_t id) { return four_open(marks, id); });
  s.cluster_prime = cluster_of(graph_, [&](std::uint32_t id) { return prime_open(marks, id); });

  std::vector<std::uint8_t> in_halo(graph_.num_vertices(), 0);
  for (auto v : s.cluster_h) in_halo[v] = 1;
  s.halo_vertices = s.cluster_h;
  for (auto v : s.cluster_h) {
    for (auto id : graph_.out_edges(v)) {
      if (marks.edge_mark(id, Channel::kU) > graph_.edge(id).j) continue;
      s.halo_edges.push_back(id);
      const auto w = graph_.other(id, v);
      if (!in_halo[w]) {
        in_halo[w] = 1;
        s.halo_vertices.push_back(w);
      }
    }
  }
  std::sort(s.halo_edges.begin(), s.halo_edges.end());
  s.halo_edges.erase(std::unique(s.halo_edges.begin(), s.halo_edges.end()), s.halo_edges.end());
  std::sort(s.halo_vertices.begin(), s.halo_vertices.end());
  return s;
}

CoupledSample Coupler::sample(std::uint64_t seed) const {
  const FieldMarks marks(graph_, MarkField(seed));
  return sample(marks);
}

CoupledSample realize_coupled(const Kernel& j, const Kernel& jp, int n, std::uint64_t seed,
                              CouplerOptions options) {
  return Coupler(j, jp, default_region(j, n), options).sample(seed);
}

namespace {

Containment contained(const CoupledSample& s, const std::vector<std::uint32_t>& cluster) {
  if (s.exploration.termination == Termination::kReachedT) return Containment::kNotApplicable;
  const bool ok = std::includes(s.halo_vertices.begin(), s.halo_vertices.end(), cluster.begin(), cluster.end());
  return ok ? Containment::kHolds : Containment::kViolated;
}

}  // namespace

Containment check_containment(const CoupledSample& s) { return contained(s, s.cluster_prime); }
Containment check_star_containment(const CoupledSample& s) { return contained(s, s.cluster_star); }

std::size_t halo_size_pj(const RegionGraph& g, const MarkSource& marks, double p) {
  const auto cluster =
      cluster_of(g, [&](std::uint32_t id) { return marks.edge_mark(id, Channel::kU) <= p * g.edge(id).j; });
  std::vector<std::uint8_t> in(g.num_vertices(), 0);
  for (auto v : cluster) in[v] = 1;
  std::size_t count = cluster.size();
  for (auto v : cluster) {
    for (auto id : g.out_edges(v)) {
      const auto w = g.other(id, v);
      if (!in[w] && marks.edge_mark(id, Channel::kU) <= g.edge(id).j) {
        in[w] = 1;
        ++count;
      }
    }
  }
  return count;
}

DominationReport domination_report(const Kernel& j, const Kernel& jp, int n, std::size_t replicas,
                                   std::uint64_t seed0, unsigned workers, CouplerOptions options) {
  if (replicas == 0) throw Error(ErrorKind::kValidation, "coupling.domination_report", "replicas must be >= 1");
  const Coupler coupler(j, jp, default_region(j, n), options);
  const double p = 1.0 - coupler.q();
  struct Pair {
    std::size_t prime = 0;
    std::size_t halo = 0;
  };
  const auto pairs = map_replicas<Pair>(replicas, workers, [&](std::size_t i) {
    const std::uint64_t seed = seed0 + i;
    Pair out;
    out.prime = coupler.sample(seed).cluster_prime.size();
    const FieldMarks fresh(coupler.graph(), MarkField(derive_seed(seed, 1)));
    out.halo = halo_size_pj(coupler.graph(), fresh, p);
    return out;
  });
  DominationReport r;
  r.p = p;
  r.q = coupler.q();
  r.replicas = replicas;
  r.seed0 = seed0;
  const std::size_t kmax = coupler.graph().num_vertices();
  std::vector<std::size_t> hp(kmax + 1, 0), hh(kmax + 1, 0);
  for (const auto& pr : pairs) {
    ++hp[pr.prime];
    ++hh[pr.halo];
  }
  const double rr = static_cast<double>(replicas);
  std::size_t cp = 0, ch = 0;
  r.max_violation = -1.0;
  for (std::size_t k = 1; k <= kmax; ++k) {
    cp += hp[k];
    ch += hh[k];
    const double fp = cp / rr, fh = ch / rr;
    const double band = 4.0 * std::sqrt((fp * (1 - fp) + fh * (1 - fh)) / rr);
    r.sizes.push_back(k);
    r.cdf_prime.push_back(fp);
    r.cdf_halo.push_back(fh);
    r.band.push_back(band);
    r.max_violation = std::max(r.max_violation, fh - fp);
    if (fh - fp > band) r.dominated_within_band = false;
  }
  return r;
}

}  // namespace lrp
