#include "lrp/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

#include "lrp/errors.hpp"

namespace lrp {

BfsCluster bfs_cluster(const RegionGraph& g, const MarkSource& marks) {
  BfsCluster out;
  std::vector<std::uint8_t> seen(g.num_vertices(), 0);
  std::vector<std::uint32_t> queue{g.origin()};
  seen[g.origin()] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto v = queue[head];
    if (boundary_open(g, marks, v)) out.reaches_boundary = true;
    for (auto id : g.out_edges(v)) {
      if (marks.edge_mark(id, Channel::kU) > g.edge(id).j) continue;
      out.edges.push_back(id);
      const auto w = g.other(id, v);
      if (!seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  out.vertices = std::move(queue);
  std::sort(out.vertices.begin(), out.vertices.end());
  std::sort(out.edges.begin(), out.edges.end());
  out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
  return out;
}

BfsCluster bfs_cluster(const Kernel& j, int n, const MarkField& field) {
  const RegionGraph g(j, ball(j.dim(), n));
  return bfs_cluster(g, FieldMarks(g, field));
}

const char* to_string(Functional f) {
  switch (f) {
    case Functional::kClusterSize: return "cluster_size";
    case Functional::kConnection: return "connection";
    case Functional::kPrimeClusterSize: return "prime_cluster_size";
    case Functional::kStarClusterSize: return "star_cluster_size";
    case Functional::kExplorationClusterSize: return "exploration_cluster_size";
    case Functional::kExplorationHaloSize: return "exploration_halo_size";
    case Functional::kHaloSizePJ: return "halo_size_pj";
  }
  return "?";
}

Functional parse_functional(const std::string& s) {
  for (auto f : {Functional::kClusterSize, Functional::kConnection, Functional::kPrimeClusterSize,
                 Functional::kStarClusterSize, Functional::kExplorationClusterSize,
                 Functional::kExplorationHaloSize, Functional::kHaloSizePJ}) {
    if (s == to_string(f)) return f;
  }
  throw Error(ErrorKind::kValidation, "oracle.enumerate_exact", "unknown functional '" + s + "'");
}

double ExactDistribution::probability(std::size_t value) const {
  for (const auto& [v, p] : support) {
    if (v == value) return p;
  }
  return 0.0;
}

double ExactDistribution::cdf(std::size_t value) const {
  long double s = 0.0L;
  for (const auto& [v, p] : support) {
    if (v <= value) s += p;
  }
  return static_cast<double>(s);
}

double ExactDistribution::mean() const {
  long double s = 0.0L;
  for (const auto& [v, p] : support) s += static_cast<long double>(v) * p;
  return static_cast<double>(s);
}

double ExactDistribution::total() const {
  long double s = 0.0L;
  for (const auto& [v, p] : support) s += p;
  return static_cast<double>(s);
}

namespace {

// One outcome of the comparisons an edge takes part in, with a representative mark
// for every channel lying strictly inside the outcome's interval.
struct Atom {
  long double prob = 1.0L;
  std::array<double, 8> mark{0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5};  // indexed by Channel
  bool open = false;      // generic open flag for the simple functionals
  bool open_j = false;    // U <= J, for halo functionals
};

// Splits (0,1) at `threshold`: returns {below, above} representatives with probabilities.
struct Split {
  double lo_rep, hi_rep;
  long double lo_prob, hi_prob;
};

Split split(double threshold) {
  return {threshold / 2.0, (1.0 + threshold) / 2.0, static_cast<long double>(threshold),
          1.0L - static_cast<long double>(threshold)};
}

void drop_null(std::vector<Atom>& atoms) {
  atoms.erase(std::remove_if(atoms.begin(), atoms.end(), [](const Atom& a) { return a.prob <= 0.0L; }),
              atoms.end());
}

std::size_t ch(Channel c) { return static_cast<std::size_t>(c); }

class ScriptedMarks final : public MarkSource {
 public:
  ScriptedMarks(std::size_t edges, std::size_t vertices) : edge_(edges), vertex_(vertices, 0.5) {}
  double edge_mark(std::size_t id, Channel c) const override { return edge_[id][ch(c)]; }
  double vertex_mark(std::uint32_t v) const override { return vertex_[v]; }

  std::vector<std::array<double, 8>> edge_;
  std::vector<double> vertex_;
};

bool is_exploration(Functional f) {
  return f == Functional::kExplorationClusterSize || f == Functional::kExplorationHaloSize;
}

struct Setup {
  std::optional<RegionGraph> graph;
  std::optional<CouplingParams> params;
  double q = 0.0;
  double p = 1.0;
  DifferenceSet delta;
  std::vector<std::vector<Atom>> edge_atoms;
  std::vector<std::uint32_t> random_t;   // vertices with nondegenerate boundary probability
  std::size_t permutations = 1;
};

bool needs_coupling(Functional f) {
  return f == Functional::kPrimeClusterSize || f == Functional::kStarClusterSize || f == Functional::kHaloSizePJ;
}

Setup prepare(const EnumerationSpec& spec, Functional f) {
  const char* where = "oracle.enumerate_exact";
  Setup s;
  s.graph.emplace(spec.j, spec.region);
  const RegionGraph& g = *s.graph;
  if (spec.jp) {
    s.params = compute_q(spec.j, *spec.jp);
    s.delta = s.params->delta;
    s.q = s.params->q;
  } else if (needs_coupling(f) && !(f == Functional::kHaloSizePJ && spec.p)) {
    throw Error(ErrorKind::kValidation, where, std::string(to_string(f)) + " needs J'");
  }
  if (spec.q) s.q = *spec.q;
  s.p = spec.p.value_or(1.0 - s.q);
  if (f == Functional::kConnection && !spec.target) {
    throw Error(ErrorKind::kValidation, where, "connection functional needs a target vertex");
  }

  const double keep = 1.0 - s.q;
  const double keep3 = keep * keep * keep;
  const Split v_split = split(keep);
  for (std::size_t id = 0; id < g.num_edges(); ++id) {
    const double j = g.edge(id).j;
    std::vector<Atom> atoms;
    switch (f) {
      case Functional::kClusterSize:
      case Functional::kConnection: {
        const Split u = split(j);
        atoms.resize(2);
        atoms[0].prob = u.lo_prob;
        atoms[0].open = true;
        atoms[1].prob = u.hi_prob;
        break;
      }
      case Functional::kPrimeClusterSize:
      case Functional::kStarClusterSize: {
        const Vertex z = g.displacement(id);
        double pi = j * keep3;
        if (f == Functional::kPrimeClusterSize) {
          const double jp = spec.jp->value(z);
          if (spec.mode == CouplingMode::kExactMarginal && !s.delta.contains(z)) {
            pi = jp;
          } else {
            const double r = pi > 0.0 ? std::min(1.0, jp / pi) : 0.0;
            pi *= r;
          }
        }
        atoms.resize(2);
        atoms[0].prob = pi;
        atoms[0].open = true;
        atoms[1].prob = 1.0L - pi;
        break;
      }
      case Functional::kHaloSizePJ: {
        const double pj = s.p * j;
        atoms.resize(3);
        atoms[0].prob = pj;
        atoms[0].open = atoms[0].open_j = true;
        atoms[1].prob = static_cast<long double>(j) - pj;
        atoms[1].open_j = true;
        atoms[2].prob = 1.0L - j;
        break;
      }
      case Functional::kExplorationClusterSize:
      case Functional::kExplorationHaloSize: {
        // U vs J; Vx, Vy vs 1-q; W vs 1-q only matters when U <= J.
        const Split u = split(j);
        for (int uo = 0; uo < 2; ++uo) {
          for (int vx = 0; vx < 2; ++vx) {
            for (int vy = 0; vy < 2; ++vy) {
              for (int w = 0; w < (uo == 0 ? 2 : 1); ++w) {
                Atom a;
                a.prob = (uo == 0 ? u.lo_prob : u.hi_prob) * (vx == 0 ? v_split.lo_prob : v_split.hi_prob) *
                         (vy == 0 ? v_split.lo_prob : v_split.hi_prob);
                a.mark[ch(Channel::kU)] = uo == 0 ? u.lo_rep : u.hi_rep;
                a.open_j = uo == 0;
                a.mark[ch(Channel::kVx)] = vx == 0 ? v_split.lo_rep : v_split.hi_rep;
                a.mark[ch(Channel::kVy)] = vy == 0 ? v_split.lo_rep : v_split.hi_rep;
                if (uo == 0) {
                  a.prob *= (w == 0 ? v_split.lo_prob : v_split.hi_prob);
                  a.mark[ch(Channel::kW)] = w == 0 ? v_split.lo_rep : v_split.hi_rep;
                }
                atoms.push_back(a);
              }
            }
          }
        }
        break;
      }
    }
    drop_null(atoms);
    s.edge_atoms.push_back(std::move(atoms));
  }
  if (is_exploration(f)) {
    for (std::uint32_t v = 0; v < g.num_vertices(); ++v) {
      const double t = g.tail_probability(v);
      if (t > 0.0 && t < 1.0) s.random_t.push_back(v);
    }
    for (std::size_t k = 2; k <= g.num_edges(); ++k) s.permutations *= k;
  }
  return s;
}

double count_atoms(const Setup& s) {
  double n = static_cast<double>(s.permutations) * std::pow(2.0, static_cast<double>(s.random_t.size()));
  for (const auto& a : s.edge_atoms) n *= static_cast<double>(a.size());
  return n;
}

}  // namespace

double atom_count(const EnumerationSpec& spec, Functional functional) {
  if (is_exploration(functional) && spec.region.size() > 0) {
    // Permutation count grows factorially; guard before materializing.
    const RegionGraph g(spec.j, spec.region);
    if (g.num_edges() > 12) return std::numeric_limits<double>::infinity();
  }
  return count_atoms(prepare(spec, functional));
}

ExactDistribution enumerate_exact(const EnumerationSpec& spec, Functional f) {
  const char* where = "oracle.enumerate_exact";
  const double atoms_needed = atom_count(spec, f);
  if (!(atoms_needed <= kMaxAtoms)) {
    throw Error(ErrorKind::kSize, where,
                "instance too large: " + std::to_string(atoms_needed) + " atoms (limit 1e7)");
  }
  Setup s = prepare(spec, f);
  const RegionGraph& g = *s.graph;
  const std::size_t ne = g.num_edges();
  const std::size_t nv = g.num_vertices();

  ScriptedMarks marks(ne, nv);
  std::vector<std::uint8_t> open(ne, 0), open_j(ne, 0);
  std::vector<std::size_t> digit(ne, 0);
  std::vector<std::uint32_t> order(ne);
  std::map<std::size_t, long double> acc;
  std::size_t visited = 0;

  std::ptrdiff_t target_index = -1;
  if (f == Functional::kConnection) target_index = g.region().index_of(*spec.target);

  auto evaluate = [&]() -> std::size_t {
    switch (f) {
      case Functional::kClusterSize:
      case Functional::kPrimeClusterSize:
      case Functional::kStarClusterSize:
        return cluster_of(g, [&](std::uint32_t id) { return open[id] != 0; }).size();
      case Functional::kConnection: {
        if (target_index < 0) return 0;
        const auto c = cluster_of(g, [&](std::uint32_t id) { return open[id] != 0; });
        return std::binary_search(c.begin(), c.end(), static_cast<std::uint32_t>(target_index)) ? 1 : 0;
      }
      case Functional::kHaloSizePJ: {
        const auto c = cluster_of(g, [&](std::uint32_t id) { return open[id] != 0; });
        std::vector<std::uint8_t> in(nv, 0);
        for (auto v : c) in[v] = 1;
        std::size_t count = c.size();
        for (auto v : c) {
          for (auto id : g.out_edges(v)) {
            const auto w = g.other(id, v);
            if (open_j[id] && !in[w]) {
              in[w] = 1;
              ++count;
            }
          }
        }
        return count;
      }
      case Functional::kExplorationClusterSize:
      case Functional::kExplorationHaloSize: {
        ExplorationOptions eo;
        eo.stop_at_boundary = spec.stop_at_boundary;
        const auto r = Exploration(g, s.delta, s.q, marks, eo).run();
        const auto c = r.untagged_cluster(g);
        if (f == Functional::kExplorationClusterSize) return c.size();
        std::vector<std::uint8_t> in(nv, 0);
        for (auto v : c) in[v] = 1;
        std::size_t count = c.size();
        for (auto v : c) {
          for (auto id : g.out_edges(v)) {
            const auto w = g.other(id, v);
            if (open_j[id] && !in[w]) {
              in[w] = 1;
              ++count;
            }
          }
        }
        return count;
      }
    }
    return 0;
  };

  const std::size_t nt = s.random_t.size();
  std::iota(order.begin(), order.end(), 0u);
  std::size_t perm_index = 0;
  do {
    for (std::size_t rank = 0; rank < ne; ++rank) {
      marks.edge_[order[rank]][ch(Channel::kPriority)] = (rank + 1.0) / (ne + 1.0);
    }
    for (std::uint64_t tmask = 0; tmask < (std::uint64_t{1} << nt); ++tmask) {
      long double t_prob = 1.0L;
      for (std::uint32_t v = 0; v < nv; ++v) {
        const double t = g.tail_probability(v);
        marks.vertex_[v] = t >= 1.0 ? 0.5 : (t <= 0.0 ? 0.5 : marks.vertex_[v]);
      }
      for (std::size_t i = 0; i < nt; ++i) {
        const auto v = s.random_t[i];
        const Split sp = split(g.tail_probability(v));
        const bool on = (tmask >> i) & 1;
        marks.vertex_[v] = on ? sp.lo_rep : sp.hi_rep;
        t_prob *= on ? sp.lo_prob : sp.hi_prob;
      }
      std::fill(digit.begin(), digit.end(), 0);
      while (true) {
        long double prob = t_prob / static_cast<long double>(s.permutations);
        for (std::size_t id = 0; id < ne; ++id) {
          const Atom& a = s.edge_atoms[id][digit[id]];
          prob *= a.prob;
          open[id] = a.open;
          open_j[id] = a.open_j;
          for (auto c : {Channel::kU, Channel::kVx, Channel::kVy, Channel::kW, Channel::kX}) {
            marks.edge_[id][ch(c)] = a.mark[ch(c)];
          }
        }
        acc[evaluate()] += prob;
        ++visited;
        std::size_t i = 0;
        while (i < ne && ++digit[i] == s.edge_atoms[i].size()) digit[i++] = 0;
        if (i == ne) break;
      }
    }
    ++perm_index;
  } while (is_exploration(f) && std::next_permutation(order.begin(), order.end()));

  ExactDistribution out;
  out.functional = f;
  out.atoms = visited;
  for (const auto& [v, p] : acc) out.support.emplace_back(v, static_cast<double>(p));
  if (std::abs(out.total() - 1.0) > 1e-12) {
    throw Error(ErrorKind::kInternalConsistency, where, "probabilities sum to " + std::to_string(out.total()));
  }
  return out;
}

DominationCheck exact_domination_check(const Kernel& j, const Kernel& jp, const Region& region,
                                       std::optional<double> p_override) {
  EnumerationSpec spec{j, jp, region, std::nullopt, std::nullopt, CouplingMode::kConservative, std::nullopt};
  DominationCheck out;
  out.prime = enumerate_exact(spec, Functional::kPrimeClusterSize);
  out.p = p_override.value_or(compute_q(j, jp).p);
  spec.p = out.p;
  out.halo = enumerate_exact(spec, Functional::kHaloSizePJ);
  for (std::size_t k = 1; k <= region.size(); ++k) {
    if (out.prime.cdf(k) < out.halo.cdf(k) - 1e-12) {
      out.dominated = false;
      out.counterexample = k;
      break;
    }
  }
  return out;
}

}  // namespace lrp
