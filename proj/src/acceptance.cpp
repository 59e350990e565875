#include "lrp/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "lrp/cli.hpp"
#include "lrp/coupling.hpp"
#include "lrp/directed.hpp"
#include "lrp/montecarlo.hpp"
#include "lrp/oracle.hpp"
#include "lrp/parallel.hpp"

namespace lrp {

namespace {

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Kernel diag_mixture() {
  return Kernel::table(2, Orientation::kUndirected,
                       {{Vertex{1, 0}, 0.25}, {Vertex{0, 1}, 0.25}, {Vertex{1, 1}, 0.1}, {Vertex{1, -1}, 0.1}});
}

CriterionResult exploration_equals_bfs(const AcceptanceOptions& o) {
  CriterionResult r{1, "exploration equals BFS without Delta", false, {}, 0.0};
  const auto k = Kernel::nearest_neighbour(2, 0.45);
  const RegionGraph g(k, ball(2, 6));
  const std::size_t seeds = 10000;
  const auto bad = map_replicas<int>(seeds, o.workers, [&](std::size_t s) {
    const FieldMarks m(g, MarkField(s));
    const auto bfs = bfs_cluster(g, m);
    const auto full = Exploration(g, DifferenceSet(), 0.0, m, {AssertLevel::kOff, false}).run();
    const auto stopped = Exploration(g, DifferenceSet(), 0.0, m).run();
    const bool same = full.explored_vertices() == bfs.vertices &&
                      (stopped.termination == Termination::kReachedT) == bfs.reaches_boundary;
    return same ? 0 : 1;
  });
  int mismatches = 0;
  for (int b : bad) mismatches += b;
  r.pass = mismatches == 0;
  r.detail = fmt("Z^2, J=0.45 nn, n=6: %d mismatches over %zu seeds", mismatches, seeds);
  return r;
}

Kernel random_table(std::mt19937_64& rng, int d, Orientation o) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::bernoulli_distribution keep(0.5);
  const int range = std::uniform_int_distribution<int>(1, 2)(rng);
  Kernel::Entries e;
  for (const auto& z : cube_displacements(d, range)) {
    if (o == Orientation::kUndirected && !(Vertex(d) < z)) continue;
    if (z.l1() == 1 || keep(rng)) e.emplace_back(z, u(rng));
  }
  return Kernel::table(d, o, e);
}

Kernel random_perturbation(std::mt19937_64& rng, const Kernel& j) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Kernel::Entries over;
  for (const auto& z : j.support()) {
    if (j.orientation() == Orientation::kUndirected && !(Vertex(j.dim()) < z)) continue;
    if (over.empty() || u(rng) < 0.35) over.emplace_back(z, j.value(z) * u(rng) * 0.99);
  }
  return j.with_overrides(over);
}

CriterionResult lemma_assertions(const AcceptanceOptions&) {
  CriterionResult r{2, "consistency assertions on randomized runs", false, {}, 0.0};
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> uq(0.0, 1.0);
  const int tuples = 10000;
  int failures = 0;
  std::string first;
  std::size_t stages = 0;
  for (int t = 0; t < tuples; ++t) {
    const int d = 1 + static_cast<int>(rng() % 2);
    const Orientation orient = rng() % 5 == 0 ? Orientation::kDirected : Orientation::kUndirected;
    const auto j = random_table(rng, d, orient);
    const auto jp = random_perturbation(rng, j);
    const auto delta = delta_of(j, jp);
    const int n = static_cast<int>(rng() % 7);
    const int qk = static_cast<int>(rng() % 10);
    const double q = qk == 0 ? 0.0 : (qk == 1 ? 1.0 : uq(rng));
    const bool stop = rng() % 2 == 0;
    const std::uint64_t seed = rng();
    try {
      const auto res = explore(j, delta, q, n, MarkField(seed), {AssertLevel::kFullTrace, stop});
      stages += res.stages;
    } catch (const Error& e) {
      if (failures++ == 0) first = e.what();
    }
  }
  r.pass = failures == 0;
  r.detail = fmt("%d failures over %d tuples (%zu stages checked)", failures, tuples, stages);
  if (!first.empty()) r.detail += "; first: " + first.substr(0, 200);
  return r;
}

struct ContainmentTally {
  std::size_t holds = 0, na = 0, violated = 0;
};

ContainmentTally tally(const Coupler& c, std::size_t seeds, unsigned workers) {
  const auto res = map_replicas<int>(seeds, workers, [&](std::size_t s) {
    const auto sample = c.sample(s);
    const auto a = check_containment(sample);
    const auto b = check_star_containment(sample);
    if (a == Containment::kViolated || b == Containment::kViolated) return 2;
    return a == Containment::kHolds ? 1 : 0;
  });
  ContainmentTally t;
  for (int x : res) {
    if (x == 2) ++t.violated;
    else if (x == 1) ++t.holds;
    else ++t.na;
  }
  return t;
}

CriterionResult containment(const AcceptanceOptions& o) {
  CriterionResult r{3, "containment theorem", false, {}, 0.0};
  const std::size_t seeds = 100000;
  const auto j = Kernel::nearest_neighbour(2, 0.45);
  const auto jp = j.with_overrides({{Vertex{1, 0}, 0.3}});
  const auto dj = oriented_square_lattice(0.7, 0.7);
  const auto djp = dj.with_overrides({{Vertex{1, 1}, 0.55}});
  std::ostringstream os;
  bool ok = true;
  for (int n : {4, 6, 8}) {
    const Coupler c(j, jp, ball(2, n), {CouplingMode::kConservative, std::nullopt, AssertLevel::kLemmaChecks});
    const auto t = tally(c, seeds, o.workers);
    ok = ok && t.violated == 0;
    os << "undirected n=" << n << ": " << t.violated << " violated / " << t.holds << " applicable; ";
  }
  for (int n : {4, 6, 8}) {
    const Coupler c(dj, djp, default_region(dj, n),
                    {CouplingMode::kConservative, std::nullopt, AssertLevel::kLemmaChecks});
    const auto t = tally(c, seeds, o.workers);
    ok = ok && t.violated == 0;
    os << "oriented n=" << n << ": " << t.violated << " violated / " << t.holds << " applicable; ";
  }
  r.pass = ok;
  r.detail = os.str() + fmt("%zu seeds each", seeds);
  return r;
}

CriterionResult q_exactness(const AcceptanceOptions&) {
  CriterionResult r{4, "compute_q hand instances", false, {}, 0.0};
  const auto j1 = Kernel::nearest_neighbour(1, 0.5);
  const double q1 = compute_q(j1, j1.with_overrides({{Vertex{1}, 1.0 / 16}})).q;
  const auto j2 = Kernel::nearest_neighbour(2, 0.3);
  const double q2 = compute_q(j2, j2.with_overrides({{Vertex{1, 0}, 0.3 * 0.729}})).q;
  const double e1 = std::abs(q1 - 0.25), e2 = std::abs(q2 - 0.0049);
  r.pass = e1 <= 1e-12 && e2 <= 1e-12;
  r.detail = fmt("q=%.17g (err %.2e), q=%.17g (err %.2e)", q1, e1, q2, e2);
  return r;
}

CriterionResult exact_domination(const AcceptanceOptions& o) {
  CriterionResult r{5, "exact domination on the tiny instance", false, {}, 0.0};
  const auto j = Kernel::nearest_neighbour(1, 0.5);
  const auto jp = j.with_overrides({{Vertex{1}, 1.0 / 16}});
  const auto d = exact_domination_check(j, jp, ball(1, 1));
  // Closed forms: each edge of C'_o is open with probability 1/16; the halo counts
  // every G_J-open edge at o, each with probability 1/2.
  const double a = 1.0 / 16;
  const double prime[4] = {0, (1 - a) * (1 - a), 2 * a * (1 - a), a * a};
  const double halo[4] = {0, 0.25, 0.5, 0.25};
  double err = 0.0;
  for (int k = 1; k <= 3; ++k) {
    err = std::max(err, std::abs(d.prime.probability(k) - prime[k]));
    err = std::max(err, std::abs(d.halo.probability(k) - halo[k]));
  }
  const std::size_t replicas = 100000;
  const auto mc = domination_report(j, jp, 1, replicas, 0, o.workers);
  double worst = 0.0;
  for (std::size_t i = 0; i < mc.sizes.size(); ++i) {
    const std::size_t k = mc.sizes[i];
    for (const auto& [emp, exact] : {std::pair{mc.cdf_prime[i], d.prime.cdf(k)}, std::pair{mc.cdf_halo[i], d.halo.cdf(k)}}) {
      const double se = std::sqrt(std::max(exact * (1 - exact), 1e-300) / replicas);
      const double z = exact * (1 - exact) > 0 ? std::abs(emp - exact) / se : (emp == exact ? 0.0 : 1e9);
      worst = std::max(worst, z);
    }
  }
  r.pass = d.dominated && err <= 1e-12 && worst <= 4.0;
  r.detail = fmt("dominated=%s, p=%.6g, max closed-form error %.2e, max Monte Carlo |z| %.2f at %zu replicas",
                 d.dominated ? "yes" : "no", d.p, err, worst, replicas);
  return r;
}

CriterionResult separation(const AcceptanceOptions& o) {
  CriterionResult r{6, "strict-monotonicity separation", false, {}, 0.0};
  const auto j = diag_mixture();
  const auto jp = j.with_overrides({{Vertex{1, 1}, 0.0}, {Vertex{1, -1}, 0.0}});
  const auto rep = monotonicity_experiment(j, jp, {32}, 10000, 0, 4.0, 1e-3, o.workers);
  const auto& row = rep.rows.front();
  r.pass = row.gap > 0 && row.z >= 3.0;
  r.detail = fmt("n=32: s(J)=%.4f, s(J')=%.4f, gap=%.4f, se=%.4g, gap/se=%.1f", row.s_j.estimate, row.s_jp.estimate,
                 row.gap, row.gap_se, row.z);
  return r;
}

CriterionResult decay(const AcceptanceOptions& o) {
  CriterionResult r{7, "subcritical decay", false, {}, 0.0};
  const auto f2 = estimate_decay(Kernel::nearest_neighbour(2, 0.35), {4, 8, 12, 16}, 100000, 0, o.workers);
  const auto f1 = estimate_decay(Kernel::nearest_neighbour(1, 0.5), {2, 3, 4, 5, 6, 7, 8}, 100000, 0, o.workers);
  const double dev = std::abs(f1.slope - std::log(0.5));
  r.pass = f2.slope < 0 && f2.r2 > 0.95 && f2.dropped.empty() && dev <= 0.05;
  r.detail = fmt("Z^2 J=0.35: slope=%.4f R2=%.4f; Z^1 J=0.5: slope=%.4f (ln 0.5 = %.4f, |diff| %.4f)", f2.slope,
                 f2.r2, f1.slope, std::log(0.5), dev);
  return r;
}

CriterionResult beta_c(const AcceptanceOptions& o) {
  CriterionResult r{8, "criticality sanity constant", false, {}, 0.0};
  PhiFamily fam;
  fam.d = 2;
  fam.table = Kernel::Entries{{Vertex{1, 0}, 1.0}, {Vertex{0, 1}, 1.0}};
  const auto b = bisect_beta_c(fam, 32, 10000, 0.5, 1e-3, 3.0, 0, o.workers);
  const double p = -std::expm1(-b.estimate);
  r.pass = std::abs(p - 0.5) <= 0.02;
  r.detail = fmt("beta=%.4f [%.4f, %.4f], edge probability %.4f (target 0.5 +- 0.02)", b.estimate, b.lo, b.hi, p);
  return r;
}

CriterionResult determinism(const AcceptanceOptions& o) {
  CriterionResult r{9, "determinism", false, {}, 0.0};
  using nlohmann::json;
  const json nn = {{"family", "table"}, {"d", 2}, {"params", {{"nearest_neighbour", 0.45}}}};
  json nnp = nn;
  nnp["overrides"] = json::array({{{"displacement", {1, 0}}, {"value", 0.3}}});
  const std::vector<json> configs = {
      {{"command", "theta"}, {"kernel", nn}, {"n", 8}, {"replicas", 2000}, {"seed", "0xbeef"}},
      {{"command", "couple"}, {"kernel", nn}, {"kernel_prime", nnp}, {"n", 4}, {"replicas", 500}, {"domination", true}},
      {{"command", "explore"}, {"kernel", nn}, {"kernel_prime", nnp}, {"n", 4}, {"seed", 3}, {"assert", "full-trace"}},
      {{"command", "enumerate"},
       {"kernel", {{"family", "table"}, {"d", 1}, {"params", {{"nearest_neighbour", 0.5}}}}},
       {"kernel_prime",
        {{"family", "table"}, {"d", 1}, {"params", {{"nearest_neighbour", 0.5}}},
         {"overrides", json::array({{{"displacement", {1}}, {"value", 0.0625}}})}}},
       {"n", 1}, {"functional", "exploration_halo_size"}, {"domination", true}},
      {{"command", "decay"}, {"kernel", nn}, {"n_list", {2, 3, 4}}, {"replicas", 1000}},
  };
  int diffs = 0;
  for (const auto& c : configs) {
    const auto a = run_command(c, {1, false}).document.dump();
    const auto b = run_command(c, {1, false}).document.dump();
    const auto p = run_command(c, {std::max(2u, o.workers), false}).document.dump();
    diffs += (a != b) + (a != p);
  }
  r.pass = diffs == 0;
  r.detail = fmt("%d differing documents over %zu configs (repeat and parallel runs)", diffs, configs.size());
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  using Fn = CriterionResult (*)(const AcceptanceOptions&);
  const Fn all[] = {exploration_equals_bfs, lemma_assertions, containment, q_exactness, exact_domination,
                    separation,             decay,            beta_c,      determinism};
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 9; ++id) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = all[id - 1](options);
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion " + std::to_string(id);
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_result) on_result(r);
    out.push_back(r);
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  return fmt("[%s] %d %s: %s (%.1fs)", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str(), r.seconds);
}

}  // namespace lrp
