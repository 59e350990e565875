#include "lrp/cli.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "lrp/acceptance.hpp"
#include "lrp/coupling.hpp"
#include "lrp/directed.hpp"
#include "lrp/montecarlo.hpp"
#include "lrp/oracle.hpp"
#include "lrp/parallel.hpp"

namespace lrp {

using nlohmann::json;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSize: return kExitSize;
    case ErrorKind::kBracketing: return kExitBracketing;
    case ErrorKind::kInternalConsistency: return kExitInternal;
    case ErrorKind::kFit: return kExitFit;
    case ErrorKind::kDomain:
    case ErrorKind::kValidation:
    case ErrorKind::kEmptyDelta:
    case ErrorKind::kOrderViolation:
    case ErrorKind::kInfiniteDelta:
    case ErrorKind::kZeroProduct: return kExitValidation;
  }
  return kExitOther;
}

namespace {

constexpr const char* kWhere = "cli.run_command";

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::kValidation, kWhere, msg); }

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& what) {
  if (!obj.is_object()) invalid(what + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) invalid("unknown key '" + k + "' in " + what);
  }
}

const json& need(const json& obj, const std::string& key, const std::string& what) {
  if (!obj.contains(key)) invalid(what + " needs '" + key + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& name) {
  if (!v.is_number()) invalid("'" + name + "' must be a number");
  return v.get<double>();
}

double probability(const json& v, const std::string& name) {
  const double x = number(v, name);
  if (!(x >= 0.0 && x <= 1.0)) invalid("'" + name + "' must lie in [0,1]");
  return x;
}

long long integer(const json& v, const std::string& name, long long lo) {
  if (!v.is_number_integer()) invalid("'" + name + "' must be an integer");
  const auto x = v.get<long long>();
  if (x < lo) invalid("'" + name + "' must be >= " + std::to_string(lo));
  return x;
}

Vertex vertex(const json& v, int d) {
  if (!v.is_array() || static_cast<int>(v.size()) != d) invalid("displacement must be an array of " + std::to_string(d) + " integers");
  std::vector<std::int32_t> c;
  for (const auto& x : v) c.push_back(static_cast<std::int32_t>(integer(x, "coordinate", INT32_MIN)));
  return Vertex::from(c);
}

Kernel::Entries entries(const json& list, int d, const std::string& what) {
  if (!list.is_array()) invalid(what + " must be a list");
  Kernel::Entries out;
  for (const auto& e : list) {
    only_keys(e, {"displacement", "value"}, what + " entry");
    out.emplace_back(vertex(need(e, "displacement", what), d), number(need(e, "value", what), "value"));
  }
  return out;
}

Orientation orientation(const json& v) {
  const auto s = v.get<std::string>();
  if (s == "undirected") return Orientation::kUndirected;
  if (s == "directed") return Orientation::kDirected;
  invalid("orientation must be 'undirected' or 'directed'");
}

json vertex_json(const Vertex& v) { return v.coords(); }

json vertices_json(const Region& r, const std::vector<std::uint32_t>& ids) {
  json a = json::array();
  for (auto i : ids) a.push_back(vertex_json(r.vertex(i)));
  return a;
}

}  // namespace

Kernel parse_kernel(const json& spec) {
  only_keys(spec, {"family", "d", "orientation", "params", "overrides"}, "kernel");
  const auto family = need(spec, "family", "kernel").get<std::string>();
  const Orientation o = spec.contains("orientation") ? orientation(spec.at("orientation")) : Orientation::kUndirected;
  const json params = spec.value("params", json::object());
  Kernel k = [&] {
    if (family == "product-scaled") {
      only_keys(params, {"inner", "p"}, "product-scaled params");
      return Kernel::product_scaled(parse_kernel(need(params, "inner", "product-scaled params")),
                                    number(need(params, "p", "product-scaled params"), "p"));
    }
    const int d = static_cast<int>(integer(need(spec, "d", "kernel"), "d", 1));
    if (d > kMaxDim) invalid("d must be <= " + std::to_string(kMaxDim));
    if (family == "table") {
      only_keys(params, {"entries", "nearest_neighbour", "diagonal"}, "table params");
      Kernel::Entries e;
      if (params.contains("entries")) e = entries(params.at("entries"), d, "entries");
      if (params.contains("nearest_neighbour")) {
        const double v = probability(params.at("nearest_neighbour"), "nearest_neighbour");
        for (const auto& z : cube_displacements(d, 1)) {
          if (z.l1() == 1 && (o == Orientation::kDirected || Vertex(d) < z)) e.emplace_back(z, v);
        }
      }
      if (params.contains("diagonal")) {
        const double v = probability(params.at("diagonal"), "diagonal");
        for (const auto& z : cube_displacements(d, 1)) {
          if (z.l1() == 2 && (o == Orientation::kDirected || Vertex(d) < z)) e.emplace_back(z, v);
        }
      }
      return Kernel::table(d, o, e);
    }
    if (family == "polynomial-phi") {
      only_keys(params, {"beta", "alpha"}, "polynomial-phi params");
      return Kernel::polynomial_phi(d, o, number(need(params, "beta", "polynomial-phi params"), "beta"),
                                    number(need(params, "alpha", "polynomial-phi params"), "alpha"));
    }
    invalid("unknown kernel family '" + family + "'");
  }();
  if (family == "product-scaled" && spec.contains("d") && integer(spec.at("d"), "d", 1) != k.dim()) {
    invalid("d differs from the inner kernel");
  }
  if (spec.contains("overrides")) k = k.with_overrides(entries(spec.at("overrides"), k.dim(), "overrides"));
  return k;
}

json describe_kernel(const Kernel& k) {
  json j;
  j["family"] = to_string(k.family());
  j["d"] = k.dim();
  j["orientation"] = to_string(k.orientation());
  switch (k.family()) {
    case KernelFamily::kTable: {
      json e = json::array();
      for (const auto& [z, v] : k.table_entries()) e.push_back({{"displacement", z.coords()}, {"value", v}});
      j["params"] = {{"entries", e}};
      break;
    }
    case KernelFamily::kPolynomialPhi: j["params"] = {{"beta", k.beta()}, {"alpha", k.alpha()}}; break;
    case KernelFamily::kProductScaled:
      j["params"] = {{"inner", describe_kernel(*k.inner())}, {"p", k.scale_factor()}};
      break;
  }
  json o = json::array();
  for (const auto& [z, v] : k.overrides()) o.push_back({{"displacement", z.coords()}, {"value", v}});
  j["overrides"] = o;
  return j;
}

std::uint64_t parse_seed(const std::string& s) {
  if (s.empty()) invalid("empty seed");
  const bool hex = s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X');
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(hex ? s.substr(2) : s, &used, hex ? 16 : 10);
  } catch (const std::exception&) {
    invalid("seed '" + s + "' is not a decimal or 0x-prefixed hex integer");
  }
  if (used != s.size() - (hex ? 2 : 0) || s[0] == '-') invalid("seed '" + s + "' is not a decimal or 0x-prefixed hex integer");
  return v;
}

std::uint64_t parse_seed(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<long long>() < 0) invalid("seed must be nonnegative");
    return static_cast<std::uint64_t>(v.get<long long>());
  }
  if (v.is_string()) return parse_seed(v.get<std::string>());
  invalid("seed must be an integer or a string");
}

namespace {

const std::map<std::string, std::set<std::string>> kCommandKeys = {
    {"explore", {"kernel", "kernel_prime", "delta", "q", "n", "seed", "assert", "stop_at_boundary"}},
    {"bfs", {"kernel", "n", "seed"}},
    {"couple", {"kernel", "kernel_prime", "n", "seed", "replicas", "q", "mode", "assert", "domination"}},
    {"enumerate",
     {"kernel", "kernel_prime", "n", "q", "p", "mode", "functional", "target", "domination", "stop_at_boundary"}},
    {"theta", {"kernel", "n", "replicas", "seed"}},
    {"susceptibility", {"kernel", "n", "replicas", "seed"}},
    {"decay", {"kernel", "n_list", "replicas", "seed"}},
    {"bisect", {"phi", "n", "replicas", "seed", "theta_target", "tol", "beta_max"}},
    {"monotonicity", {"kernel", "kernel_prime", "n_list", "replicas", "seed", "s_max", "tol"}},
    {"accept", {"criteria"}},
};

const std::map<std::string, std::set<std::string>> kRequired = {
    {"explore", {"kernel", "n"}},
    {"bfs", {"kernel", "n"}},
    {"couple", {"kernel", "kernel_prime", "n"}},
    {"enumerate", {"kernel", "n", "functional"}},
    {"theta", {"kernel", "n", "replicas"}},
    {"susceptibility", {"kernel", "n", "replicas"}},
    {"decay", {"kernel", "n_list", "replicas"}},
    {"bisect", {"phi", "n", "replicas", "beta_max"}},
    {"monotonicity", {"kernel", "kernel_prime", "n_list", "replicas"}},
    {"accept", {}},
};

PhiFamily parse_phi(const json& spec) {
  only_keys(spec, {"d", "orientation", "table", "nearest_neighbour", "alpha"}, "phi");
  PhiFamily f;
  f.d = static_cast<int>(integer(need(spec, "d", "phi"), "d", 1));
  if (f.d > kMaxDim) invalid("d must be <= " + std::to_string(kMaxDim));
  if (spec.contains("orientation")) f.orientation = orientation(spec.at("orientation"));
  const int kinds = spec.contains("table") + spec.contains("nearest_neighbour") + spec.contains("alpha");
  if (kinds != 1) invalid("phi needs exactly one of 'table', 'nearest_neighbour', 'alpha'");
  if (spec.contains("table")) f.table = entries(spec.at("table"), f.d, "phi table");
  if (spec.contains("nearest_neighbour")) {
    const double v = number(spec.at("nearest_neighbour"), "nearest_neighbour");
    Kernel::Entries e;
    for (const auto& z : cube_displacements(f.d, 1)) {
      if (z.l1() == 1 && (f.orientation == Orientation::kDirected || Vertex(f.d) < z)) e.emplace_back(z, v);
    }
    f.table = e;
  }
  if (spec.contains("alpha")) f.alpha = number(spec.at("alpha"), "alpha");
  if (f.table) {
    for (const auto& [z, v] : *f.table) {
      if (v < 0) invalid("phi values must be nonnegative");
    }
  }
  return f;
}

std::vector<int> radii(const json& v) {
  if (!v.is_array() || v.empty()) invalid("'n_list' must be a nonempty list");
  std::vector<int> out;
  for (const auto& x : v) out.push_back(static_cast<int>(integer(x, "n_list entry", 0)));
  return out;
}

}  // namespace

json validate_config(const json& config) {
  if (!config.is_object()) invalid("config must be an object");
  const auto cmd_it = config.find("command");
  if (cmd_it == config.end() || !cmd_it->is_string()) invalid("config needs a string 'command'");
  const std::string cmd = cmd_it->get<std::string>();
  const auto keys = kCommandKeys.find(cmd);
  if (keys == kCommandKeys.end()) invalid("unknown command '" + cmd + "'");
  std::set<std::string> allowed = keys->second;
  allowed.insert("command");
  only_keys(config, allowed, "config");
  for (const auto& k : kRequired.at(cmd)) need(config, k, "command '" + cmd + "'");

  json c = config;
  if (cmd != "accept") c["seed"] = parse_seed(config.value("seed", json(0)));
  // Type and range checks; parse errors surface as validation errors.
  if (c.contains("kernel")) parse_kernel(c["kernel"]);
  if (c.contains("kernel_prime")) parse_kernel(c["kernel_prime"]);
  if (c.contains("n")) integer(c["n"], "n", 0);
  if (c.contains("n_list")) radii(c["n_list"]);
  if (c.contains("replicas")) integer(c["replicas"], "replicas", 1);
  if (c.contains("q")) probability(c["q"], "q");
  if (c.contains("p")) probability(c["p"], "p");
  if (c.contains("mode")) {
    const auto m = c["mode"].get<std::string>();
    if (m != "conservative" && m != "exact_marginal") invalid("mode must be 'conservative' or 'exact_marginal'");
  }
  if (c.contains("assert")) parse_assert_level(c["assert"].get<std::string>());
  if (c.contains("functional")) parse_functional(c["functional"].get<std::string>());
  if (c.contains("stop_at_boundary") && !c["stop_at_boundary"].is_boolean()) invalid("'stop_at_boundary' must be a boolean");
  if (c.contains("domination") && !c["domination"].is_boolean()) invalid("'domination' must be a boolean");
  if (c.contains("phi")) parse_phi(c["phi"]);
  if (c.contains("theta_target")) probability(c["theta_target"], "theta_target");
  for (const char* k : {"tol", "beta_max", "s_max"}) {
    if (c.contains(k) && !(number(c[k], k) > 0.0)) invalid(std::string("'") + k + "' must be positive");
  }
  if (c.contains("delta")) {
    if (!c["delta"].is_array()) invalid("'delta' must be a list of displacements");
    const int d = parse_kernel(c["kernel"]).dim();
    for (const auto& z : c["delta"]) vertex(z, d);
  }
  if (c.contains("target")) vertex(c["target"], parse_kernel(c["kernel"]).dim());
  if (c.contains("criteria")) {
    if (!c["criteria"].is_array()) invalid("'criteria' must be a list");
    for (const auto& x : c["criteria"]) {
      const auto id = integer(x, "criterion", 1);
      if (id > 9) invalid("criteria are numbered 1..9");
    }
  }

  // Defaults, so the canonical form (and its digest) is explicit.
  if (cmd == "explore" || cmd == "couple") c.emplace("assert", "off");
  if (cmd == "explore" || cmd == "enumerate") c.emplace("stop_at_boundary", true);
  if (cmd == "couple" || cmd == "enumerate") c.emplace("mode", "conservative");
  if (cmd == "couple") c.emplace("replicas", 1);
  if (cmd == "couple" || cmd == "enumerate") c.emplace("domination", false);
  if (cmd == "bisect") {
    c.emplace("theta_target", 0.5);
    c.emplace("tol", 1e-3);
  }
  if (cmd == "monotonicity") {
    c.emplace("s_max", 4.0);
    c.emplace("tol", 1e-3);
  }
  return c;
}

std::string config_digest(const json& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](std::string_view s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  feed(canonical.dump());
  feed("|");
  feed(kGeneratorVersion);
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

namespace {

json report_json(const EstimateReport& r) {
  return {{"estimate", r.estimate}, {"stderr", r.stderr_}, {"replicas", r.replicas},
          {"seed_first", r.seed0}, {"seed_last", r.seed0 + r.replicas - 1}, {"n", r.n}};
}

json bisection_json(const Bisection& b) {
  json ev = json::array();
  for (const auto& p : b.evaluations) ev.push_back({{"parameter", p.parameter}, {"theta", p.theta}, {"stderr", p.stderr_}});
  return {{"estimate", b.estimate}, {"bracket", {b.lo, b.hi}}, {"evaluations", ev}};
}

json distribution_json(const ExactDistribution& d) {
  json s = json::array();
  for (const auto& [v, p] : d.support) s.push_back({{"value", v}, {"probability", p}});
  return {{"functional", to_string(d.functional)}, {"atoms", d.atoms}, {"support", s}, {"mean", d.mean()},
          {"total", d.total()}};
}

std::vector<CurvePoint> points_of(const Bisection& b) { return b.evaluations; }

CouplingMode mode_of(const json& c) {
  return c.value("mode", "conservative") == "exact_marginal" ? CouplingMode::kExactMarginal : CouplingMode::kConservative;
}

std::optional<double> opt_number(const json& c, const char* key) {
  if (!c.contains(key)) return std::nullopt;
  return c.at(key).get<double>();
}

json execute(const json& c, const RunOptions& opt, std::optional<std::string>& csv) {
  const std::string cmd = c.at("command");
  const unsigned workers = opt.workers;
  const std::uint64_t seed = c.contains("seed") ? c.at("seed").get<std::uint64_t>() : 0;
  json out;

  if (cmd == "accept") {
    AcceptanceOptions ao;
    ao.workers = workers;
    if (c.contains("criteria")) ao.only = c.at("criteria").get<std::vector<int>>();
    json rows = json::array();
    bool all = true;
    for (const auto& r : run_acceptance(ao)) {
      rows.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
      all = all && r.pass;
    }
    out["criteria"] = rows;
    out["all_pass"] = all;
    return out;
  }
  if (cmd == "bisect") {
    const auto phi = parse_phi(c.at("phi"));
    const auto b = bisect_beta_c(phi, c.at("n"), c.at("replicas"), c.at("theta_target"), c.at("tol"),
                                 c.at("beta_max"), seed, workers);
    out = bisection_json(b);
    out["edge_probability_at_estimate"] = phi.table ? json(phi.at(b.estimate).value(phi.table->front().first)) : json();
    csv = to_csv(points_of(b));
    return out;
  }

  const Kernel j = parse_kernel(c.at("kernel"));
  std::optional<Kernel> jp;
  if (c.contains("kernel_prime")) jp = parse_kernel(c.at("kernel_prime"));

  if (cmd == "explore") {
    const int n = c.at("n");
    DifferenceSet delta;
    double q = 0.0;
    if (jp) {
      const auto params = compute_q(j, *jp);
      delta = params.delta;
      q = params.q;
    }
    if (c.contains("delta")) {
      std::vector<Vertex> zs;
      for (const auto& z : c.at("delta")) zs.push_back(vertex(z, j.dim()));
      delta = DifferenceSet(j.orientation(), zs);
    }
    if (c.contains("q")) q = c.at("q");
    ExplorationOptions eo;
    eo.asserts = parse_assert_level(c.at("assert"));
    eo.stop_at_boundary = c.at("stop_at_boundary");
    const RegionGraph g(j, default_region(j, n));
    const FieldMarks marks(g, MarkField(seed));
    const auto r = Exploration(g, delta, q, marks, eo).run();
    std::map<std::string, std::size_t> counts;
    for (auto s : r.statuses) ++counts[to_string(s)];
    out["termination"] = to_string(r.termination);
    out["boundary_reached"] = r.boundary_reached;
    out["stages"] = r.stages;
    out["q"] = q;
    out["delta"] = json::array();
    for (const auto& z : delta.displacements()) out["delta"].push_back(z.coords());
    out["vertices"] = vertices_json(g.region(), r.explored_vertices());
    out["active"] = vertices_json(g.region(), r.active);
    out["boundary"] = vertices_json(g.region(), r.boundary);
    out["tagged"] = vertices_json(g.region(), r.tagged_vertices);
    out["cluster_h"] = vertices_json(g.region(), r.untagged_cluster(g));
    out["edge_statuses"] = counts;
    if (eo.asserts == AssertLevel::kFullTrace) {
      std::ostringstream os;
      write_trace(os, g, r.trace);
      json lines = json::array();
      std::istringstream is(os.str());
      for (std::string line; std::getline(is, line);) lines.push_back(json::parse(line));
      out["trace"] = lines;
    }
    return out;
  }
  if (cmd == "bfs") {
    const RegionGraph g(j, default_region(j, c.at("n")));
    const auto b = bfs_cluster(g, FieldMarks(g, MarkField(seed)));
    out["vertices"] = vertices_json(g.region(), b.vertices);
    out["open_edges"] = b.edges.size();
    out["reaches_boundary"] = b.reaches_boundary;
    return out;
  }
  if (cmd == "couple") {
    const int n = c.at("n");
    CouplerOptions co;
    co.mode = mode_of(c);
    co.q_override = opt_number(c, "q");
    co.asserts = parse_assert_level(c.at("assert"));
    const Coupler coupler(j, *jp, default_region(j, n), co);
    const std::size_t replicas = c.at("replicas");
    struct Row {
      Containment prime = Containment::kNotApplicable;
      Containment star = Containment::kNotApplicable;
    };
    const auto rows = map_replicas<Row>(replicas, workers, [&](std::size_t i) {
      const auto s = coupler.sample(seed + i);
      return Row{check_containment(s), check_star_containment(s)};
    });
    std::map<std::string, std::size_t> prime, star;
    json violations = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      ++prime[to_string(rows[i].prime)];
      ++star[to_string(rows[i].star)];
      if (rows[i].prime == Containment::kViolated || rows[i].star == Containment::kViolated) violations.push_back(seed + i);
    }
    const auto& p = coupler.params();
    out["params"] = {{"q", coupler.q()}, {"p", 1.0 - coupler.q()}, {"m", p.m}, {"delta_count", p.delta_count},
                     {"survival_lower_bound", p.survival.value}, {"window_radius", p.survival.window_radius},
                     {"tail_bound", p.survival.tail_bound}};
    out["containment"] = prime;
    out["star_containment"] = star;
    out["violating_seeds"] = violations;
    if (replicas == 1) {
      const auto s = coupler.sample(seed);
      const auto& r = coupler.graph().region();
      out["sample"] = {{"termination", to_string(s.exploration.termination)},
                       {"cluster_h", vertices_json(r, s.cluster_h)},
                       {"cluster_star", vertices_json(r, s.cluster_star)},
                       {"cluster_prime", vertices_json(r, s.cluster_prime)},
                       {"halo_vertices", vertices_json(r, s.halo_vertices)},
                       {"halo_edges", s.halo_edges.size()}};
    }
    if (c.at("domination")) {
      const auto d = domination_report(j, *jp, n, replicas, seed, workers, co);
      out["domination"] = {{"p", d.p},        {"sizes", d.sizes},           {"cdf_prime", d.cdf_prime},
                           {"cdf_halo", d.cdf_halo}, {"band", d.band}, {"max_violation", d.max_violation},
                           {"dominated_within_band", d.dominated_within_band}};
    }
    return out;
  }
  if (cmd == "enumerate") {
    EnumerationSpec spec{j, jp, default_region(j, c.at("n")), opt_number(c, "q"), opt_number(c, "p"), mode_of(c),
                         std::nullopt, c.at("stop_at_boundary")};
    if (c.contains("target")) spec.target = vertex(c.at("target"), j.dim());
    const auto f = parse_functional(c.at("functional"));
    out["distribution"] = distribution_json(enumerate_exact(spec, f));
    if (c.at("domination")) {
      if (!jp) invalid("domination needs 'kernel_prime'");
      const auto d = exact_domination_check(j, *jp, spec.region, spec.p);
      out["domination"] = {{"dominated", d.dominated}, {"p", d.p}, {"prime", distribution_json(d.prime)},
                           {"halo", distribution_json(d.halo)}};
      out["domination"]["counterexample"] = d.counterexample ? json(*d.counterexample) : json();
    }
    return out;
  }
  if (cmd == "theta") return report_json(estimate_theta(j, c.at("n"), c.at("replicas"), seed, workers));
  if (cmd == "susceptibility") {
    return report_json(estimate_susceptibility(j, c.at("n"), c.at("replicas"), seed, workers));
  }
  if (cmd == "decay") {
    const auto f = estimate_decay(j, radii(c.at("n_list")), c.at("replicas"), seed, workers);
    json pts = json::array();
    std::vector<CurvePoint> rows;
    for (const auto& p : f.points) {
      pts.push_back(report_json(p));
      rows.push_back({p.n, static_cast<double>(p.n), p.estimate, p.stderr_});
    }
    csv = to_csv(rows);
    return {{"points", pts}, {"dropped", f.dropped}, {"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
  }
  if (cmd == "monotonicity") {
    const auto r = monotonicity_experiment(j, *jp, radii(c.at("n_list")), c.at("replicas"), seed, c.at("s_max"),
                                           c.at("tol"), workers);
    json rows = json::array();
    std::vector<CurvePoint> pts;
    for (const auto& row : r.rows) {
      rows.push_back({{"n", row.n}, {"s_j", bisection_json(row.s_j)}, {"s_jp", bisection_json(row.s_jp)},
                      {"se_j", row.se_j}, {"se_jp", row.se_jp}, {"gap", row.gap}, {"gap_se", row.gap_se},
                      {"z", row.z}});
      for (const auto& p : row.s_j.evaluations) pts.push_back(p);
      for (const auto& p : row.s_jp.evaluations) pts.push_back(p);
    }
    csv = to_csv(pts);
    return {{"rows", rows}};
  }
  invalid("unknown command '" + cmd + "'");
}

}  // namespace

RunResult run_command(const json& config, const RunOptions& options) {
  RunResult res;
  json& doc = res.document;
  doc["schema_version"] = kSchemaVersion;
  doc["generator"] = std::string(kGeneratorVersion);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    json canonical;
    try {
      canonical = validate_config(config);
    } catch (const json::exception& e) {
      invalid(std::string("malformed config: ") + e.what());
    }
    doc["config"] = canonical;
    doc["config_digest"] = config_digest(canonical);
    doc["command"] = canonical.at("command");
    doc["results"] = execute(canonical, options, res.csv);
    if (canonical.at("command") == "accept" && !doc["results"].at("all_pass").get<bool>()) res.exit_code = kExitOther;
    if (doc["results"].contains("violating_seeds") && !doc["results"]["violating_seeds"].empty()) {
      res.exit_code = kExitInternal;
      doc["error"] = {{"kind", to_string(ErrorKind::kInternalConsistency)},
                      {"where", "coupling.check_containment"},
                      {"message", "containment violated on " +
                                      std::to_string(doc["results"]["violating_seeds"].size()) + " seeds"}};
    }
  } catch (const Error& e) {
    res.exit_code = exit_code_for(e.kind());
    doc["error"] = {{"kind", to_string(e.kind())}, {"where", e.where()}, {"message", e.what()}};
  } catch (const json::exception& e) {
    res.exit_code = kExitValidation;
    doc["error"] = {{"kind", "validation"}, {"where", kWhere}, {"message", e.what()}};
  } catch (const std::exception& e) {
    res.exit_code = kExitOther;
    doc["error"] = {{"kind", "other"}, {"where", kWhere}, {"message", e.what()}};
  }
  doc["exit_code"] = res.exit_code;
  if (options.timing) {
    doc["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return res;
}

}  // namespace lrp
