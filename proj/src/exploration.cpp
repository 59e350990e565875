#include "lrp/exploration.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "lrp/errors.hpp"

namespace lrp {

const char* to_string(EdgeStatus s) {
  switch (s) {
    case EdgeStatus::kUnseen: return "unseen";
    case EdgeStatus::kClosedInG: return "closed_in_G";
    case EdgeStatus::kOpenInG: return "open_in_G";
    case EdgeStatus::kOpenInH: return "open_in_H";
    case EdgeStatus::kClosedInHByStep5: return "closed_in_H_by_5";
    case EdgeStatus::kTagged: return "tagged";
  }
  return "?";
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kRunning: return "running";
    case Termination::kReachedT: return "reached_T";
    case Termination::kExhausted: return "exhausted";
  }
  return "?";
}

const char* to_string(AssertLevel a) {
  switch (a) {
    case AssertLevel::kOff: return "off";
    case AssertLevel::kLemmaChecks: return "lemma-checks";
    case AssertLevel::kFullTrace: return "full-trace";
  }
  return "?";
}

AssertLevel parse_assert_level(const std::string& s) {
  if (s == "off") return AssertLevel::kOff;
  if (s == "lemma-checks") return AssertLevel::kLemmaChecks;
  if (s == "full-trace") return AssertLevel::kFullTrace;
  throw Error(ErrorKind::kValidation, "cli.assert_level", "unknown assertion level '" + s + "'");
}

namespace {

constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

bool h_open(EdgeStatus s) { return s == EdgeStatus::kOpenInH || s == EdgeStatus::kTagged; }

}  // namespace

std::vector<std::uint32_t> ExplorationResult::explored_vertices() const {
  std::vector<std::uint32_t> out = active;
  out.insert(out.end(), boundary.begin(), boundary.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::uint32_t> ExplorationResult::untagged_cluster(const RegionGraph& g) const {
  std::vector<std::uint8_t> seen(g.num_vertices(), 0);
  std::vector<std::uint32_t> stack{g.origin()}, out;
  seen[g.origin()] = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    out.push_back(v);
    auto visit = [&](std::uint32_t id) {
      if (statuses[id] != EdgeStatus::kOpenInH) return;
      const auto w = g.other(id, v);
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    };
    for (auto id : g.out_edges(v)) visit(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void write_trace(std::ostream& os, const RegionGraph& g, const std::vector<TraceRecord>& trace) {
  for (const auto& r : trace) {
    nlohmann::json j;
    j["stage"] = r.stage;
    j["step"] = r.step;
    j["edge"] = r.edge >= 0 ? nlohmann::json(g.key(static_cast<std::size_t>(r.edge)).str()) : nlohmann::json();
    j["outcome"] = r.outcome;
    os << j.dump() << '\n';
  }
}

Exploration::Exploration(const RegionGraph& graph, const DifferenceSet& delta, double q,
                         const MarkSource& marks, ExplorationOptions options)
    : g_(graph), marks_(marks), q_(q), options_(options) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw Error(ErrorKind::kValidation, "exploration.initialize", "q must lie in [0,1]");
  }
  if (!delta.empty() && delta.orientation() != graph.kernel().orientation()) {
    throw Error(ErrorKind::kValidation, "exploration.initialize", "Delta orientation differs from the kernel");
  }
  const std::size_t nv = g_.num_vertices();
  const std::size_t ne = g_.num_edges();
  vstate_.assign(nv, kNone);
  tagged_.assign(nv, 0);
  l_count_.resize(nv);
  for (std::uint32_t v = 0; v < nv; ++v) l_count_[v] = static_cast<std::uint32_t>(g_.out_edges(v).size());
  in_l_.assign(ne, 1);
  l_size_ = ne;
  delta_.assign(ne, 0);
  if (!delta.empty()) {
    for (std::uint32_t id = 0; id < ne; ++id) delta_[id] = delta.contains(g_.displacement(id)) ? 1 : 0;
  }
  status_.assign(ne, EdgeStatus::kUnseen);
  revealed_u_.assign(ne, 0);
  revealed_v_.assign(ne, 0);
  revealer_.assign(ne, -1);
  f_failed_.assign(nv, 0);
  if (checking()) {
    tag_stage_.assign(nv, kNever);
    h_stage_.assign(ne, kNever);
  }
  activate(g_.origin());
  if (options_.asserts == AssertLevel::kFullTrace) trace("init", -1, "A={o}");
}

void Exploration::trace(const std::string& steps, std::int64_t edge, const std::string& outcome) {
  if (options_.asserts != AssertLevel::kFullTrace) return;
  trace_.push_back({stage_, steps, edge, outcome});
}

void Exploration::fail(const std::string& message) const {
  std::ostringstream os;
  os << "stage " << stage_ << ": " << message;
  if (!trace_.empty()) {
    os << "\ntrace tail:\n";
    const std::size_t from = trace_.size() > 20 ? trace_.size() - 20 : 0;
    std::vector<TraceRecord> tail(trace_.begin() + static_cast<std::ptrdiff_t>(from), trace_.end());
    write_trace(os, g_, tail);
  }
  throw Error(ErrorKind::kInternalConsistency, "exploration.run", os.str());
}

void Exploration::note_vertex(std::uint32_t v) {
  if (boundary_open(g_, marks_, v)) {
    boundary_reached_ = true;
    if (options_.stop_at_boundary) termination_ = Termination::kReachedT;
  }
}

void Exploration::activate(std::uint32_t v) {
  vstate_[v] = kActive;
  ++num_active_;
  for (auto id : g_.out_edges(v)) {
    if (in_l_[id]) heap_.push({marks_.edge_mark(id, Channel::kPriority), id});
  }
  if (l_count_[v] == 0) pending_.push_back(v);
  note_vertex(v);
}

void Exploration::to_boundary(std::uint32_t v) {
  if (vstate_[v] == kActive) --num_active_;
  vstate_[v] = kBoundary;
}

void Exploration::remove_from_l(std::uint32_t id) {
  if (!in_l_[id]) return;
  in_l_[id] = 0;
  --l_size_;
  const auto& e = g_.edge(id);
  auto dec = [&](std::uint32_t v) {
    if (--l_count_[v] == 0 && vstate_[v] == kActive) pending_.push_back(v);
  };
  dec(e.u);
  if (!g_.directed()) dec(e.v);
}

void Exploration::flush_exhausted() {
  for (auto v : pending_) {
    if (vstate_[v] == kActive && l_count_[v] == 0) to_boundary(v);
  }
  pending_.clear();
}

bool Exploration::f_check(std::uint32_t edge, std::uint32_t y) {
  bool failed = false;
  for (auto id : g_.out_edges(y)) {
    if (id == edge || !in_l_[id] || delta_[id]) continue;
    const auto z = g_.other(id, y);
    if (vstate_[z] == kActive) continue;
    if (checking() && revealed_u_[id]) fail("invariant (iii): U mark of " + g_.key(id).str() + " revealed twice");
    revealed_u_[id] = 1;
    if (marks_.edge_mark(id, Channel::kU) > g_.edge(id).j) {
      status_[id] = EdgeStatus::kClosedInG;
      remove_from_l(id);
    } else {
      status_[id] = EdgeStatus::kOpenInG;
      revealer_[id] = y;
      failed = true;
    }
  }
  if (failed) f_failed_[y] = 1;
  return !failed;
}

bool Exploration::s_check(std::uint32_t edge, std::uint32_t y) {
  const double keep = 1.0 - q_;
  std::size_t hits = 0;
  std::vector<std::uint32_t> dropped;
  for (auto id : g_.out_edges(y)) {
    if (id == edge || !delta_[id]) continue;
    const auto z = g_.other(id, y);
    if (vstate_[z] == kActive) continue;
    const Channel ch = g_.v_channel(id, y);
    const std::uint8_t bit = ch == Channel::kVx ? 1 : 2;
    if (checking() && (revealed_v_[id] & bit)) {
      fail("invariant (iv): V mark of " + g_.key(id).str() + " revealed twice");
    }
    revealed_v_[id] |= bit;
    if (marks_.edge_mark(id, ch) <= keep) {
      ++hits;
    } else {
      dropped.push_back(id);
    }
  }
  if (hits == 0) {
    to_boundary(y);
    tagged_[y] = 1;
    if (checking()) tag_stage_[y] = stage_;
    for (auto id : g_.out_edges(y)) remove_from_l(id);
    for (auto id : g_.in_edges(y)) remove_from_l(id);
    note_vertex(y);
    return true;
  }
  activate(y);
  for (auto id : dropped) remove_from_l(id);
  return false;
}

void Exploration::step() {
  if (terminated()) return;
  // (P.a)
  flush_exhausted();
  if (num_active_ == 0) {
    termination_ = Termination::kExhausted;
    trace("P.a", -1, "A empty");
    return;
  }
  ++stage_;
  // (P.b), (P.c)
  std::uint32_t e = 0;
  while (true) {
    if (heap_.empty()) fail("active vertices remain but no unexplored edge is adjacent to A");
    e = heap_.top().edge;
    heap_.pop();
    if (in_l_[e]) break;
  }
  remove_from_l(e);

  // (1)
  const auto& slot = g_.edge(e);
  std::uint32_t x = slot.u, y = slot.v;
  if (g_.directed()) {
    if (vstate_[x] != kActive) fail("picked an edge whose tail is not active");
  } else if (vstate_[x] != kActive) {
    std::swap(x, y);
  }
  if (vstate_[y] == kActive) {
    trace("P,1a", e, "both endpoints active");
    return;
  }
  if (vstate_[y] == kBoundary) {
    // Directed: in-edges of an exhausted head stay in L until picked.
    if (g_.directed()) {
      trace("P,1a", e, "head already in B");
      return;
    }
    if (checking()) fail("far endpoint of " + g_.key(e).str() + " already in B");
  }

  std::string steps = "P,1b";
  bool run_f = false;
  if (status_[e] == EdgeStatus::kOpenInG) {
    // (2): mark revealed in an earlier F-check.
    steps += ",2:E";
    if (checking()) {
      if (revealer_[e] != static_cast<std::int64_t>(x) || f_failed_[y]) {
        fail("invariant (i): E-hit " + g_.key(e).str() + " was not revealed by its active endpoint");
      }
      if (delta_[e]) fail("invariant (v): E-hit " + g_.key(e).str() + " lies in Delta");
    }
    run_f = true;
  } else {
    // (3)
    steps += ",2,3";
    if (checking() && revealed_u_[e]) fail("U mark of " + g_.key(e).str() + " revealed twice");
    revealed_u_[e] = 1;
    if (marks_.edge_mark(e, Channel::kU) > slot.j) {
      status_[e] = EdgeStatus::kClosedInG;
      trace(steps + "a", e, "closed in G");
      return;
    }
    status_[e] = EdgeStatus::kOpenInG;
    if (!delta_[e]) {
      steps += "b.i";
      run_f = true;
    } else {
      // (5)
      steps += "b.ii,5";
      if (marks_.edge_mark(e, Channel::kW) <= 1.0 - q_) {
        status_[e] = EdgeStatus::kOpenInH;
        if (checking()) h_stage_[e] = stage_;
        activate(y);
        trace(steps + "a", e, "open in H");
      } else {
        status_[e] = EdgeStatus::kClosedInHByStep5;
        trace(steps + "b", e, "open in G, closed in H");
      }
      return;
    }
  }
  if (run_f) {
    const bool pass = f_check(e, y);
    status_[e] = EdgeStatus::kOpenInH;
    if (checking()) h_stage_[e] = stage_;
    if (!pass) {
      activate(y);
      trace(steps + ",F:fail,4a", e, "open in H, y active");
    } else if (s_check(e, y)) {
      status_[e] = EdgeStatus::kTagged;
      trace(steps + ",F:pass,4b,S:tag", e, "tagged, y in B");
    } else {
      trace(steps + ",F:pass,4b,S:untagged", e, "open in H, y active");
    }
  }
}

ExplorationResult Exploration::run() {
  const std::size_t bound = g_.num_edges() + g_.num_vertices() + 1;
  while (!terminated()) {
    step();
    if (stage_ > bound) fail("stage count exceeds |E[n]| + |ball|");
  }
  if (checking()) post_checks();
  return result();
}

void Exploration::post_checks() const {
  const std::size_t ne = g_.num_edges();
  for (std::uint32_t id = 0; id < ne; ++id) {
    const auto& e = g_.edge(id);
    if (status_[id] == EdgeStatus::kOpenInG && marks_.edge_mark(id, Channel::kU) > e.j) {
      fail("E holds a closed mark on " + g_.key(id).str());
    }
    if (h_open(status_[id])) {
      // invariant (ii): no H-neighbour of a tagged vertex appears after the tag.
      for (auto v : {e.u, e.v}) {
        if (tagged_[v] && h_stage_[id] != kNever && h_stage_[id] > tag_stage_[v]) {
          fail("invariant (ii): " + g_.key(id).str() + " opened in H after its endpoint was tagged");
        }
      }
    }
  }
  std::size_t untagged_h = 0;
  for (std::uint32_t id = 0; id < ne; ++id) {
    if (status_[id] == EdgeStatus::kOpenInH) ++untagged_h;
    if (status_[id] == EdgeStatus::kTagged) {
      const auto& e = g_.edge(id);
      const auto far = tagged_[e.v] ? e.v : e.u;
      if (!tagged_[far] || vstate_[far] != kBoundary) fail("tagged edge without a tagged far endpoint in B");
      for (auto j : g_.out_edges(far)) {
        if (in_l_[j]) fail("tagged vertex keeps an unexplored edge");
        if (j != id && h_open(status_[j])) fail("tagged vertex is not a leaf of H");
      }
      for (auto j : g_.in_edges(far)) {
        if (in_l_[j]) fail("tagged vertex keeps an unexplored in-edge");
        if (j != id && h_open(status_[j])) fail("tagged vertex is not a leaf of H");
      }
    }
  }
  const auto cluster = result().untagged_cluster(g_);
  if (untagged_h + 1 != cluster.size()) {
    fail("untagged open-in-H edges do not form a tree on the cluster of o (" + std::to_string(untagged_h) +
         " edges, " + std::to_string(cluster.size()) + " vertices)");
  }
}

ExplorationResult Exploration::result() const {
  ExplorationResult r;
  r.termination = termination_;
  r.boundary_reached = boundary_reached_;
  r.stages = stage_;
  for (std::uint32_t v = 0; v < vstate_.size(); ++v) {
    if (vstate_[v] == kActive) r.active.push_back(v);
    if (vstate_[v] == kBoundary) r.boundary.push_back(v);
    if (tagged_[v]) r.tagged_vertices.push_back(v);
  }
  r.statuses = status_;
  r.trace = trace_;
  return r;
}

ExplorationResult explore(const Kernel& j, const DifferenceSet& delta, double q, int n,
                          const MarkField& field, ExplorationOptions options) {
  const RegionGraph g(j, ball(j.dim(), n));
  const FieldMarks marks(g, field);
  return Exploration(g, delta, q, marks, options).run();
}

}  // namespace lrp
