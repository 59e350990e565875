#pragma once

#include <cstdint>
#include <iosfwd>
#include <queue>
#include <string>
#include <vector>

#include "lrp/graph.hpp"

namespace lrp {

enum class EdgeStatus : std::uint8_t {
  kUnseen,
  kClosedInG,
  kOpenInG,          ///< U revealed open during an F-check (member of E), not yet explored
  kOpenInH,
  kClosedInHByStep5, ///< open in G, removed from H by the W mark
  kTagged,           ///< open in H and tagged
};

enum class Termination { kRunning, kReachedT, kExhausted };

enum class AssertLevel { kOff, kLemmaChecks, kFullTrace };

const char* to_string(EdgeStatus s);
const char* to_string(Termination t);
const char* to_string(AssertLevel a);
AssertLevel parse_assert_level(const std::string& s);

struct TraceRecord {
  std::size_t stage = 0;
  std::string step;     ///< labels of the steps fired, e.g. "P,1b,3b,F:fail,4a"
  std::int64_t edge = -1;
  std::string outcome;
};

struct ExplorationOptions {
  AssertLevel asserts = AssertLevel::kOff;
  /// Stop as soon as a boundary vertex joins A or B. When false the run continues to
  /// exhaustion and only records that the boundary was reached.
  bool stop_at_boundary = true;
};

struct ExplorationResult {
  Termination termination = Termination::kRunning;
  bool boundary_reached = false;
  std::size_t stages = 0;
  std::vector<std::uint32_t> active;    ///< final A, sorted
  std::vector<std::uint32_t> boundary;  ///< final B, sorted
  std::vector<std::uint32_t> tagged_vertices;
  std::vector<EdgeStatus> statuses;     ///< indexed by edge id
  std::vector<TraceRecord> trace;

  /// A union B, sorted.
  std::vector<std::uint32_t> explored_vertices() const;
  /// Vertices joined to o by untagged open-in-H edges, sorted.
  std::vector<std::uint32_t> untagged_cluster(const RegionGraph& g) const;
};

/// Writes the trace as line-delimited JSON records.
void write_trace(std::ostream& os, const RegionGraph& g, const std::vector<TraceRecord>& trace);

/// Stage-by-stage cluster exploration that builds the thinned graph H_n and its
/// tagged edges. Construction is the initialisation (A = {o}, B = E = {}, L = all
/// potential edges of the region); each call to step() runs one exploration stage.
///
/// The unexplored list L is kept implicitly: a per-edge membership flag plus a heap
/// of L-edges adjacent to A ordered by the Priority channel. E is the set of edges
/// with status kOpenInG; their marks are replayed from the mark source.
class Exploration {
 public:
  Exploration(const RegionGraph& graph, const DifferenceSet& delta, double q, const MarkSource& marks,
              ExplorationOptions options = {});

  bool terminated() const { return termination_ != Termination::kRunning; }
  Termination termination() const { return termination_; }
  std::size_t stage() const { return stage_; }

  void step();
  ExplorationResult run();
  ExplorationResult result() const;

  /// F-check at y for the edge e_t just explored; reveals U on the Delta^c edges from y
  /// to non-active vertices still in L. Returns true on pass.
  bool f_check(std::uint32_t edge, std::uint32_t y);
  /// S-check at y; reveals the V^y marks on the Delta edges from y to non-active
  /// vertices. Returns true when e_t is tagged.
  bool s_check(std::uint32_t edge, std::uint32_t y);

  bool is_active(std::uint32_t v) const { return vstate_[v] == kActive; }
  bool is_boundary(std::uint32_t v) const { return vstate_[v] == kBoundary; }
  bool in_unexplored(std::uint32_t edge) const { return in_l_[edge] != 0; }
  bool in_delta(std::uint32_t edge) const { return delta_[edge] != 0; }
  EdgeStatus status(std::uint32_t edge) const { return status_[edge]; }
  std::size_t unexplored_count() const { return l_size_; }
  /// Make v active outside of the stage cascade (used by tests of single checks).
  void activate_for_test(std::uint32_t v) { activate(v); }

 private:
  enum : std::uint8_t { kNone = 0, kActive = 1, kBoundary = 2 };

  struct HeapItem {
    double priority;
    std::uint32_t edge;
    bool operator>(const HeapItem& o) const {
      return priority != o.priority ? priority > o.priority : edge > o.edge;
    }
  };

  void activate(std::uint32_t v);
  void to_boundary(std::uint32_t v);
  void remove_from_l(std::uint32_t edge);
  void note_vertex(std::uint32_t v);
  void flush_exhausted();
  void fail(const std::string& message) const;
  bool checking() const { return options_.asserts != AssertLevel::kOff; }
  void trace(const std::string& steps, std::int64_t edge, const std::string& outcome);
  void post_checks() const;

  const RegionGraph& g_;
  const MarkSource& marks_;
  double q_;
  ExplorationOptions options_;

  Termination termination_ = Termination::kRunning;
  bool boundary_reached_ = false;
  std::size_t stage_ = 0;
  std::size_t num_active_ = 0;
  std::size_t l_size_ = 0;

  std::vector<std::uint8_t> vstate_;
  std::vector<std::uint8_t> tagged_;
  std::vector<std::uint32_t> l_count_;
  std::vector<std::uint32_t> pending_;
  std::vector<std::uint8_t> in_l_;
  std::vector<std::uint8_t> delta_;
  std::vector<EdgeStatus> status_;
  std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap_;

  // Bookkeeping for the consistency checks.
  std::vector<std::uint8_t> revealed_u_;
  std::vector<std::uint8_t> revealed_v_;  // bit 0: Vx, bit 1: Vy
  std::vector<std::int64_t> revealer_;
  std::vector<std::uint8_t> f_failed_;
  std::vector<std::size_t> tag_stage_;
  std::vector<std::size_t> h_stage_;
  std::vector<TraceRecord> trace_;
};

/// Runs the exploration on the ball B(o,n) of J with the given mark field.
ExplorationResult explore(const Kernel& j, const DifferenceSet& delta, double q, int n,
                          const MarkField& field, ExplorationOptions options = {});

}  // namespace lrp
