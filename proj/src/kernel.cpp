#include "lrp/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "lrp/errors.hpp"

namespace lrp {

const char* to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::kTable: return "table";
    case KernelFamily::kPolynomialPhi: return "polynomial-phi";
    case KernelFamily::kProductScaled: return "product-scaled";
  }
  return "unknown";
}

struct Kernel::Node {
  KernelFamily family = KernelFamily::kTable;
  int d = 1;
  Orientation orientation = Orientation::kUndirected;
  std::map<Vertex, double> table;
  double beta = 0.0;
  double alpha = 0.0;
  double factor = 1.0;
  std::optional<Kernel> inner;
  std::map<Vertex, double> overrides;
};

namespace {

constexpr double kTailTolerance = 1e-15;
// Window cap for exact log-sums over infinite supports.
constexpr double kMaxWindowPoints = 2e6;

void check_probability(double v, const char* where) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorKind::kValidation, where, "kernel value outside [0,1]: " + std::to_string(v));
  }
}

// Inserts entries into `out`, mirroring them for undirected kernels.
void insert_entries(std::map<Vertex, double>& out, int d, Orientation o,
                    const Kernel::Entries& entries, const char* where) {
  for (const auto& [z, v] : entries) {
    if (z.dim() != d) throw Error(ErrorKind::kValidation, where, "displacement dimension mismatch");
    if (z.is_zero()) throw Error(ErrorKind::kDomain, where, "zero displacement");
    check_probability(v, where);
    auto put = [&](const Vertex& key) {
      auto [it, inserted] = out.emplace(key, v);
      if (!inserted && it->second != v) {
        throw Error(ErrorKind::kValidation, where,
                    "conflicting values at " + key.str() + " (undirected kernels are symmetric)");
      }
    };
    put(z);
    if (o == Orientation::kUndirected) put(-z);
  }
}

double cube_volume(int d, int r) { return std::pow(2.0 * r + 1.0, d); }

}  // namespace

Kernel Kernel::table(int d, Orientation o, const Entries& entries) {
  auto n = std::make_shared<Node>();
  n->family = KernelFamily::kTable;
  n->d = Vertex(d).dim();
  n->orientation = o;
  insert_entries(n->table, d, o, entries, "lattice.kernel_table");
  return Kernel(std::move(n));
}

Kernel Kernel::polynomial_phi(int d, Orientation o, double beta, double alpha) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::kValidation, "lattice.kernel_polynomial_phi", "beta must be finite and >= 0");
  }
  if (!(alpha > d)) {
    throw Error(ErrorKind::kValidation, "lattice.kernel_polynomial_phi",
                "alpha must exceed the dimension for summability");
  }
  auto n = std::make_shared<Node>();
  n->family = KernelFamily::kPolynomialPhi;
  n->d = Vertex(d).dim();
  n->orientation = o;
  n->beta = beta;
  n->alpha = alpha;
  return Kernel(std::move(n));
}

Kernel Kernel::product_scaled(const Kernel& inner, double factor) {
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    throw Error(ErrorKind::kValidation, "lattice.kernel_product_scaled", "factor must be finite and >= 0");
  }
  auto n = std::make_shared<Node>();
  n->family = KernelFamily::kProductScaled;
  n->d = inner.dim();
  n->orientation = inner.orientation();
  n->factor = factor;
  n->inner = inner;
  return Kernel(std::move(n));
}

Kernel Kernel::nearest_neighbour(int d, double value) {
  Entries e;
  for (int i = 0; i < d; ++i) {
    Vertex z(d);
    z[i] = 1;
    e.emplace_back(z, value);
  }
  return table(d, Orientation::kUndirected, e);
}

Kernel Kernel::with_overrides(const Entries& overrides) const {
  auto n = std::make_shared<Node>(*node_);
  std::map<Vertex, double> added;
  insert_entries(added, n->d, n->orientation, overrides, "lattice.kernel_overrides");
  for (const auto& [z, v] : added) n->overrides[z] = v;
  return Kernel(std::move(n));
}

int Kernel::dim() const { return node_->d; }
Orientation Kernel::orientation() const { return node_->orientation; }
KernelFamily Kernel::family() const { return node_->family; }
const std::map<Vertex, double>& Kernel::overrides() const { return node_->overrides; }
double Kernel::scale_factor() const { return node_->family == KernelFamily::kProductScaled ? node_->factor : 0.0; }
double Kernel::beta() const { return node_->beta; }
double Kernel::alpha() const { return node_->alpha; }
const Kernel* Kernel::inner() const { return node_->inner ? &*node_->inner : nullptr; }
const std::map<Vertex, double>& Kernel::table_entries() const { return node_->table; }

double Kernel::base_value(const Vertex& z) const {
  const Node& n = *node_;
  switch (n.family) {
    case KernelFamily::kTable: {
      auto it = n.table.find(z);
      return it == n.table.end() ? 0.0 : it->second;
    }
    case KernelFamily::kPolynomialPhi:
      if (n.beta == 0.0) return 0.0;
      return -std::expm1(-n.beta * std::pow(z.l2(), -n.alpha));
    case KernelFamily::kProductScaled:
      return std::min(1.0, n.factor * n.inner->value(z));
  }
  return 0.0;
}

double Kernel::value(const Vertex& z) const {
  if (z.dim() != node_->d) {
    throw Error(ErrorKind::kDomain, "lattice.kernel_value", "displacement dimension mismatch");
  }
  if (z.is_zero()) throw Error(ErrorKind::kDomain, "lattice.kernel_value", "zero displacement");
  auto it = node_->overrides.find(z);
  if (it != node_->overrides.end()) return it->second;
  return base_value(z);
}

double kernel_value(const Kernel& k, const Vertex& displacement) { return k.value(displacement); }

namespace {

int max_linf(const std::map<Vertex, double>& m, bool positive_only) {
  int r = 0;
  for (const auto& [z, v] : m) {
    if (!positive_only || v > 0.0) r = std::max(r, static_cast<int>(z.linf()));
  }
  return r;
}

}  // namespace

int Kernel::finite_part_radius() const {
  const Node& n = *node_;
  int r = std::max(max_linf(n.table, false), max_linf(n.overrides, false));
  if (n.inner) r = std::max(r, n.inner->finite_part_radius());
  return r;
}

std::optional<int> Kernel::support_radius() const {
  const Node& n = *node_;
  std::optional<int> base;
  switch (n.family) {
    case KernelFamily::kTable:
      base = max_linf(n.table, true);
      break;
    case KernelFamily::kPolynomialPhi:
      if (n.beta > 0.0) return std::nullopt;
      base = 0;
      break;
    case KernelFamily::kProductScaled:
      if (n.factor == 0.0) {
        base = 0;
      } else {
        base = n.inner->support_radius();
        if (!base) return std::nullopt;
      }
      break;
  }
  return std::max(*base, max_linf(n.overrides, true));
}

std::vector<Vertex> Kernel::support() const {
  auto r = support_radius();
  if (!r) throw Error(ErrorKind::kDomain, "lattice.kernel_support", "kernel has infinite support");
  std::set<Vertex> candidates;
  const Kernel* k = this;
  while (k) {
    for (const auto& [z, v] : k->node_->table) candidates.insert(z);
    for (const auto& [z, v] : k->node_->overrides) candidates.insert(z);
    k = k->inner();
  }
  std::vector<Vertex> out;
  for (const auto& z : candidates) {
    if (value(z) > 0.0) out.push_back(z);
  }
  return out;
}

double Kernel::base_tail(int r) const {
  const Node& n = *node_;
  switch (n.family) {
    case KernelFamily::kTable: {
      double s = 0.0;
      for (const auto& [z, v] : n.table) {
        if (z.linf() > r) s += v;
      }
      return s;
    }
    case KernelFamily::kPolynomialPhi: {
      if (n.beta == 0.0) return 0.0;
      // l_inf shell k holds at most 2d(2k+1)^(d-1) <= 2d 3^(d-1) k^(d-1) points, each with
      // |z|_2 >= k, and 1 - e^-x <= x. Sum over k > r bounded by the integral from r.
      const double c = 2.0 * n.d * std::pow(3.0, n.d - 1);
      const double ex = n.alpha - n.d;
      if (r <= 0) return n.beta * c * (1.0 + 1.0 / ex);
      return n.beta * c * std::pow(static_cast<double>(r), -ex) / ex;
    }
    case KernelFamily::kProductScaled:
      return n.factor * n.inner->tail_sum_bound(r);
  }
  return 0.0;
}

double Kernel::tail_sum_bound(int r) const {
  double s = base_tail(r);
  for (const auto& [z, v] : node_->overrides) {
    if (z.linf() > r) s += v;
  }
  return s;
}

double Kernel::sup_beyond(int r) const {
  const Node& n = *node_;
  double s = 0.0;
  for (const auto& [z, v] : n.overrides) {
    if (z.linf() > r) s = std::max(s, v);
  }
  switch (n.family) {
    case KernelFamily::kTable:
      for (const auto& [z, v] : n.table) {
        if (z.linf() > r) s = std::max(s, v);
      }
      break;
    case KernelFamily::kPolynomialPhi:
      if (n.beta > 0.0) s = std::max(s, -std::expm1(-n.beta * std::pow(r + 1.0, -n.alpha)));
      break;
    case KernelFamily::kProductScaled:
      s = std::max(s, std::min(1.0, n.factor * n.inner->sup_beyond(r)));
      break;
  }
  return s;
}

bool Kernel::below_one() const {
  const int r = finite_part_radius();
  if (sup_beyond(r) >= 1.0) return false;
  for (const auto& z : cube_displacements(dim(), r)) {
    if (value(z) >= 1.0) return false;
  }
  return true;
}

DifferenceSet::DifferenceSet(Orientation o, std::vector<Vertex> displacements)
    : orientation_(o), displacements_(std::move(displacements)) {
  std::sort(displacements_.begin(), displacements_.end());
  displacements_.erase(std::unique(displacements_.begin(), displacements_.end()), displacements_.end());
  if (o == Orientation::kUndirected) {
    for (const auto& z : displacements_) {
      if (!contains(-z)) {
        throw Error(ErrorKind::kValidation, "lattice.difference_set",
                    "undirected difference set must be closed under negation");
      }
    }
  }
}

bool DifferenceSet::contains(const Vertex& z) const {
  return std::binary_search(displacements_.begin(), displacements_.end(), z);
}

std::vector<EdgeKey> potential_edges(const Region& region, const Kernel& k) {
  std::vector<EdgeKey> out;
  const bool undirected = k.orientation() == Orientation::kUndirected;
  if (k.support_radius()) {
    const auto supp = k.support();
    for (const auto& u : region.vertices()) {
      for (const auto& z : supp) {
        const Vertex w = u + z;
        if (!region.contains(w)) continue;
        if (undirected && !(u < w)) continue;
        out.push_back(EdgeKey::make(k.orientation(), u, w));
      }
    }
  } else {
    for (const auto& u : region.vertices()) {
      for (const auto& w : region.vertices()) {
        if (u == w || (undirected && !(u < w))) continue;
        if (k.value(w - u) > 0.0) out.push_back(EdgeKey::make(k.orientation(), u, w));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

DifferenceSet delta_of(const Kernel& j, const Kernel& jp) {
  const char* where = "lattice.delta_of";
  if (j.dim() != jp.dim() || j.orientation() != jp.orientation()) {
    throw Error(ErrorKind::kValidation, where, "kernels differ in dimension or orientation");
  }
  const int r0 = std::max({1, j.finite_part_radius(), jp.finite_part_radius()});
  // Far field: the kernels must agree beyond the finite parts.
  for (int r : {r0, r0 + 1, 2 * r0 + 1, 4 * r0 + 3, 16 * r0 + 15, 256 * r0 + 255}) {
    if (std::abs(j.tail_sum_bound(r) - jp.tail_sum_bound(r)) > kTailTolerance) {
      throw Error(ErrorKind::kInfiniteDelta, where,
                  "kernels differ beyond every finite radius (tail bounds disagree at R=" +
                      std::to_string(r) + ")");
    }
  }
  for (int s = 1; s <= 32; ++s) {
    Vertex axis(j.dim()), diag(j.dim());
    axis[0] = r0 + s;
    for (int i = 0; i < j.dim(); ++i) diag[i] = r0 + s;
    for (const auto& z : {axis, diag}) {
      if (std::abs(j.value(z) - jp.value(z)) > kTailTolerance) {
        throw Error(ErrorKind::kInfiniteDelta, where, "kernels differ outside the finite window at " + z.str());
      }
    }
  }
  std::vector<Vertex> diff;
  for (const auto& z : cube_displacements(j.dim(), r0)) {
    const double a = j.value(z);
    const double b = jp.value(z);
    if (b > a) {
      throw Error(ErrorKind::kOrderViolation, where,
                  "J' exceeds J at " + z.str() + " (" + std::to_string(b) + " > " + std::to_string(a) + ")");
    }
    if (a != b) diff.push_back(z);
  }
  if (diff.empty()) throw Error(ErrorKind::kEmptyDelta, where, "J' equals J: empty difference set");
  return DifferenceSet(j.orientation(), std::move(diff));
}

namespace {

struct WindowSum {
  double log_sum = 0.0;  // sum of log(1 - J) over the window, excluding `skip`
  double max_value = 0.0;
  bool hit_one = false;
};

template <class Skip>
WindowSum window_log_sum(const Kernel& k, int r, Skip skip) {
  WindowSum w;
  for (const auto& z : cube_displacements(k.dim(), r)) {
    if (skip(z)) continue;
    const double v = k.value(z);
    w.max_value = std::max(w.max_value, v);
    if (v >= 1.0) {
      w.hit_one = true;
      continue;
    }
    w.log_sum += std::log1p(-v);
  }
  return w;
}

// Smallest doubling radius whose tail meets `target`, bounded by the window cap.
int choose_window(const Kernel& k, int r_start, double target) {
  int r = std::max(1, r_start);
  while (k.tail_sum_bound(r) > target && cube_volume(k.dim(), 2 * r) <= kMaxWindowPoints) r *= 2;
  return r;
}

}  // namespace

SurvivalBound log_survival_product(const Kernel& k, const DifferenceSet& excluded) {
  const char* where = "lattice.log_survival_product";
  SurvivalBound out;
  auto skip = [&](const Vertex& z) { return excluded.contains(z); };
  if (auto sr = k.support_radius()) {
    WindowSum w = window_log_sum(k, std::max(1, *sr), skip);
    if (w.hit_one) throw Error(ErrorKind::kZeroProduct, where, "J = 1 on a displacement outside Delta");
    out.value = std::exp(w.log_sum);
    out.window_radius = *sr;
    out.max_off_delta = w.max_value;
    return out;
  }
  const int r0 = std::max(k.finite_part_radius(), 1);
  // a must be known before the target tolerance; sup_beyond(r0) and the finite part give it.
  WindowSum probe = window_log_sum(k, r0, skip);
  const double a = std::max(probe.max_value, k.sup_beyond(r0));
  if (probe.hit_one || a >= 1.0) {
    throw Error(ErrorKind::kZeroProduct, where, "J reaches 1 outside Delta");
  }
  const int r = choose_window(k, r0, 1e-9 * (1.0 - a));
  WindowSum w = r == r0 ? probe : window_log_sum(k, r, skip);
  out.window_radius = r;
  out.tail_bound = k.tail_sum_bound(r);
  out.max_off_delta = a;
  out.value = std::exp(w.log_sum - out.tail_bound / (1.0 - a));
  return out;
}

TailInterval tail_open_interval(const Kernel& k, const Region& region, const Vertex& v,
                                const LogSumInterval* total) {
  if (!region.contains(v)) {
    throw Error(ErrorKind::kDomain, "lattice.tail_open_probability", v.str() + " is outside the region");
  }
  auto outside = [&](const Vertex& z) { return !region.contains(v + z); };
  if (auto sr = k.support_radius()) {
    double s = 0.0;
    if (*sr > 0) {
      for (const auto& z : k.support()) {
        if (!outside(z)) continue;
        const double val = k.value(z);
        if (val >= 1.0) return {1.0, 1.0};
        s += std::log1p(-val);
      }
    }
    const double p = -std::expm1(s);
    return {p, p};
  }
  const LogSumInterval own = total ? *total : total_log_survival(k);
  if (own.hits_one) {
    // Some displacement has J = 1; it leaves the region unless it lands inside.
    for (const auto& z : cube_displacements(k.dim(), std::max(1, k.finite_part_radius()))) {
      if (outside(z) && k.value(z) >= 1.0) return {1.0, 1.0};
    }
  }
  double inside = 0.0;
  for (const auto& u : region.vertices()) {
    if (u == v) continue;
    const double val = k.value(u - v);
    if (val >= 1.0) continue;
    inside += std::log1p(-val);
  }
  const double lo_sum = std::min(0.0, own.lo - inside);
  const double hi_sum = std::min(0.0, own.hi - inside);
  return {-std::expm1(hi_sum), -std::expm1(lo_sum)};
}

LogSumInterval total_log_survival(const Kernel& k) {
  LogSumInterval out;
  const int r0 = std::max(1, k.finite_part_radius());
  const double a = k.sup_beyond(r0);
  if (a >= 1.0) {
    out.hits_one = true;
    return out;
  }
  const int r = choose_window(k, r0, 1e-12 * (1.0 - a));
  WindowSum w = window_log_sum(k, r, [](const Vertex&) { return false; });
  out.hits_one = w.hit_one;
  out.hi = w.log_sum;
  out.lo = w.log_sum - k.tail_sum_bound(r) / (1.0 - std::max(a, k.sup_beyond(r)));
  out.window_radius = r;
  return out;
}

double tail_open_probability(const Kernel& k, const Region& region, const Vertex& v) {
  return tail_open_interval(k, region, v).value();
}

}  // namespace lrp
