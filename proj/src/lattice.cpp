#include "lrp/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "lrp/errors.hpp"

namespace lrp {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kEmptyDelta: return "empty_delta";
    case ErrorKind::kOrderViolation: return "order_violation";
    case ErrorKind::kInfiniteDelta: return "infinite_delta";
    case ErrorKind::kZeroProduct: return "zero_product";
    case ErrorKind::kSize: return "size";
    case ErrorKind::kBracketing: return "bracketing";
    case ErrorKind::kFit: return "fit";
    case ErrorKind::kInternalConsistency: return "internal_consistency";
  }
  return "unknown";
}

const char* to_string(Orientation o) {
  return o == Orientation::kUndirected ? "undirected" : "directed";
}

namespace {

void check_dim(int dim, const char* where) {
  if (dim < 1 || dim > kMaxDim) {
    throw Error(ErrorKind::kValidation, where,
                "dimension must be in [1," + std::to_string(kMaxDim) + "], got " +
                    std::to_string(dim));
  }
}

}  // namespace

Vertex::Vertex(int dim) : d(dim) { check_dim(dim, "lattice.vertex"); }

Vertex::Vertex(std::initializer_list<std::int32_t> coords) : d(static_cast<std::int32_t>(coords.size())) {
  check_dim(d, "lattice.vertex");
  std::copy(coords.begin(), coords.end(), c.begin());
}

Vertex Vertex::from(const std::vector<std::int32_t>& coords) {
  Vertex v(static_cast<int>(coords.size()));
  std::copy(coords.begin(), coords.end(), v.c.begin());
  return v;
}

bool Vertex::is_zero() const {
  return std::all_of(c.begin(), c.end(), [](std::int32_t x) { return x == 0; });
}

Vertex Vertex::operator+(const Vertex& o) const {
  Vertex r = *this;
  for (int i = 0; i < d; ++i) r.c[i] += o.c[i];
  return r;
}

Vertex Vertex::operator-(const Vertex& o) const {
  Vertex r = *this;
  for (int i = 0; i < d; ++i) r.c[i] -= o.c[i];
  return r;
}

Vertex Vertex::operator-() const {
  Vertex r = *this;
  for (int i = 0; i < d; ++i) r.c[i] = -r.c[i];
  return r;
}

std::int64_t Vertex::l1() const {
  std::int64_t s = 0;
  for (int i = 0; i < d; ++i) s += std::llabs(c[i]);
  return s;
}

std::int64_t Vertex::linf() const {
  std::int64_t s = 0;
  for (int i = 0; i < d; ++i) s = std::max<std::int64_t>(s, std::llabs(c[i]));
  return s;
}

double Vertex::l2() const {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += static_cast<double>(c[i]) * c[i];
  return std::sqrt(s);
}

std::vector<std::int32_t> Vertex::coords() const {
  return {c.begin(), c.begin() + d};
}

std::string Vertex::str() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < d; ++i) os << (i ? "," : "") << c[i];
  os << ')';
  return os.str();
}

std::size_t VertexHash::operator()(const Vertex& v) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(v.d);
  for (int i = 0; i < v.d; ++i) {
    h ^= static_cast<std::uint32_t>(v.c[i]);
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
  }
  return static_cast<std::size_t>(h);
}

EdgeKey EdgeKey::undirected(const Vertex& x, const Vertex& y) {
  if (x == y) throw Error(ErrorKind::kDomain, "lattice.edge_key", "self-loop " + x.str());
  return x < y ? EdgeKey(x, y, Orientation::kUndirected) : EdgeKey(y, x, Orientation::kUndirected);
}

EdgeKey EdgeKey::directed(const Vertex& tail, const Vertex& head) {
  if (tail == head) throw Error(ErrorKind::kDomain, "lattice.edge_key", "self-loop " + tail.str());
  return EdgeKey(tail, head, Orientation::kDirected);
}

EdgeKey EdgeKey::make(Orientation o, const Vertex& x, const Vertex& y) {
  return o == Orientation::kUndirected ? undirected(x, y) : directed(x, y);
}

std::string EdgeKey::str() const {
  return a_.str() + (orientation_ == Orientation::kUndirected ? "-" : "->") + b_.str();
}

std::size_t EdgeKeyHash::operator()(const EdgeKey& e) const noexcept {
  VertexHash h;
  std::size_t x = h(e.first());
  x ^= h(e.second()) + 0x9e3779b97f4a7c15ULL + (x << 6) + (x >> 2);
  return x ^ static_cast<std::size_t>(e.orientation());
}

namespace {

// Lexicographic enumeration of the cube [-r, r]^d filtered by pred.
template <class Pred>
std::vector<Vertex> enumerate_cube(int d, const std::array<int, kMaxDim>& lo,
                                   const std::array<int, kMaxDim>& hi, Pred pred) {
  std::vector<Vertex> out;
  Vertex v(d);
  for (int i = 0; i < d; ++i) v[i] = lo[i];
  while (true) {
    if (pred(v)) out.push_back(v);
    int i = d - 1;
    while (i >= 0 && v[i] == hi[i]) {
      v[i] = lo[i];
      --i;
    }
    if (i < 0) break;
    ++v[i];
  }
  return out;
}

}  // namespace

std::vector<Vertex> cube_displacements(int d, int r) {
  check_dim(d, "lattice.cube_displacements");
  std::array<int, kMaxDim> lo{}, hi{};
  for (int i = 0; i < d; ++i) {
    lo[i] = -r;
    hi[i] = r;
  }
  return enumerate_cube(d, lo, hi, [](const Vertex& v) { return !v.is_zero(); });
}

bool Region::contains(const Vertex& v) const {
  if (v.d != dim_) return false;
  if (shape_ == RegionShape::kBall) return v.l1() <= radius_;
  const int t = v[dim_ - 1];
  if (t < 0 || t > radius_) return false;
  for (int i = 0; i + 1 < dim_; ++i) {
    if (std::abs(v[i]) > radius_) return false;
  }
  return true;
}

std::ptrdiff_t Region::index_of(const Vertex& v) const {
  auto it = index_.find(v);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

void Region::finish() {
  index_.reserve(vertices_.size() * 2);
  for (std::size_t i = 0; i < vertices_.size(); ++i) index_.emplace(vertices_[i], i);
  origin_index_ = index_.at(Vertex::origin(dim_));
}

Region ball(int d, int n) {
  check_dim(d, "lattice.ball");
  if (n < 0) throw Error(ErrorKind::kValidation, "lattice.ball", "negative radius");
  Region r;
  r.shape_ = RegionShape::kBall;
  r.dim_ = d;
  r.radius_ = n;
  std::array<int, kMaxDim> lo{}, hi{};
  for (int i = 0; i < d; ++i) {
    lo[i] = -n;
    hi[i] = n;
  }
  r.vertices_ = enumerate_cube(d, lo, hi, [n](const Vertex& v) { return v.l1() <= n; });
  r.finish();
  return r;
}

Region space_time_box(int space_dim, int n) {
  const int d = space_dim + 1;
  check_dim(d, "lattice.space_time_box");
  if (n < 0) throw Error(ErrorKind::kValidation, "lattice.space_time_box", "negative horizon");
  Region r;
  r.shape_ = RegionShape::kSpaceTimeBox;
  r.dim_ = d;
  r.radius_ = n;
  std::array<int, kMaxDim> lo{}, hi{};
  for (int i = 0; i < space_dim; ++i) {
    lo[i] = -n;
    hi[i] = n;
  }
  lo[space_dim] = 0;
  hi[space_dim] = n;
  r.vertices_ = enumerate_cube(d, lo, hi, [](const Vertex&) { return true; });
  r.finish();
  return r;
}

}  // namespace lrp
