#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace lrp {

inline constexpr int kMaxDim = 4;

/// A point of Z^d, d <= kMaxDim. Unused trailing coordinates are kept at zero so
/// that defaulted comparison is lexicographic on the live coordinates.
struct Vertex {
  std::array<std::int32_t, kMaxDim> c{};
  std::int32_t d = 0;

  Vertex() = default;
  explicit Vertex(int dim);
  Vertex(std::initializer_list<std::int32_t> coords);
  static Vertex from(const std::vector<std::int32_t>& coords);

  static Vertex origin(int dim) { return Vertex(dim); }

  std::int32_t operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  std::int32_t& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  int dim() const { return d; }

  bool is_zero() const;
  Vertex operator+(const Vertex& o) const;
  Vertex operator-(const Vertex& o) const;
  Vertex operator-() const;

  std::int64_t l1() const;
  std::int64_t linf() const;
  double l2() const;

  std::vector<std::int32_t> coords() const;
  std::string str() const;

  friend auto operator<=>(const Vertex&, const Vertex&) = default;
  friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct VertexHash {
  std::size_t operator()(const Vertex& v) const noexcept;
};

enum class Orientation { kUndirected, kDirected };

const char* to_string(Orientation o);

/// A potential edge. Undirected keys store the lexicographically smaller endpoint
/// first; directed keys keep (tail, head).
class EdgeKey {
 public:
  EdgeKey() = default;
  static EdgeKey undirected(const Vertex& x, const Vertex& y);
  static EdgeKey directed(const Vertex& tail, const Vertex& head);
  static EdgeKey make(Orientation o, const Vertex& x, const Vertex& y);

  const Vertex& first() const { return a_; }
  const Vertex& second() const { return b_; }
  Orientation orientation() const { return orientation_; }
  bool has_endpoint(const Vertex& v) const { return a_ == v || b_ == v; }
  const Vertex& other(const Vertex& v) const { return v == a_ ? b_ : a_; }
  std::string str() const;

  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
  friend bool operator==(const EdgeKey&, const EdgeKey&) = default;

 private:
  EdgeKey(Vertex a, Vertex b, Orientation o) : a_(a), b_(b), orientation_(o) {}
  Vertex a_;
  Vertex b_;
  Orientation orientation_ = Orientation::kUndirected;
};

struct EdgeKeyHash {
  std::size_t operator()(const EdgeKey& e) const noexcept;
};

enum class RegionShape { kBall, kSpaceTimeBox };

/// Finite vertex set explored by the algorithms: the l1 ball B(o,n) of Z^d, or the
/// oriented space-time box {|space|_inf <= n, 0 <= time <= n} whose last coordinate is time.
/// Vertices are stored in lexicographic order; indices follow that order.
class Region {
 public:
  RegionShape shape() const { return shape_; }
  int dim() const { return dim_; }
  int radius() const { return radius_; }
  std::size_t size() const { return vertices_.size(); }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const Vertex& vertex(std::size_t i) const { return vertices_[i]; }

  bool contains(const Vertex& v) const;
  /// Index of v, or -1 if v is outside.
  std::ptrdiff_t index_of(const Vertex& v) const;
  std::size_t origin_index() const { return origin_index_; }

  friend Region ball(int d, int n);
  friend Region space_time_box(int space_dim, int n);

 private:
  Region() = default;
  void finish();

  RegionShape shape_ = RegionShape::kBall;
  int dim_ = 0;
  int radius_ = 0;
  std::vector<Vertex> vertices_;
  std::unordered_map<Vertex, std::size_t, VertexHash> index_;
  std::size_t origin_index_ = 0;
};

/// l1 ball of radius n around the origin, lexicographic order.
Region ball(int d, int n);
/// Space-time box for oriented models; dimension space_dim + 1.
Region space_time_box(int space_dim, int n);

/// All nonzero displacements with |z|_inf <= r, lexicographic.
std::vector<Vertex> cube_displacements(int d, int r);

}  // namespace lrp
