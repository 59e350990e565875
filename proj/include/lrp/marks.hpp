#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "lrp/lattice.hpp"

namespace lrp {

/// Name and version of the mark generator; recorded in every output manifest.
inline constexpr std::string_view kGeneratorVersion = "philox4x32-10/edge-digest-v1";

/// Independent uniform channels attached to each potential edge. kVx and kVy are
/// the auxiliary marks attached to the first and second endpoint of the canonical
/// key (tail and head for directed keys). kExterior is vertex-keyed and drives the
/// boundary indicator of a vertex.
enum class Channel : std::uint32_t { kU = 1, kVx = 2, kVy = 3, kW = 4, kX = 5, kPriority = 6, kExterior = 7 };

const char* to_string(Channel c);

/// Philox4x32 with 10 rounds (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// 96-bit digest of a canonical edge or vertex encoding.
struct Digest {
  std::uint64_t lo = 0;
  std::uint32_t hi = 0;
  friend bool operator==(const Digest&, const Digest&) = default;
};

Digest digest(const EdgeKey& e);
Digest digest(const Vertex& v);

/// Maps the top 53 bits of a 64-bit word onto the grid k * 2^-53, with k = 0 sent to
/// 2^-54, so every value lies strictly inside (0,1) and is exactly representable.
inline double to_open_unit(std::uint64_t word) {
  const std::uint64_t k = word >> 11;
  return k == 0 ? 0x1.0p-54 : static_cast<double>(k) * 0x1.0p-53;
}

/// Deterministic, lazily evaluated field of Uniform(0,1) marks. A mark is a pure
/// function of (seed, canonical edge, channel); nothing is stored.
class MarkField {
 public:
  explicit MarkField(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  double mark(const EdgeKey& edge, Channel channel) const { return mark(digest(edge), channel); }
  double mark(const Digest& d, Channel channel) const;
  /// V mark of `edge` attached to `endpoint` (kVx for the first canonical endpoint).
  double endpoint_mark(const EdgeKey& edge, const Vertex& endpoint) const;
  double vertex_mark(const Vertex& v) const { return mark(digest(v), Channel::kExterior); }

 private:
  std::uint64_t seed_;
};

/// Edges sorted by their Priority mark; ties broken on the canonical key.
std::vector<EdgeKey> edge_order(const MarkField& field, std::vector<EdgeKey> edges);

/// Seed derivation for independent companion fields (e.g. the fresh G_{pJ} sample).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace lrp
