#include "lrp/marks.hpp"

#include <algorithm>
#include <tuple>

namespace lrp {

const char* to_string(Channel c) {
  switch (c) {
    case Channel::kU: return "U";
    case Channel::kVx: return "Vx";
    case Channel::kVy: return "Vy";
    case Channel::kW: return "W";
    case Channel::kX: return "X";
    case Channel::kPriority: return "Priority";
    case Channel::kExterior: return "Exterior";
  }
  return "?";
}

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class DigestBuilder {
 public:
  void add(std::uint64_t w) {
    a_ = mix64(a_ ^ (w + 0x9e3779b97f4a7c15ULL));
    b_ = mix64(b_ + (w ^ 0xc2b2ae3d27d4eb4fULL));
  }
  void add(const Vertex& v) {
    for (int i = 0; i < v.dim(); ++i) add(static_cast<std::uint32_t>(v[i]));
  }
  Digest finish() const { return {a_, static_cast<std::uint32_t>(b_ >> 17)}; }

 private:
  std::uint64_t a_ = 0x6a09e667f3bcc908ULL;
  std::uint64_t b_ = 0xbb67ae8584caa73bULL;
};

}  // namespace

Digest digest(const EdgeKey& e) {
  DigestBuilder b;
  b.add(e.orientation() == Orientation::kUndirected ? 0xE0u : 0xE1u);
  b.add(static_cast<std::uint64_t>(e.first().dim()));
  b.add(e.first());
  b.add(e.second());
  return b.finish();
}

Digest digest(const Vertex& v) {
  DigestBuilder b;
  b.add(0x7Eu);
  b.add(static_cast<std::uint64_t>(v.dim()));
  b.add(v);
  return b.finish();
}

double MarkField::mark(const Digest& d, Channel channel) const {
  const auto out = philox4x32_10(
      {static_cast<std::uint32_t>(d.lo), static_cast<std::uint32_t>(d.lo >> 32), d.hi,
       static_cast<std::uint32_t>(channel)},
      {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
  return to_open_unit(static_cast<std::uint64_t>(out[0]) | (static_cast<std::uint64_t>(out[1]) << 32));
}

double MarkField::endpoint_mark(const EdgeKey& edge, const Vertex& endpoint) const {
  return mark(edge, endpoint == edge.first() ? Channel::kVx : Channel::kVy);
}

std::vector<EdgeKey> edge_order(const MarkField& field, std::vector<EdgeKey> edges) {
  std::vector<std::pair<double, EdgeKey>> keyed;
  keyed.reserve(edges.size());
  for (auto& e : edges) keyed.emplace_back(field.mark(e, Channel::kPriority), e);
  std::sort(keyed.begin(), keyed.end());
  for (std::size_t i = 0; i < keyed.size(); ++i) edges[i] = keyed[i].second;
  return edges;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace lrp
