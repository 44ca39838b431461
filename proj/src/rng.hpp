#pragma once

#include <cstdint>

namespace ndcglab {

// Counter-based generation: every variate is a pure hash of
// (master seed, stream id, element index, slot). Any coordinate can be drawn
// in any order on any thread and still come out identical, which is what the
// prefix-property and thread-count-invariance guarantees lean on.

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
  return mix64(master_seed ^ mix64(stream_id));
}

inline std::uint64_t draw_bits(std::uint64_t stream, std::uint64_t index, std::uint64_t slot) {
  return mix64(stream ^ mix64(index * 0xD1342543DE82EF95ull + slot));
}

inline double u01(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

inline double draw_u01(std::uint64_t stream, std::uint64_t index, std::uint64_t slot) {
  return u01(draw_bits(stream, index, slot));
}

}  // namespace ndcglab
