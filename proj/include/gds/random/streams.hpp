#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace gds {

using Engine = std::mt19937_64;

/// Purpose tag mixed into every substream seed so that, e.g., draw 7 and proposal pool never share
/// a sequence.
enum class StreamKind : std::uint64_t {
  tuning = 1,
  proposals = 2,
  thresholds = 3,
  draw = 4,
  simulate = 5,
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Independent engine for (seed, kind, index). Depends on nothing else, so any worker can
/// reconstruct the stream for a given draw index.
inline Engine make_stream(std::uint64_t seed, StreamKind kind, std::uint64_t index = 0) {
  std::uint64_t state = seed;
  state ^= splitmix64(state) + static_cast<std::uint64_t>(kind);
  state ^= splitmix64(state) + index;
  std::array<std::uint32_t, 8> words{};
  for (std::size_t i = 0; i < words.size(); i += 2) {
    const std::uint64_t w = splitmix64(state);
    words[i] = static_cast<std::uint32_t>(w);
    words[i + 1] = static_cast<std::uint32_t>(w >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  return Engine(seq);
}

/// Uniform on [0, 1) from the top 53 bits of a 64-bit engine.
template <class Rng>
double uniform01(Rng& rng) {
  static_assert(Rng::max() == ~std::uint64_t{0} && Rng::min() == 0, "needs a full 64-bit engine");
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace gds
