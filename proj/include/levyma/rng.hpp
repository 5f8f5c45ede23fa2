#pragma once

#include <cstdint>
#include <random>

namespace levyma {

/// Independent random streams derived from one 64-bit seed. Each stream is a
/// std::mt19937_64 whose state is seeded from splitmix64(seed, stream id), so
/// paths stay reproducible when the number of draws in one stream changes.
enum class Stream : std::uint64_t {
  PositiveJumpTimes = 1,
  NegativeJumpTimes = 2,
  PositiveJumpSizes = 3,
  Gaussian = 4,
  NegativeJumpSizes = 5,
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t seed, Stream stream) {
  std::uint64_t state = seed ^ (static_cast<std::uint64_t>(stream) * 0xD1B54A32D192ED03ULL);
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state))};
  return std::mt19937_64(seq);
}

}  // namespace levyma
