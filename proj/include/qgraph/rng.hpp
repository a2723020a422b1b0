#pragma once

#include <cstdint>

namespace qgraph {

// SplitMix64 (Steele, Lea & Flood).  State advances by the golden-gamma
// increment and the output is the mixed state, so the i-th element of a
// stream is computable without iterating.  Platform-independent by
// construction; this is the only random source in the library.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += kGamma;
    return mix(state_);
  }

  // i-th element of the stream started at `seed`.
  static std::uint64_t at(std::uint64_t seed, std::uint64_t index) {
    return mix(seed + (index + 1) * kGamma);
  }

  // Uniform double in [0, 1) using the top 53 bits.
  double next_double() { return to_unit(next()); }

  static double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace qgraph
