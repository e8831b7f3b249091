#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

namespace osiris {

// Fixed-width splitmix64 generator. All randomness in the library flows
// through this type so that runs are reproducible bit-for-bit across
// platforms and across worker counts: batch element i always draws from the
// substream derive_stream(seed, i), never from a shared stream.
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Child seed for the idx-th substream of a base seed.
inline constexpr std::uint64_t derive_stream(std::uint64_t base, std::uint64_t idx) {
  return mix64(base + (idx + 1) * kGolden);
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += kGolden;
    return mix64(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  constexpr double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Index draw by cumulative walk. Probabilities are trusted to sum to ~1;
  // if rounding leaves the walk short, the last positive-mass index is used.
  int categorical(std::span<const double> probs) {
    if (probs.empty()) throw std::invalid_argument("categorical: empty distribution");
    const double u = next_double();
    double c = 0.0;
    int last = 0;
    for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
      if (probs[i] > 0.0) last = i;
      c += probs[i];
      if (u < c) return i;
    }
    return last;
  }

  constexpr std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace osiris
