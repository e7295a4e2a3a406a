#pragma once

#include <cstdint>

namespace efo {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent random streams. Each stream is keyed by (seed, purpose, index)
/// so training, evaluation and environment noise can be replayed separately.
enum class StreamPurpose : std::uint64_t {
  PolicyTraining = 1,
  ExplainerTraining = 2,
  Evaluation = 3,
  MonteCarlo = 4,
  Testing = 5,
};

/// Counter-based generator: the n-th draw is mix64(key + n * golden).
/// Output is a pure function of (key, counter), independent of the
/// standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t key) noexcept : state_(key) {}

  std::uint64_t next_u64() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept {
    // Lemire's multiply-shift with rejection for exact uniformity.
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_;
};

struct RunSeed {
  std::uint64_t seed = 0;

  Rng stream(StreamPurpose purpose, std::uint64_t index = 0) const noexcept {
    return Rng(mix64(mix64(seed) ^ mix64(static_cast<std::uint64_t>(purpose) * 0x100000001b3ULL + index)));
  }
};

}  // namespace efo
