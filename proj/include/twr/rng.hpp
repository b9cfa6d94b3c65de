#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace twr {

// Substream purposes. Keeping the tag in the high bits guarantees that
// streams drawn for different purposes from the same base seed never
// collide.
enum class Stream : std::uint64_t {
  ChannelUp = 1,
  ChannelDown = 2,
  PrecoderInit = 3,
  SerBatch = 4,
  Trial = 5,
};

inline std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, Stream purpose,
                                    std::uint64_t index) {
  const std::uint64_t tag =
      (static_cast<std::uint64_t>(purpose) << 56) ^ index;
  return mix64(mix64(seed) ^ mix64(tag));
}

/// Deterministic per-substream generator. Instances seeded from the same
/// (seed, purpose, index) triple reproduce the same draw sequence.
class Rng {
 public:
  Rng(std::uint64_t seed, Stream purpose, std::uint64_t index)
      : engine_(substream_seed(seed, purpose, index)) {}

  double normal() { return normal_(engine_); }

  double uniform() { return uniform_(engine_); }

  /// CN(0, variance): independent real/imag parts of variance/2 each.
  std::complex<double> cgauss(double variance) {
    const double s = std::sqrt(variance * 0.5);
    const double re = s * normal_(engine_);
    const double im = s * normal_(engine_);
    return {re, im};
  }

  /// QPSK constellation index in {0,1,2,3}.
  int qpsk_index() {
    return static_cast<int>(engine_() & 3ull);
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Seed for one Monte Carlo trial derived from the experiment base seed.
inline std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial) {
  return substream_seed(base_seed, Stream::Trial, trial);
}

}  // namespace twr
