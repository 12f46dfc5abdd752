#pragma once

#include <cstdint>
#include <complex>
#include <random>

namespace jscc::rng {

/// Stream tags separating the independent random-number streams of one
/// experiment. Every random draw in the library is keyed by
/// (master_seed, stream, index), so any single draw can be reproduced in
/// isolation and the schedule of a parallel run cannot change results.
enum class Stream : std::uint64_t {
  Channel = 0x6368616e6e656cULL,
  Noise = 0x6e6f697365ULL,
  Source = 0x736f75726365ULL,
  Cloud = 0x636c6f7564ULL,
  Synthetic = 0x73796e7468ULL,
  Distortion = 0x64697374ULL,
};

/// splitmix64 finalizer (Vigna). Full-period 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based sub-seed: hash of (master_seed, stream_tag, index).
constexpr std::uint64_t substream(std::uint64_t master_seed, Stream tag,
                                  std::uint64_t index) {
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ static_cast<std::uint64_t>(tag));
  h = mix64(h ^ index);
  return h;
}

constexpr std::uint64_t substream(std::uint64_t master_seed,
                                  std::uint64_t raw_tag,
                                  std::uint64_t index) {
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ raw_tag);
  h = mix64(h ^ index);
  return h;
}

/// Seeded generator for one (stream, index) cell. Engines are cheap value
/// objects; construct one per independent work unit and draw sequentially
/// inside it.
class Engine {
 public:
  explicit Engine(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on [0, 1) with 53 random bits; independent of the standard
  /// library's distribution internals, so streams are stable across builds.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Standard normal N(0, 1).
  double normal() { return normal_(gen_); }

  /// Circularly symmetric complex Gaussian CN(0, 1):
  /// real and imaginary parts i.i.d. N(0, 1/2).
  std::complex<double> cnormal() {
    constexpr double half = 0.70710678118654752440;  // 1/sqrt(2)
    const double re = normal_(gen_);
    const double im = normal_(gen_);
    return {re * half, im * half};
  }

  std::uint64_t raw() { return gen_(); }

  std::mt19937_64& generator() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline Engine engine_for(std::uint64_t master_seed, Stream tag,
                         std::uint64_t index) {
  return Engine(substream(master_seed, tag, index));
}

}  // namespace jscc::rng
