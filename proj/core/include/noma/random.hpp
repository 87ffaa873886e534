#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace noma {

/// Mixes two 64-bit values into a well-scrambled seed (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Deterministic random stream. std::mt19937_64 supplies the raw bits; the
/// floating point conversions are spelled out here because the standard
/// library distributions are implementation defined and scenario files must
/// be reproducible bit for bit.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Independent substream addressed by a tag path, e.g. {kTagSweepCell, i, t}.
  static RandomStream substream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Log-uniform on [lo, hi]; requires 0 < lo <= hi.
  double log_uniform(double lo, double hi);

  /// Standard normal via Box-Muller; the second value of each pair is cached.
  double normal();

  /// Circularly symmetric complex Gaussian with total variance `variance`.
  std::complex<double> complex_normal(double variance);

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace noma
