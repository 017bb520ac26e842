#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace kawahara {

/// Counter-based generator built on the SplitMix64 finalizer, so that any
/// port can reproduce an ensemble from (seed, stream, counter) alone:
///
///   mix(z):  z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
///            z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
///   key    = mix(seed + G * (stream + 1))
///   x_i    = mix(key + G * (i + 1)),   G = 0x9E3779B97F4A7C15, i = 0, 1, ...
///
/// uniform() is (x_i >> 11) * 2^-53; normal() is Box-Muller on two
/// consecutive uniforms (cosine branch only). All arithmetic is mod 2^64.
class CounterRng {
public:
  static constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed + golden * (stream + 1))) {}

  std::uint64_t at(std::uint64_t i) const { return mix(key_ + golden * (i + 1)); }
  std::uint64_t next() { return at(counter_++); }
  std::uint64_t counter() const { return counter_; }

  /// Uniform on [0, 1).
  double uniform() { return uniform_at(counter_++); }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Integer uniform on [a, b] by rejection-free multiply-shift (bias < 2^-40
  /// for ranges below 2^24).
  long long uniform_int(long long a, long long b) {
    const auto span = static_cast<std::uint64_t>(b - a) + 1;
    const auto hi = static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * span) >> 64);
    return a + static_cast<long long>(hi);
  }

  double normal() {
    const double v = normal_at(counter_);
    counter_ += 2;
    return v;
  }

  /// Stateless draws: uniform from counter i, normal from counters i, i + 1.
  double uniform_at(std::uint64_t i) const { return static_cast<double>(at(i) >> 11) * 0x1.0p-53; }
  double normal_at(std::uint64_t i) const {
    const double u1 = 1.0 - uniform_at(i);  // (0, 1]
    const double u2 = uniform_at(i + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace kawahara
