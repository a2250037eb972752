#pragma once

#include <cmath>
#include <cstdint>

namespace kinld {

namespace detail {

// splitmix64 finalizer; also used to expand seeds.
[[nodiscard]] inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

[[nodiscard]] inline std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/**
 * xoshiro256** stream keyed by (seed, stream index). The four state words
 * are derived with splitmix64, so streams for distinct particle indices are
 * decorrelated and the whole ensemble is reproducible and order-independent.
 */
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = detail::mix64(seed) ^ detail::mix64(~stream * 0x9e3779b97f4a7c15ULL);
    for (auto& w : s_) {
      z = detail::mix64(z);
      w = z;
    }
  }

  [[nodiscard]] std::uint64_t next_u64() noexcept {
    const std::uint64_t result = detail::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0, 1).
  [[nodiscard]] double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Exponential with the given mean (inverse-CDF; never log(0)).
  [[nodiscard]] double exponential(double mean) noexcept {
    return -mean * std::log1p(-uniform());
  }

  /// Standard normal via Box-Muller (cosine branch; two uniforms per draw).
  [[nodiscard]] double normal() noexcept {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::uint64_t s_[4];
};

}  // namespace kinld
