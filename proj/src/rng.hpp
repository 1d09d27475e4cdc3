// Counter-based splittable random generator.
//
// Every consumer derives an independent stream from (seed, purpose tags);
// draws are pure functions of (key, counter), so parallel pair/column workers
// reproduce the sequential results exactly no matter how work is scheduled.
#pragma once

#include <cmath>
#include <cstdint>

namespace drim::rng {

// splitmix64 finalizer; bijective 64-bit mixer.
inline std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : key_(mix(seed)) {}

  // Child stream keyed by up to three tag values; independent of this
  // stream's counter position.
  Stream derive(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
    Stream s(0);
    s.key_ = mix(key_ ^ mix(a ^ mix(b ^ mix(c))));
    return s;
  }

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // Uniform on [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on {0, ..., n-1}; rejection sampling keeps it unbiased.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Standard normal via Box-Muller; one draw consumes two uniforms.
  double next_normal() {
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace drim::rng
