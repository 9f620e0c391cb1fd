#pragma once

#include <cmath>
#include <cstdint>

namespace harmform {

// SplitMix64: 64-bit state, documented in docs/spec_format.md so reports can
// be reproduced from the printed seed alone.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform in [lo,hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller on two uniforms
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // independent stream for trial `k` of a seeded run
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t k) {
    SplitMix64 mix(seed);
    std::uint64_t s = mix.next() ^ (0x632be59bd9b4e019ULL * (k + 1));
    return SplitMix64(s);
  }

 private:
  std::uint64_t state_;
};

}  // namespace harmform
