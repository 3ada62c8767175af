#pragma once

#include <cmath>
#include <cstdint>

namespace nwpat {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used both as the core
// generator and for stream derivation, so every draw is a pure function of
// (seed, stream id, counter) and independent of evaluation order.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream for replica/step/junction r is seed ^ hash(r); streams derived from
// distinct ids are independent and may be consumed in any order.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t id) {
  return seed ^ mix64(id ^ 0xA0761D6478BD642FULL);
}

// Counter-based generator: output i is mix64(key + i * gamma). Random access
// by counter; no shared mutable state between streams.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix64(key_ + 0x9E3779B97F4A7C15ULL * counter_++); }

  // Uniform in [0, 1), 53-bit resolution.
  double next_u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Box-Muller; one draw per call, the paired variate is discarded to keep
  // the counter lineage simple.
  double next_normal(double mean, double sd) {
    double u1 = next_u01();
    double u2 = next_u01();
    while (u1 <= 0.0) u1 = next_u01();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    return mean + sd * z;
  }

  // Normal truncated at zero: resample until strictly positive.
  double next_positive_normal(double mean, double sd) {
    for (;;) {
      double v = next_normal(mean, sd);
      if (v > 0.0) return v;
    }
  }

  std::uint64_t counter() const { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace nwpat
