#ifndef CONTESTNET_RNG_HPP
#define CONTESTNET_RNG_HPP

#include <cstdint>

namespace contestnet {

// SplitMix64. Output sequence depends only on the seed, so runs are
// reproducible across platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9E3779B97f4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // uniform integer in [0, bound), bound > 0; rejection sampling keeps it unbiased
  uint64_t next_below(uint64_t bound) {
    const uint64_t limit = bound * (UINT64_MAX / bound);
    uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

 private:
  uint64_t state_;
};

}  // namespace contestnet

#endif
