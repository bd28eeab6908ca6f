#pragma once

#include <cmath>
#include <cstdint>

namespace coxbalance {

// Deterministic simulation RNG. We avoid std::mt19937_64 +
// std::*_distribution because the distribution algorithms are
// implementation-defined; reports must be reproducible from (seed, stream)
// alone. xoshiro256++ with splitmix64 seeding is small, fast, and has a
// pinned-down bit stream, and the uint64 -> double mapping below is exact.

inline constexpr const char* kRngAlgorithm =
    "xoshiro256++ seeded by splitmix64(seed ^ golden*stream); "
    "uniform01 = (next()>>11)*2^-53; exponential by inversion";

struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

class Xoshiro256pp {
 public:
  // One independent stream per replication: streams are folded into the
  // splitmix64 seed, so (seed, stream) fully determines the sequence.
  explicit Xoshiro256pp(uint64_t seed, uint64_t stream = 0) {
    SplitMix64 sm(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    for (auto& w : s_) w = sm.next();
    // All-zero state is invalid for xoshiro; splitmix cannot yield four
    // zeros from distinct counters, but keep the guard explicit.
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  uint64_t next() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log argument.
  double uniform01_open() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  // Exponential by inversion (not std::exponential_distribution, which is
  // implementation-defined and would break cross-build reproducibility).
  double exponential(double rate) { return -std::log(uniform01_open()) / rate; }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

}  // namespace coxbalance
