#pragma once

// Reproducible random streams. The generator is pinned to std::mt19937_64
// (its output sequence is fixed by the C++ standard), and all variate
// mappings are implemented here from raw 64-bit words so that seeded runs
// are bit-identical across standard libraries. Streams for (replica,
// purpose) pairs are derived with splitmix64 mixing.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

namespace filterstab {

inline std::uint64_t splitmix64_next(std::uint64_t &state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

enum class StreamPurpose : std::uint64_t {
  trajectory = 1,
  row = 2,
  replica = 3,
  gamma = 4,
  lambda1 = 5,
  wedge = 6,
  misclassification = 7,
  concentration = 8,
  direct = 9,
  testing = 10,
};

// Deterministic seed for sub-stream `index` of `base` under a given purpose.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index, StreamPurpose purpose) {
  std::uint64_t s = base;
  splitmix64_next(s);
  s ^= 0xA24BAED4963EE407ull * (static_cast<std::uint64_t>(purpose) + 1);
  splitmix64_next(s);
  s ^= 0x9FB21C651E98DF25ull * (index + 1);
  return splitmix64_next(s);
}

class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]; safe as a log() argument.
  double uniform01_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Box-Muller without caching; consumes two words per draw.
  double normal(double mean, double stddev) {
    const double u1 = uniform01_pos();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Index draw by inverse-CDF walk; probs must sum to 1 up to rounding.
  std::size_t categorical(std::span<const double> probs) {
    const double u = uniform01();
    double c = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      c += probs[i];
      if (u < c) return i;
    }
    return probs.size() - 1;
  }

private:
  std::mt19937_64 engine_;
};

} // namespace filterstab
