#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace smdkit {

/* Deterministic random streams. Every stochastic routine takes an explicit
 * Rng so that identical (seed, config) inputs reproduce traces exactly.
 * Sampling primitives are spelled out here instead of relying on
 * std::uniform_real_distribution etc., whose output sequences are
 * implementation-defined. */

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /* Independent stream derived from (master seed, stream index); used for
   * per-trajectory fan-out. Streams with distinct indices never share
   * engine state. */
  static Rng stream(std::uint64_t master, std::uint64_t stream_index) {
    std::uint64_t s = master ^ (0x632be59bd9b4e019ULL * (stream_index + 1));
    return Rng(splitmix64(s));
  }

  std::uint64_t bits() { return engine_(); }

  /* Child generator seeded from this one; copies of the returned Rng replay
   * the same draws, which is how probe pairs share one noise realization. */
  Rng fork() { return Rng(bits()); }

  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  double uniform_open() {
    return (static_cast<double>(bits() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /* Standard normal via Box-Muller; the second value of each pair is cached. */
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform_open();
    double u2 = uniform_open();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  /* Uniform index in {0, ..., n-1}, rejection sampled (no modulo bias). */
  std::size_t index(std::size_t n) {
    std::uint64_t bound = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r = bits();
    while (r >= bound) r = bits();
    return static_cast<std::size_t>(r % n);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace smdkit
