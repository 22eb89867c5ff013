#ifndef SBD_RNG_HPP
#define SBD_RNG_HPP

#include <cstdint>
#include <random>

#include "sbd/types.hpp"

namespace sbd {

// splitmix64 finalizer; used both for seed derivation and stream mixing.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Per-trial seeds derive from a master seed and a trial counter, so trials
// can be generated independently and in any order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ mix64(index + 1));
}

// Deterministic generator with hand-rolled distributions; std distributions
// are implementation-defined and would tie outputs to one standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in (0, 1].
  Real uniform() {
    return (static_cast<Real>(next() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller.
  Real normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const Real u = uniform();
    const Real v = uniform();
    const Real r = std::sqrt(-2.0 * std::log(u));
    const Real t = 2.0 * M_PI * v;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  // Real and imaginary parts each standard normal (variance 1 per part).
  Complex complex_normal() {
    const Real re = normal();
    const Real im = normal();
    return {re, im};
  }

  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    // rejection sampling to avoid modulo bias
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }

  // Sample `count` distinct indices from [0, population) without replacement.
  std::vector<int> sample_without_replacement(int population, int count);

  // Uniformly random permutation of [0, n).
  std::vector<int> permutation(int n);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  Real spare_ = 0.0;
};

}  // namespace sbd

#endif  // SBD_RNG_HPP
