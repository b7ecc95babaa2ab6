#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mtom {

// Deterministic random source. All transforms are implemented by hand on top
// of the raw mt19937_64 stream so that sequences are bit-identical across
// standard library implementations (std::*_distribution is unspecified).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1] (safe as a log argument).
  double uniform_pos() { return 1.0 - uniform(); }

  double uniform_in(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal pair via Box-Muller.
  void gaussian_pair(double& g0, double& g1) {
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double phi = 2.0 * M_PI * uniform();
    g0 = r * std::cos(phi);
    g1 = r * std::sin(phi);
  }

  double gaussian() {
    double g0, g1;
    gaussian_pair(g0, g1);
    return g0;
  }

  // Integer in [0, n) by rejection-free scaling (n is tiny in this codebase,
  // the modulo bias of 53-bit scaling is negligible and deterministic).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  }

 private:
  std::mt19937_64 gen_;
};

// splitmix64: used to derive independent substream seeds from (seed, index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace mtom
