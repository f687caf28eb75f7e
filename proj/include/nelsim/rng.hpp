#ifndef NELSIM_RNG_HPP
#define NELSIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace nelsim {

/// splitmix64 finalizer; full-period bijection on 64-bit integers.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream keyed by (seed, stream, index). Streams for
/// distinct keys are statistically independent, and a draw depends only on
/// its key and position, never on sequencing across streams — a serial loop
/// over particles and a parallel one produce identical numbers.
struct RngStream {
  std::uint64_t state;

  static RngStream derive(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t k = mix64(seed ^ 0x7f4a7c15f39cc060ULL);
    k = mix64(k ^ mix64(stream));
    k = mix64(k ^ mix64(index));
    return RngStream{k};
  }

  std::uint64_t next_u64() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (one branch; two uniforms per draw).
  double next_normal() {
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
};

/// Stream tags keeping the independent uses of one run seed disjoint.
namespace rng_domain {
inline constexpr std::uint64_t kInitialSample = 0x01ULL << 56;
inline constexpr std::uint64_t kBaselineSample = 0x02ULL << 56;
inline constexpr std::uint64_t kDiffusion = 0x10ULL << 56;  // + step counter
inline constexpr std::uint64_t kBellOutcomes = 0x03ULL << 56;
}  // namespace rng_domain

}  // namespace nelsim

#endif
