#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace psra {

// SplitMix64 step; used only to expand seeds into engine state.
inline std::uint64_t splitmix64_next(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// PCG64 DXSM: 128-bit LCG state, 64-bit output, stream selected by an odd
// increment. A (seed, stream) pair fully determines the sequence, so
// replication r of an ensemble runs on Rng(master_seed, r) and ensembles are
// reproducible no matter how replications are scheduled across threads.
class Rng {
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t s = seed;
    const std::uint64_t state_hi = splitmix64_next(s);
    const std::uint64_t state_lo = splitmix64_next(s);
    std::uint64_t t = stream;
    const std::uint64_t inc_hi = splitmix64_next(t);
    const std::uint64_t inc_lo = splitmix64_next(t);
    inc_ = ((u128(inc_hi) << 64) | inc_lo) | 1u;
    state_ = ((u128(state_hi) << 64) | state_lo) + inc_;
    step();
  }

  result_type operator()() {
    const u128 old = state_;
    step();
    std::uint64_t hi = static_cast<std::uint64_t>(old >> 64);
    const std::uint64_t lo = static_cast<std::uint64_t>(old) | 1u;
    hi ^= hi >> 32;
    hi *= kMult;
    hi ^= hi >> 48;
    return hi * lo;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(operator()() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe under log().
  double uniform01_pos() {
    return static_cast<double>((operator()() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard exponential, mean 1.
  double exponential() { return -std::log(uniform01_pos()); }

  // Standard normal via Box-Muller. The spare root is discarded so a call
  // always consumes exactly two uniforms.
  double normal() {
    const double r = std::sqrt(-2.0 * std::log(uniform01_pos()));
    return r * std::cos(2.0 * std::numbers::pi * uniform01());
  }

private:
  using u128 = unsigned __int128;
  static constexpr std::uint64_t kMult = 0xda942042e4dd58b5ULL;

  void step() { state_ = state_ * kMult + inc_; }

  u128 state_{};
  u128 inc_{};
};

}  // namespace psra
