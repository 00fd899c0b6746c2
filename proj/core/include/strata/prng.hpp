#pragma once

#include <cstdint>

namespace strata {

/// Portable linear congruential generator:
///   state <- (1664525 * state + 1013904223) mod 2^32
/// Each draw advances the state and returns it scaled to [0, 1).
/// The 64-bit seed is folded into the 32-bit state as (lo ^ hi).
/// Every port that follows this recipe reproduces identical layouts.
class Lcg {
 public:
  explicit constexpr Lcg(std::uint64_t seed = 0) noexcept
      : state_(static_cast<std::uint32_t>(seed) ^ static_cast<std::uint32_t>(seed >> 32)) {}

  constexpr std::uint32_t next_u32() noexcept {
    state_ = state_ * 1664525u + 1013904223u;  // wraps mod 2^32
    return state_;
  }

  /// Uniform double in [0, 1).
  constexpr double uniform() noexcept { return next_u32() / 4294967296.0; }

  /// Uniform double in [lo, hi).
  constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  constexpr std::uint32_t below(std::uint32_t n) noexcept {
    return static_cast<std::uint32_t>(uniform() * n);
  }

  /// True with probability p.
  constexpr bool chance(double p) noexcept { return uniform() < p; }

  constexpr std::uint32_t state() const noexcept { return state_; }

  friend constexpr bool operator==(const Lcg&, const Lcg&) = default;

 private:
  std::uint32_t state_;
};

}  // namespace strata
