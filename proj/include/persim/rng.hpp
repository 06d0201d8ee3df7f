#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace persim {

// Purpose tag for a derived random stream. Every random quantity in the
// system is drawn from a stream keyed by (seed, purpose, ids...), so what a
// stream yields can never depend on loop order, thread count, or policy.
enum class Stream : std::uint64_t {
  dwell_jitter = 1,
  app_choice,
  tolerance_noise,
  qos_sample,
  shadowing,
  fading,
  clustering,
  testing,
};

// splitmix64 finalizer; good avalanche, cheap, and identical everywhere.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator: construct with a key, then draw. The n-th draw is
// a pure function of (key, n). Not a crypto RNG; statistical quality is what
// the simulation needs and no more.
class KeyedRng {
 public:
  explicit KeyedRng(std::uint64_t seed) noexcept : state_(mix64(seed + kGamma)) {}

  KeyedRng(std::uint64_t seed, Stream purpose,
           std::initializer_list<std::uint64_t> ids) noexcept
      : KeyedRng(seed) {
    absorb(static_cast<std::uint64_t>(purpose));
    for (std::uint64_t id : ids) absorb(id);
  }

  void absorb(std::uint64_t v) noexcept { state_ = mix64(state_ ^ (v + kGamma)); }

  std::uint64_t next_u64() noexcept { return mix64(state_ += kGamma); }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * next_double();
  }

  // Uniform integer in [0, n); n must be positive. Modulo bias is below
  // n / 2^64, irrelevant for the small n used here.
  int uniform_int(int n) noexcept {
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
  }

  // Standard normal via Box-Muller. Always consumes exactly two uniforms.
  double gaussian() noexcept {
    double u1 = next_double();
    double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;  // log(0) guard
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Exponential with mean 1 (unit-power Rayleigh fading gain).
  double exponential() noexcept { return -std::log1p(-next_double()); }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

}  // namespace persim
