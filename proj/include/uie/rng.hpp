#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace uie {

namespace detail {

// splitmix64 finalizer; used to spread seed/stream pairs over engine states.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Deterministic random stream: (seed, stream) fully determines the output
/// sequence on every platform.  Streams are meant to be derived one per draw
/// so that Monte Carlo results do not depend on the number of workers.
///
/// Uniform and Gaussian variates are generated from the raw 64-bit output
/// directly (53-bit ladder + Box-Muller); the distributions in <random> are
/// implementation-defined and would break cross-platform reproducibility.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream),
        eng_(detail::mix64(seed ^ detail::mix64(stream))) {}

  static SeededRng for_stream(std::uint64_t seed, std::uint64_t stream) {
    return SeededRng(seed, stream);
  }

  static constexpr const char* algorithm() { return "mt19937_64/splitmix64"; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Uniform on [0,1), 53 bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0,1]; never returns 0 (safe under log()).
  double uniform_open() {
    return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (pairs cached).
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Complex with independent standard normal real and imaginary parts.
  std::complex<double> complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return {re, im};
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace uie
