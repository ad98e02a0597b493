#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hsdiff {

namespace detail {

// Finalizer of the splitmix64 generator (Steele, Lea, Flood 2014).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

// Counter-based pseudo-random generator. Output i of a stream with key K is
//   mix64(K + (i + 1) * 0x9E3779B97F4A7C15)
// i.e. splitmix64 seeded at K. Substreams are derived from the key alone
// (fork(s) -> key mix64(K ^ mix64(s + 1))), so forking is independent of how
// many draws the parent has made; this is the sub-seed scheme every module
// uses for per-band and per-component streams.
//
// Gaussian variates come from the Box-Muller transform on two uniform draws;
// the second variate of each pair is cached and returned by the next call.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(seed) {}

  std::uint64_t next_u64() {
    counter_ += 0x9E3779B97F4A7C15ull;
    return detail::mix64(key_ + counter_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on {0, ..., n-1}; n must be positive. Rejection sampling keeps
  // the distribution exact.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Standard normal via Box-Muller; u1 is shifted into (0, 1].
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 =
        static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Key of the substream derived for `stream`; depends only on this
  // stream's key, never on how many draws have been made.
  std::uint64_t fork_seed(std::uint64_t stream) const {
    return detail::mix64(key_ ^ detail::mix64(stream + 1));
  }

  // Independent substream addressed by `stream`.
  Rng fork(std::uint64_t stream) const { return Rng(fork_seed(stream)); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hsdiff
