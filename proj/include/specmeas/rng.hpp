// Deterministic, splittable random stream. Identical seeds give identical
// sequences; substreams are keyed off the root seed only, so splitting is
// insensitive to how many draws the parent has already produced.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace specmeas {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : root_(seed), id_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    eng_.seed(seq);
  }

  // Independent child stream; index k maps to a distinct 64-bit key.
  RngStream substream(std::uint64_t k) const {
    return RngStream(root_, detail::splitmix64(id_ ^ detail::splitmix64(k + 1)));
  }

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1); never returns 0 (safe to take logs of).
  double uniform01_open() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Standard normal via Box-Muller, caching the second variate.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u = uniform01_open();
    const double v = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double t = 6.283185307179586476925286766559 * v;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  std::uint64_t root_seed() const { return root_; }
  std::uint64_t stream_id() const { return id_; }

 private:
  std::uint64_t root_;
  std::uint64_t id_;
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace specmeas
