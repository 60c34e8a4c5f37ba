#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "admkit/special.hpp"

namespace admkit {

// splitmix64 finalizer; used for seeding and stream-key derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Child stream key; distinct indices give decorrelated streams and the
// derivation is independent of evaluation order or thread count.
inline std::uint64_t substream(std::uint64_t key, std::uint64_t index) {
  return mix64(key ^ mix64(index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
}

inline std::uint64_t substream(std::uint64_t key, std::string_view label) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char ch : label) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  return substream(key, h);
}

// xoshiro256++ with inverse-CDF sampling so that draws are identical across
// platforms and independent of the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : state_) {
      w = mix64(x);
      x = w;
    }
  }

  std::uint64_t next_u64() {
    auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
    std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return normal_quantile(uniform()); }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

  double exponential(double mean) { return -mean * std::log(uniform()); }

  // Marsaglia-Tsang; shapes below 1 use the boost by a uniform power.
  double gamma(double shape, double scale) {
    if (shape < 1.0) {
      double u = uniform();
      return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double t = 1.0 + c * x;
      if (t <= 0) continue;
      double v = t * t * t;
      double u = uniform();
      double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
  }

 private:
  std::uint64_t state_[4];
};

}  // namespace admkit
