#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "favar/errors.hpp"

namespace favar {

// splitmix64 step; used only to expand (seed, stream) into engine seeds.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Deterministic draw stream keyed by (seed, stream). The same pair always
// reproduces the same sequence bit for bit; distinct stream ids give
// unrelated sequences from the same seed. The engine is mt19937_64 (exact
// sequence fixed by the standard) and every distribution transform is local
// to this class, so no implementation-defined std:: distribution leaks in.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), gen_(mix(seed, stream)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Independent child stream; deterministic in (seed, stream, tag).
  RngStream derive(std::uint64_t tag) const {
    std::uint64_t st = stream_ ^ (tag * 0xBF58476D1CE4E5B9ULL + 0x2545F4914F6CDD1DULL);
    return RngStream(seed_, splitmix64_next(st));
  }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

  // Standard normal via the Marsaglia polar method (second deviate cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Gamma(shape, scale) via Marsaglia-Tsang squeeze; shape<1 handled by the
  // usual boost gamma(shape+1) * U^{1/shape}.
  double gamma(double shape, double scale) {
    if (shape <= 0.0 || scale <= 0.0) {
      throw Error("gamma: shape and scale must be positive");
    }
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) {
        return d * v * scale;
      }
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
        return d * v * scale;
      }
    }
  }

  double chi_squared(double dof) { return gamma(0.5 * dof, 2.0); }

  // Uniform index in [0, n); bias below 2^-64 * n is ignored.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

  // Index draw from unnormalized non-negative weights.
  int categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0) || !std::isfinite(total)) {
      throw Error("categorical: weights must sum to a positive finite value");
    }
    double u = uniform() * total;
    for (std::size_t j = 0; j + 1 < weights.size(); ++j) {
      u -= weights[j];
      if (u < 0.0) return static_cast<int>(j);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

  // Uniform on (0, 1]; safe operand for log().
  double uniform_pos() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

 private:

  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t st = seed;
    std::uint64_t h = splitmix64_next(st);
    st = h ^ (stream * 0x9E3779B97F4A7C15ULL + 0x94D049BB133111EBULL);
    return splitmix64_next(st);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace favar
