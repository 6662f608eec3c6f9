#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace cogrel {

// Deterministic random source. The standard distributions are
// implementation-defined, so uniform and normal draws are built directly on
// the mt19937_64 bit stream; the same seed yields the same bytes everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform on [0, 1): top 53 bits scaled by 2^-53.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n); n must be > 0. Rejection-free modulo is fine
  // here (n is tiny vs 2^64; bias is ~n/2^64).
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

  // Standard normal via Box-Muller, one value per call (no cached spare, so
  // the draw count per operation is fixed and documentable).
  double normal() {
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace cogrel
