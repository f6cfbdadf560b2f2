#pragma once

// Seeded field generation. mt19937_64 output is pinned by the standard and
// the Box-Muller transform avoids the implementation-defined distribution
// adapters, so corpora are reproducible for a (seed, size) pair on a given
// platform.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ndcz/measure.hpp"

namespace ndcz {

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    while (u == 0.0) u = uniform();
    double v = uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(2.0 * M_PI * v);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * v);
  }

  uint64_t bits() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline ScalarField random_field(std::size_t n, uint64_t seed) {
  Rng rng(seed);
  ScalarField f(n);
  for (double& v : f) v = rng.gauss();
  return f;
}

inline std::vector<ScalarField> random_fields(std::size_t n, std::size_t count,
                                              uint64_t seed) {
  std::vector<ScalarField> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c)
    out.push_back(random_field(n, seed + 0x9e3779b97f4a7c15ull * (c + 1)));
  return out;
}

}  // namespace ndcz
