#pragma once

#include <cstdint>
#include <random>

#include "udf/types.hpp"

namespace udf {

// Deterministic generator. mt19937_64 has a bit-exact standardized stream and
// the gaussian is hand-rolled Box-Muller so runs reproduce across platforms.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // uniform in [0,1)
  double uniform() {
    return (eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double gaussian();

  Vec gaussian_vec(int d);

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// splitmix64, used to derive independent sub-seeds
uint64_t mix_seed(uint64_t seed, uint64_t salt);

}  // namespace udf
