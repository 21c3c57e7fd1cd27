#ifndef USCO_RNG_HPP
#define USCO_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "usco/params.hpp"

namespace usco {

// Identifier written into trace headers; bump when the sampling recipe
// changes so old traces stay reproducible.
inline constexpr const char* generator_id = "mt19937_64/box-muller-v1";

// Seedable Gaussian source with a pinned recipe: mt19937_64 (sequence fixed
// by the standard) plus hand-rolled Box-Muller, so traces reproduce across
// standard-library implementations.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) from the top 53 bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = constants::two_pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace usco

#endif
