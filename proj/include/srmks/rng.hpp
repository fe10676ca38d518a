#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace srmks {

// Standard-normal sampler with a bit-exact definition on every platform.
// The engine is std::mt19937_64 (its output sequence is fixed by the
// standard); uniforms take the top 53 bits; normals come from the basic
// Box-Muller transform, both outputs of each pair consumed in order.
// std::normal_distribution is avoided because its algorithm is left to
// the library vendor.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in (0, 1].
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double standard_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double stddev) {
    return mean + stddev * standard_normal();
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace srmks
