#pragma once

// Single-degree-of-freedom mass-damper-spring oscillator: closed-form unit
// impulse response and noisy, decimated training sets drawn from it.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "srmks/error.hpp"
#include "srmks/rng.hpp"

namespace srmks {

/// Physical coefficients of m x'' + c x' + k x = F(t), restricted to the
/// underdamped regime. Modal quantities are derived once at construction.
class OscillatorParams {
 public:
  OscillatorParams(double mass, double damping, double stiffness)
      : m_(mass), c_(damping), k_(stiffness) {
    detail::require(std::isfinite(m_) && m_ > 0.0, "oscillator mass must be finite and > 0");
    detail::require(std::isfinite(c_) && c_ >= 0.0, "oscillator damping must be finite and >= 0");
    detail::require(std::isfinite(k_) && k_ > 0.0, "oscillator stiffness must be finite and > 0");
    omega_n_ = std::sqrt(k_ / m_);
    zeta_ = c_ / (2.0 * std::sqrt(k_ * m_));
    detail::require(zeta_ < 1.0, "oscillator must be underdamped (zeta < 1), got zeta = " +
                                     std::to_string(zeta_));
    omega_d_ = omega_n_ * std::sqrt(1.0 - zeta_ * zeta_);
  }

  /// m = 1 kg, c = 20 N s/m, k = 1e6 N/m: omega_n = 1000 rad/s, zeta = 0.01.
  static OscillatorParams reference() { return {1.0, 20.0, 1.0e6}; }

  double m() const { return m_; }
  double c() const { return c_; }
  double k() const { return k_; }
  double omega_n() const { return omega_n_; }
  double zeta() const { return zeta_; }
  double omega_d() const { return omega_d_; }

  friend bool operator==(const OscillatorParams& a, const OscillatorParams& b) {
    return a.m_ == b.m_ && a.c_ == b.c_ && a.k_ == b.k_;
  }

 private:
  double m_;
  double c_;
  double k_;
  double omega_n_ = 0.0;
  double zeta_ = 0.0;
  double omega_d_ = 0.0;
};

/// Displacement at time t >= 0 after a unit impulse at t = 0, i.e. the
/// solution with x(0) = 0 and x'(0) = 1/m.
inline double impulse_response(const OscillatorParams& p, double t) {
  detail::require(std::isfinite(t), "impulse_response: time must be finite");
  detail::require(t >= 0.0, "impulse_response: time must be >= 0");
  return std::exp(-p.zeta() * p.omega_n() * t) * std::sin(p.omega_d() * t) / (p.m() * p.omega_d());
}

/// Uniform base grid, decimated by keeping every `decimation`-th point
/// starting at index 0.
struct SamplingPlan {
  double t_start = 0.0;
  double t_end = 0.3;
  std::size_t base_points = 1001;
  std::size_t decimation = 16;
  double snr = 10.0;
  std::uint64_t seed = 0;

  void validate() const {
    detail::require(std::isfinite(t_start) && std::isfinite(t_end) && t_end > t_start,
                    "sampling plan: need finite t_end > t_start");
    detail::require(base_points >= 2, "sampling plan: base_points must be >= 2");
    detail::require(decimation >= 1, "sampling plan: decimation must be >= 1");
    detail::require(snr > 0.0 && !std::isnan(snr), "sampling plan: snr must be > 0");
  }

  std::size_t sample_count() const { return (base_points - 1) / decimation + 1; }

  double base_time(std::size_t i) const {
    if (i + 1 == base_points) return t_end;
    const double step = (t_end - t_start) / static_cast<double>(base_points - 1);
    return t_start + static_cast<double>(i) * step;
  }

  std::vector<double> base_grid() const {
    std::vector<double> grid(base_points);
    for (std::size_t i = 0; i < base_points; ++i) grid[i] = base_time(i);
    return grid;
  }

  friend bool operator==(const SamplingPlan&, const SamplingPlan&) = default;
};

/// Reference sampling: 1001 points on [0, 0.3] s, SNR 10.
inline SamplingPlan reference_plan(std::size_t decimation, std::uint64_t seed = 0) {
  SamplingPlan plan;
  plan.decimation = decimation;
  plan.seed = seed;
  return plan;
}

struct TrainingSet {
  std::vector<double> t;
  std::vector<double> y;
  std::vector<double> true_h;
  double sigma_n = 0.0;
  std::uint64_t seed = 0;
  SamplingPlan plan;
  OscillatorParams params = OscillatorParams::reference();

  std::size_t size() const { return t.size(); }

  void validate() const {
    detail::require(!t.empty(), "training set is empty");
    detail::require(y.size() == t.size() && true_h.size() == t.size(),
                    "training set: t, y and true_h lengths differ");
    detail::require(sigma_n >= 0.0 && std::isfinite(sigma_n), "training set: sigma_n must be >= 0");
    for (std::size_t i = 0; i < t.size(); ++i) {
      detail::require(std::isfinite(t[i]) && std::isfinite(y[i]), "training set: non-finite value");
      if (i > 0) detail::require(t[i] > t[i - 1], "training set: times must be strictly increasing");
    }
  }
};

inline double mean_square(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

/// Noise is N(0, sigma_n^2) with sigma_n = RMS(true_h) / sqrt(snr) over the
/// kept points. Same (params, plan) gives bit-identical output.
inline TrainingSet generate_training_set(const OscillatorParams& params, const SamplingPlan& plan) {
  plan.validate();
  const std::size_t n = plan.sample_count();
  if (n < 2) {
    throw InvalidInput("sampling plan: decimation " + std::to_string(plan.decimation) +
                       " leaves fewer than 2 samples");
  }

  TrainingSet data;
  data.plan = plan;
  data.params = params;
  data.seed = plan.seed;
  data.t.resize(n);
  data.true_h.resize(n);
  data.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    data.t[i] = plan.base_time(i * plan.decimation);
    data.true_h[i] = impulse_response(params, data.t[i]);
  }
  data.sigma_n = std::sqrt(mean_square(data.true_h) / plan.snr);

  GaussianStream noise(plan.seed);
  for (std::size_t i = 0; i < n; ++i) {
    data.y[i] = data.true_h[i] + data.sigma_n * noise.standard_normal();
  }
  return data;
}

}  // namespace srmks
