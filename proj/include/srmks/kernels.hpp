#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "srmks/error.hpp"
#include "srmks/oscillator.hpp"

namespace srmks {

enum class KernelFamily { SE, SDOF };

inline std::string_view to_string(KernelFamily f) { return f == KernelFamily::SE ? "se" : "sdof"; }

inline KernelFamily family_from_string(std::string_view s) {
  if (s == "se") return KernelFamily::SE;
  if (s == "sdof") return KernelFamily::SDOF;
  throw InvalidInput("unknown kernel family '" + std::string(s) + "' (expected se or sdof)");
}

/// A stationary kernel k(t, t') = sigma_f^2 * shape(|t - t'|).
///
/// SE:   shape(tau) = exp(-tau^2 / (2 l^2))
/// SDOF: shape(tau) = exp(-zeta wn tau) [cos(wd tau) + zeta wn / wd sin(wd tau)] / (4 m^2 zeta wn^3)
///
/// The SDOF form is the covariance of an oscillator's displacement under
/// white-noise forcing, so its zero-lag value carries physical units and is
/// far from 1 (2.5e-8 for the reference oscillator).
class KernelSpec {
 public:
  static KernelSpec se(double sigma_f, double length_scale) {
    detail::require(std::isfinite(sigma_f) && sigma_f > 0.0, "SE kernel: sigma_f must be > 0");
    detail::require(std::isfinite(length_scale) && length_scale > 0.0,
                    "SE kernel: length_scale must be > 0");
    KernelSpec spec(KernelFamily::SE, sigma_f);
    spec.length_scale_ = length_scale;
    return spec;
  }

  static KernelSpec sdof(double sigma_f, const OscillatorParams& params) {
    detail::require(std::isfinite(sigma_f) && sigma_f > 0.0, "SDOF kernel: sigma_f must be > 0");
    // zeta = 0 puts a zero in the amplitude denominator.
    detail::require(params.zeta() > 0.0, "SDOF kernel: damping must be > 0");
    KernelSpec spec(KernelFamily::SDOF, sigma_f);
    spec.params_ = params;
    return spec;
  }

  KernelFamily family() const { return family_; }
  double sigma_f() const { return sigma_f_; }

  /// Only meaningful for SE.
  double length_scale() const { return length_scale_; }

  /// Only meaningful for SDOF.
  const OscillatorParams& oscillator() const { return *params_; }

  KernelSpec with_sigma_f(double sigma_f) const {
    return family_ == KernelFamily::SE ? se(sigma_f, length_scale_) : sdof(sigma_f, *params_);
  }

  /// shape(0): k(t, t) for sigma_f = 1.
  double unit_amplitude() const {
    if (family_ == KernelFamily::SE) return 1.0;
    const OscillatorParams& p = *params_;
    return 1.0 / (4.0 * p.m() * p.m() * p.zeta() * p.omega_n() * p.omega_n() * p.omega_n());
  }

  double shape(double tau) const {
    if (family_ == KernelFamily::SE) {
      return std::exp(-(tau * tau) / (2.0 * length_scale_ * length_scale_));
    }
    const OscillatorParams& p = *params_;
    const double decay = p.zeta() * p.omega_n();
    return unit_amplitude() * std::exp(-decay * tau) *
           (std::cos(p.omega_d() * tau) + decay / p.omega_d() * std::sin(p.omega_d() * tau));
  }

  double operator()(double t, double t_prime) const {
    return (sigma_f_ * sigma_f_) * shape(std::abs(t - t_prime));
  }

  /// True when the two specs differ at most in sigma_f, so that their Gram
  /// matrices are scalar multiples of one another.
  bool same_shape(const KernelSpec& other) const {
    if (family_ != other.family_) return false;
    if (family_ == KernelFamily::SE) return length_scale_ == other.length_scale_;
    return *params_ == *other.params_;
  }

  friend bool operator==(const KernelSpec& a, const KernelSpec& b) {
    return a.same_shape(b) && a.sigma_f_ == b.sigma_f_;
  }

 private:
  KernelSpec(KernelFamily family, double sigma_f) : family_(family), sigma_f_(sigma_f) {}

  KernelFamily family_;
  double sigma_f_;
  double length_scale_ = 0.0;
  std::optional<OscillatorParams> params_;
};

inline double kernel_eval(const KernelSpec& spec, double t, double t_prime) {
  return spec(t, t_prime);
}

struct GramMatrix {
  Eigen::MatrixXd values;
  KernelSpec kernel;
  std::vector<double> inputs;

  std::size_t size() const { return inputs.size(); }
};

/// Fills the upper triangle and mirrors it, so values(i, j) == values(j, i)
/// bit for bit.
inline GramMatrix gram(const KernelSpec& spec, std::span<const double> t) {
  detail::require(!t.empty(), "gram: no inputs");
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd values(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double v = spec(t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(j)]);
      values(i, j) = v;
      values(j, i) = v;
    }
  }
  return {std::move(values), spec, std::vector<double>(t.begin(), t.end())};
}

inline Eigen::VectorXd cross_vector(const KernelSpec& spec, std::span<const double> t_train,
                                    double t_star) {
  detail::require(!t_train.empty(), "cross_vector: no training inputs");
  Eigen::VectorXd k(static_cast<Eigen::Index>(t_train.size()));
  for (std::size_t i = 0; i < t_train.size(); ++i) k[static_cast<Eigen::Index>(i)] = spec(t_train[i], t_star);
  return k;
}

}  // namespace srmks
