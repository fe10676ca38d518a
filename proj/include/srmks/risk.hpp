#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>

#include "srmks/error.hpp"

namespace srmks {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Denominators at or below this are treated as nonpositive.
inline constexpr double kClipEpsilon = 1e-12;

enum class DeltaRule { FIXED, FOUR_OVER_SQRT_N };

/// Constants of the general VC regression bound
///   R <= R_emp / (1 - c sqrt(eta))_+,
///   eta = a1 (h [ln(a2 n / h) + 1] - ln(delta / 4)) / n.
/// Defaults reproduce the reduced bound (a1 = a2 = c = 1, delta = 4/sqrt(n)).
struct BoundConfig {
  double a1 = 1.0;
  double a2 = 1.0;
  double c = 1.0;
  double delta = 0.05;
  DeltaRule delta_rule = DeltaRule::FOUR_OVER_SQRT_N;

  void validate() const {
    detail::require(a1 > 0.0 && a2 > 0.0 && c > 0.0, "bound config: a1, a2 and c must be > 0");
    if (delta_rule == DeltaRule::FIXED) {
      detail::require(delta > 0.0 && delta < 1.0, "bound config: fixed delta must lie in (0, 1)");
    }
  }

  bool is_reduced_form() const {
    return a1 == 1.0 && a2 == 1.0 && c == 1.0 && delta_rule == DeltaRule::FOUR_OVER_SQRT_N;
  }

  double delta_for(std::size_t n) const {
    return delta_rule == DeltaRule::FIXED ? delta : 4.0 / std::sqrt(static_cast<double>(n));
  }

  friend bool operator==(const BoundConfig&, const BoundConfig&) = default;
};

struct RiskReport {
  double empirical_risk = 0.0;
  double h = 0.0;
  std::size_t n = 0;
  double p = 0.0;
  double delta = 0.0;
  double bound = 0.0;
  bool clipped = false;
  /// General bound only: eta came out negative (extreme delta).
  bool negative_eta = false;
};

/// Mean squared residual.
inline double empirical_risk(std::span<const double> targets, std::span<const double> predictions) {
  detail::require(targets.size() == predictions.size(), "empirical_risk: length mismatch");
  detail::require(!targets.empty(), "empirical_risk: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double r = targets[i] - predictions[i];
    acc += r * r;
  }
  return acc / static_cast<double>(targets.size());
}

namespace detail {

inline void check_bound_inputs(double mse, double h, std::size_t n) {
  require(n >= 1, "risk bound: n must be >= 1");
  require(!std::isnan(h) && h >= 0.0, "risk bound: capacity h must be >= 0");
  require(!std::isnan(mse) && mse >= 0.0, "risk bound: empirical risk must be >= 0");
}

inline void finish(RiskReport& r, double denominator) {
  if (!(denominator > kClipEpsilon)) {
    r.bound = kInfinity;
    r.clipped = true;
  } else {
    r.bound = r.empirical_risk / denominator;
    r.clipped = false;
  }
}

}  // namespace detail

/// Penalty argument p - p ln p + ln(n) / (2n) with p ln p := 0 at p = 0.
inline double reduced_penalty(double p, std::size_t n) {
  const double nd = static_cast<double>(n);
  const double p_log_p = p > 0.0 ? p * std::log(p) : 0.0;
  return p - p_log_p + std::log(nd) / (2.0 * nd);
}

/// R_emp * (1 - sqrt(p - p ln p + ln(n)/(2n)))_+^{-1} with p = h / n.
///
/// h > n is reported as clipped: past p = 1 the penalty bends back down and
/// would otherwise produce finite bounds for capacities above the sample size.
inline RiskReport vc_bound_reduced(double mse, double h, std::size_t n) {
  detail::check_bound_inputs(mse, h, n);
  RiskReport r;
  r.empirical_risk = mse;
  r.h = h;
  r.n = n;
  r.p = h / static_cast<double>(n);
  r.delta = 4.0 / std::sqrt(static_cast<double>(n));
  if (r.p > 1.0) {
    detail::finish(r, 0.0);
    return r;
  }
  detail::finish(r, 1.0 - std::sqrt(reduced_penalty(r.p, n)));
  return r;
}

inline RiskReport vc_bound_general(double mse, double h, std::size_t n, const BoundConfig& cfg) {
  detail::check_bound_inputs(mse, h, n);
  cfg.validate();
  RiskReport r;
  r.empirical_risk = mse;
  r.h = h;
  r.n = n;
  const double nd = static_cast<double>(n);
  r.p = h / nd;
  r.delta = cfg.delta_for(n);

  const double capacity_term = h > 0.0 ? h * (std::log(cfg.a2 * nd / h) + 1.0) : 0.0;
  const double eta = cfg.a1 * (capacity_term - std::log(r.delta / 4.0)) / nd;
  if (!(eta >= 0.0)) {
    r.negative_eta = true;
    detail::finish(r, 0.0);
    return r;
  }
  detail::finish(r, 1.0 - cfg.c * std::sqrt(eta));
  return r;
}

/// Reduced form when cfg holds the default constants, general form otherwise.
inline RiskReport guaranteed_risk(double mse, double h, std::size_t n, const BoundConfig& cfg) {
  return cfg.is_reduced_form() ? vc_bound_reduced(mse, h, n) : vc_bound_general(mse, h, n, cfg);
}

/// 1 - 4/sqrt(n): the probability with which the reduced bound holds.
/// Undefined (nonpositive) for n <= 16.
inline double realized_confidence(std::size_t n) {
  if (n <= 16) {
    throw InvalidInput("realized_confidence: 1 - 4/sqrt(n) is not a probability for n = " +
                       std::to_string(n) + " (need n >= 17)");
  }
  return 1.0 - 4.0 / std::sqrt(static_cast<double>(n));
}

}  // namespace srmks
