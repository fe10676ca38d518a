#pragma once

// Structural risk minimisation over kernel smoothers. A structure is an
// ordered list of candidate kernels of one family, arranged so capacity is
// nondecreasing along the list; every candidate is fitted and scored by its
// guaranteed risk, and the smallest bound wins.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srmks/error.hpp"
#include "srmks/kernels.hpp"
#include "srmks/oscillator.hpp"
#include "srmks/risk.hpp"
#include "srmks/smoother.hpp"

namespace srmks {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct StructureGrid {
  KernelFamily family = KernelFamily::SE;
  std::vector<KernelSpec> candidates;
  std::string ordering_note;

  std::size_t size() const { return candidates.size(); }
};

/// `count` log-spaced values running from `from` to `to` (either direction),
/// endpoints exact. A single value is `from`.
inline std::vector<double> logspace(double from, double to, std::size_t count) {
  detail::require(from > 0.0 && to > 0.0, "logspace: endpoints must be > 0");
  detail::require(count >= 1, "logspace: count must be >= 1");
  std::vector<double> out(count);
  out[0] = from;
  if (count == 1) return out;
  const double a = std::log(from);
  const double step = (std::log(to) - a) / static_cast<double>(count - 1);
  for (std::size_t i = 1; i + 1 < count; ++i) out[i] = std::exp(a + step * static_cast<double>(i));
  out[count - 1] = to;
  return out;
}

namespace detail {

inline void check_range(const Range& r, const char* what) {
  require(std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo > 0.0 && r.lo < r.hi,
          std::string(what) + ": need 0 < lo < hi");
}

}  // namespace detail

/// sigma_f ascending x length-scale descending, ordered by descending l first:
/// element k admits l >= c_k with c_1 > c_2 > ..., so each prefix is nested
/// in the next and capacity grows along the list.
inline StructureGrid build_se_grid(Range sigma_f_range, Range l_range, std::size_t n_sigma,
                                   std::size_t n_l) {
  detail::check_range(sigma_f_range, "SE grid sigma_f range");
  detail::check_range(l_range, "SE grid length-scale range");
  detail::require(n_sigma >= 1 && n_l >= 1, "SE grid: counts must be >= 1");

  StructureGrid grid;
  grid.family = KernelFamily::SE;
  grid.ordering_note =
      "length_scale descending (primary), sigma_f ascending (secondary); capacity nondecreasing";
  const auto sigmas = logspace(sigma_f_range.lo, sigma_f_range.hi, n_sigma);
  const auto scales = logspace(l_range.hi, l_range.lo, n_l);
  grid.candidates.reserve(n_sigma * n_l);
  for (double l : scales) {
    for (double s : sigmas) grid.candidates.push_back(KernelSpec::se(s, l));
  }
  return grid;
}

/// Only sigma_f varies; m, c and k are fixed to the supplied coefficients.
inline StructureGrid build_sdof_grid(const OscillatorParams& params, Range sigma_f_range,
                                     std::size_t n_sigma) {
  detail::check_range(sigma_f_range, "SDOF grid sigma_f range");
  detail::require(n_sigma >= 1, "SDOF grid: count must be >= 1");
  StructureGrid grid;
  grid.family = KernelFamily::SDOF;
  grid.ordering_note = "sigma_f ascending; m, c, k fixed";
  for (double s : logspace(sigma_f_range.lo, sigma_f_range.hi, n_sigma)) {
    grid.candidates.push_back(KernelSpec::sdof(s, params));
  }
  return grid;
}

/// Data-derived grid defaults. Amplitude factors scale RMS(y) into a range
/// for the prior standard deviation sqrt(k(t, t)); for SE that is sigma_f
/// itself, for SDOF sigma_f is divided by sqrt of the unit zero-lag value.
struct SeGridSettings {
  std::size_t n_sigma = 10;
  std::size_t n_l = 30;
  double amp_lo = 0.1;
  double amp_hi = 10.0;
  /// Defaults: smallest training gap and training span.
  std::optional<double> l_lo;
  std::optional<double> l_hi;

  friend bool operator==(const SeGridSettings&, const SeGridSettings&) = default;
};

struct SdofGridSettings {
  std::size_t n_sigma = 30;
  double amp_lo = 0.1;
  double amp_hi = 10.0;

  friend bool operator==(const SdofGridSettings&, const SdofGridSettings&) = default;
};

struct GridSettings {
  SeGridSettings se;
  SdofGridSettings sdof;

  friend bool operator==(const GridSettings&, const GridSettings&) = default;
};

inline double rms(std::span<const double> v) { return std::sqrt(mean_square(v)); }

inline StructureGrid default_se_grid(const TrainingSet& data, const SeGridSettings& s = {}) {
  data.validate();
  detail::require(data.size() >= 2, "SE grid: need at least two training points");
  const double amplitude = rms(data.y);
  detail::require(amplitude > 0.0, "SE grid: RMS(y) is zero");
  double min_gap = data.t[1] - data.t[0];
  for (std::size_t i = 2; i < data.size(); ++i) min_gap = std::min(min_gap, data.t[i] - data.t[i - 1]);
  const double span = data.t.back() - data.t.front();
  return build_se_grid({s.amp_lo * amplitude, s.amp_hi * amplitude},
                       {s.l_lo.value_or(min_gap), s.l_hi.value_or(span)}, s.n_sigma, s.n_l);
}

inline StructureGrid default_sdof_grid(const TrainingSet& data, const SdofGridSettings& s = {}) {
  data.validate();
  const double amplitude = rms(data.y);
  detail::require(amplitude > 0.0, "SDOF grid: RMS(y) is zero");
  const double unit_std = std::sqrt(KernelSpec::sdof(1.0, data.params).unit_amplitude());
  return build_sdof_grid(data.params, {s.amp_lo * amplitude / unit_std, s.amp_hi * amplitude / unit_std},
                         s.n_sigma);
}

struct CandidateEvaluation {
  KernelSpec spec;
  RiskReport report;
};

struct SelectionResult {
  KernelFamily family = KernelFamily::SE;
  KernelSpec best_spec;
  RiskReport best_report;
  std::size_t best_index = 0;
  /// Every candidate's bound was infinite; the winner is the smallest-h one.
  bool degenerate = false;
  std::vector<CandidateEvaluation> trace;
  FittedSmoother model;
};

namespace detail {

/// Smaller bound wins; equal bounds (including two infinities) go to the
/// smaller capacity; full ties keep the incumbent.
inline bool beats(const RiskReport& challenger, const RiskReport& incumbent) {
  if (challenger.bound != incumbent.bound) return challenger.bound < incumbent.bound;
  return challenger.h < incumbent.h;
}

}  // namespace detail

/// Exhaustive search: fit every candidate with the data's noise level, score
/// it by guaranteed_risk(training MSE, edf, n) and keep the argmin.
inline SelectionResult srm_select(const StructureGrid& grid, const TrainingSet& data,
                                  const BoundConfig& cfg = {}) {
  detail::require(!grid.candidates.empty(), "srm_select: empty structure");
  for (const auto& c : grid.candidates) {
    detail::require(c.family() == grid.family, "srm_select: mixed kernel families in one structure");
  }
  data.validate();
  cfg.validate();

  std::vector<std::unique_ptr<SpectralBasis>> bases;
  auto basis_for = [&](const KernelSpec& spec) -> const SpectralBasis& {
    for (const auto& b : bases) {
      if (b->matches(spec)) return *b;
    }
    bases.push_back(std::make_unique<SpectralBasis>(spec, data.t));
    return *bases.back();
  };

  std::optional<SelectionResult> result;
  std::vector<CandidateEvaluation> trace;
  trace.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const KernelSpec& spec = grid.candidates[i];
    FittedSmoother model = basis_for(spec).fit(spec.sigma_f(), data.y, data.sigma_n);
    const double mse = empirical_risk(
        data.y, std::span<const double>(model.fitted.data(), static_cast<std::size_t>(model.fitted.size())));
    const RiskReport report = guaranteed_risk(mse, model.edf, data.size(), cfg);
    trace.push_back({spec, report});
    if (!result || detail::beats(report, result->best_report)) {
      result = SelectionResult{grid.family, spec, report, i, false, {}, std::move(model)};
    }
  }
  result->degenerate = std::isinf(result->best_report.bound);
  result->trace = std::move(trace);
  return std::move(*result);
}

/// Lowest winning bound across structures; ties to smaller h, then list order.
inline SelectionResult compare_structures(std::span<const SelectionResult> results) {
  detail::require(!results.empty(), "compare_structures: no structures given");
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (detail::beats(results[i].best_report, results[best].best_report)) best = i;
  }
  return results[best];
}

}  // namespace srmks
