#pragma once

// Monte-Carlo study: for every sampling plan and repetition, draw a fresh
// noise realisation, run SRM selection in each kernel structure and score
// the winner against the noise-free response on the dense base grid.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "srmks/error.hpp"
#include "srmks/kernels.hpp"
#include "srmks/oscillator.hpp"
#include "srmks/risk.hpp"
#include "srmks/smoother.hpp"
#include "srmks/srm.hpp"

namespace srmks {

inline constexpr std::uint64_t kReferenceSeed = 20230901;

struct ExperimentConfig {
  OscillatorParams params = OscillatorParams::reference();
  std::vector<SamplingPlan> plans = {reference_plan(16), reference_plan(8), reference_plan(4)};
  std::size_t repetitions = 100;
  std::uint64_t base_seed = kReferenceSeed;
  GridSettings grids;
  BoundConfig bound_config;

  void validate() const {
    detail::require(repetitions >= 1, "experiment: repetitions must be >= 1");
    detail::require(!plans.empty(), "experiment: no sampling plans");
    for (const auto& plan : plans) {
      plan.validate();
      detail::require(plan.sample_count() >= 2, "experiment: a plan leaves fewer than 2 samples");
    }
    bound_config.validate();
  }

  /// Noise seed of a repetition; independent of the plan and of execution order.
  std::uint64_t seed_for(std::size_t iteration) const { return base_seed + iteration; }
};

struct IterationRecord {
  std::size_t sample_size = 0;
  std::size_t iteration = 0;
  std::uint64_t seed = 0;
  KernelFamily family = KernelFamily::SE;
  KernelSpec chosen_spec;
  double emp_risk = 0.0;
  double bound = 0.0;
  double h = 0.0;
  /// MSE of the winner against the clean response over the dense base grid.
  double true_mse = 0.0;
};

inline constexpr KernelFamily kFamilies[] = {KernelFamily::SE, KernelFamily::SDOF};

inline StructureGrid default_grid(KernelFamily family, const TrainingSet& data, const GridSettings& s) {
  return family == KernelFamily::SE ? default_se_grid(data, s.se) : default_sdof_grid(data, s.sdof);
}

inline TrainingSet iteration_training_set(const ExperimentConfig& cfg, std::size_t plan_index,
                                          std::size_t iteration) {
  SamplingPlan plan = cfg.plans.at(plan_index);
  plan.seed = cfg.seed_for(iteration);
  return generate_training_set(cfg.params, plan);
}

inline double true_mse(const FittedSmoother& model, const OscillatorParams& params,
                       std::span<const double> dense) {
  double acc = 0.0;
  for (double t : dense) {
    const double r = predict(model, t) - impulse_response(params, t);
    acc += r * r;
  }
  return acc / static_cast<double>(dense.size());
}

namespace detail {

template <class E>
[[noreturn]] void rethrow_tagged(const E& e, const std::string& tag) {
  throw E(tag + ": " + e.what());
}

}  // namespace detail

/// The SE and SDOF records of one (plan, iteration) pair, in family order.
/// Depends only on cfg and the indices, so any iteration can be rerun alone.
inline std::vector<IterationRecord> run_iteration(const ExperimentConfig& cfg, std::size_t plan_index,
                                                  std::size_t iteration) {
  const TrainingSet data = iteration_training_set(cfg, plan_index, iteration);
  const std::vector<double> dense = cfg.plans[plan_index].base_grid();
  std::vector<IterationRecord> out;
  for (KernelFamily family : kFamilies) {
    const std::string tag = "n=" + std::to_string(data.size()) + " iteration=" + std::to_string(iteration) +
                            " family=" + std::string(to_string(family));
    try {
      const SelectionResult sel = srm_select(default_grid(family, data, cfg.grids), data, cfg.bound_config);
      out.push_back({data.size(), iteration, data.seed, family, sel.best_spec, sel.best_report.empirical_risk,
                     sel.best_report.bound, sel.best_report.h, true_mse(sel.model, cfg.params, dense)});
    } catch (const InvalidInput& e) {
      detail::rethrow_tagged(e, tag);
    } catch (const SingularSystem& e) {
      detail::rethrow_tagged(e, tag);
    }
  }
  return out;
}

/// SRMKS_THREADS if set to a positive integer, else hardware parallelism.
inline std::size_t default_thread_count() {
  if (const char* env = std::getenv("SRMKS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Records sorted by (n, iteration, family) whatever the thread count.
inline std::vector<IterationRecord> run_experiment(const ExperimentConfig& cfg, std::size_t threads = 0) {
  cfg.validate();
  const std::size_t units = cfg.plans.size() * cfg.repetitions;
  std::vector<std::vector<IterationRecord>> slots(units);
  std::vector<std::exception_ptr> errors(units);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t u = next++; u < units; u = next++) {
      try {
        slots[u] = run_iteration(cfg, u / cfg.repetitions, u % cfg.repetitions);
      } catch (...) {
        errors[u] = std::current_exception();
      }
    }
  };

  if (threads == 0) threads = default_thread_count();
  threads = std::min(threads, units);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<IterationRecord> records;
  records.reserve(units * std::size(kFamilies));
  for (auto& s : slots) {
    for (auto& r : s) records.push_back(std::move(r));
  }
  std::stable_sort(records.begin(), records.end(), [](const IterationRecord& a, const IterationRecord& b) {
    if (a.sample_size != b.sample_size) return a.sample_size < b.sample_size;
    if (a.iteration != b.iteration) return a.iteration < b.iteration;
    return a.family < b.family;
  });
  return records;
}

// ---------------------------------------------------------------------------
// Summaries

enum class Metric { BOUND, TRUE_MSE, H };

inline constexpr Metric kMetrics[] = {Metric::BOUND, Metric::TRUE_MSE, Metric::H};

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::BOUND: return "bound";
    case Metric::TRUE_MSE: return "true_mse";
    case Metric::H: return "h";
  }
  return "?";
}

inline double metric_value(const IterationRecord& r, Metric m) {
  switch (m) {
    case Metric::BOUND: return r.bound;
    case Metric::TRUE_MSE: return r.true_mse;
    case Metric::H: return r.h;
  }
  return 0.0;
}

/// Quantile by linear interpolation between order statistics: position
/// q (N - 1) in the sorted sample.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  detail::require(!sorted.empty(), "quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct BoxStats {
  double min = kInfinity;
  double q1 = kInfinity;
  double median = kInfinity;
  double q3 = kInfinity;
  double max = kInfinity;
  double mean = kInfinity;
  /// All values, infinite ones included.
  std::size_t count = 0;
  /// Infinite values, excluded from every statistic above.
  std::size_t infinite_count = 0;
};

inline BoxStats box_stats(std::vector<double> values) {
  BoxStats s;
  s.count = values.size();
  std::erase_if(values, [](double v) { return std::isinf(v); });
  s.infinite_count = s.count - values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.5);
  s.q3 = quantile_sorted(values, 0.75);
  double acc = 0.0;
  for (double v : values) acc += v;
  s.mean = acc / static_cast<double>(values.size());
  return s;
}

struct SummaryEntry {
  std::size_t n = 0;
  KernelFamily family = KernelFamily::SE;
  Metric metric = Metric::BOUND;
  BoxStats stats;
};

struct BoxplotSummary {
  std::vector<SummaryEntry> entries;

  const SummaryEntry* find(std::size_t n, KernelFamily family, Metric metric) const {
    for (const auto& e : entries) {
      if (e.n == n && e.family == family && e.metric == metric) return &e;
    }
    return nullptr;
  }

  const BoxStats& at(std::size_t n, KernelFamily family, Metric metric) const {
    const SummaryEntry* e = find(n, family, metric);
    if (!e) throw InvalidInput("summary has no entry for n=" + std::to_string(n));
    return e->stats;
  }

  std::vector<std::size_t> sample_sizes() const {
    std::vector<std::size_t> ns;
    for (const auto& e : entries) {
      if (std::find(ns.begin(), ns.end(), e.n) == ns.end()) ns.push_back(e.n);
    }
    return ns;
  }
};

/// One entry per (n, family, metric), ordered by n, then family, then metric.
inline BoxplotSummary summarize(std::span<const IterationRecord> records) {
  detail::require(!records.empty(), "summarize: no records");
  std::map<std::pair<std::size_t, KernelFamily>, std::vector<const IterationRecord*>> groups;
  for (const auto& r : records) groups[{r.sample_size, r.family}].push_back(&r);

  BoxplotSummary summary;
  for (const auto& [key, group] : groups) {
    for (Metric m : kMetrics) {
      std::vector<double> values;
      values.reserve(group.size());
      for (const IterationRecord* r : group) values.push_back(metric_value(*r, m));
      summary.entries.push_back({key.first, key.second, m, box_stats(std::move(values))});
    }
  }
  return summary;
}

struct CapacitySpread {
  KernelFamily family = KernelFamily::SDOF;
  /// (n, median h), n ascending.
  std::vector<std::pair<std::size_t, double>> median_h;
  /// (max - min) / min over the medians.
  double spread = 0.0;
};

inline CapacitySpread capacity_spread(std::span<const IterationRecord> records, KernelFamily family) {
  std::map<std::size_t, std::vector<double>> by_n;
  for (const auto& r : records) {
    if (r.family == family) by_n[r.sample_size].push_back(r.h);
  }
  if (by_n.size() < 2) {
    throw InvalidInput("capacity spread: need " + std::string(to_string(family)) +
                       " records for at least two sample sizes");
  }
  CapacitySpread out;
  out.family = family;
  for (auto& [n, hs] : by_n) {
    std::sort(hs.begin(), hs.end());
    out.median_h.emplace_back(n, quantile_sorted(hs, 0.5));
  }
  auto [lo, hi] = std::minmax_element(out.median_h.begin(), out.median_h.end(),
                                      [](const auto& a, const auto& b) { return a.second < b.second; });
  out.spread = lo->second > 0.0 ? (hi->second - lo->second) / lo->second
                                : (hi->second > 0.0 ? kInfinity : 0.0);
  return out;
}

/// How consistent the SDOF capacity estimate stays across sample sizes.
inline CapacitySpread sdof_edf_stability(std::span<const IterationRecord> records) {
  return capacity_spread(records, KernelFamily::SDOF);
}

/// |a - b| / min(a, b).
inline double relative_gap(double a, double b) {
  const double lo = std::min(a, b);
  return lo > 0.0 ? std::abs(a - b) / lo : kInfinity;
}

}  // namespace srmks
