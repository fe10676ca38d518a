#pragma once

// CSV and JSON forms of the library's records. Doubles go to CSV with 17
// significant digits and to JSON in nlohmann's shortest round-trip form;
// non-finite values are written as the strings "inf", "-inf" and "nan"
// in both.

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "srmks/error.hpp"
#include "srmks/experiment.hpp"
#include "srmks/kernels.hpp"
#include "srmks/oscillator.hpp"
#include "srmks/risk.hpp"
#include "srmks/srm.hpp"

namespace srmks::io {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Scalars

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(std::string_view s) {
  const std::string text(s);
  if (text == "inf") return kInfinity;
  if (text == "-inf") return -kInfinity;
  if (text == "nan") return std::nan("");
  if (text.empty()) throw ParseError("expected a number, got an empty field");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(text.c_str(), &end);
  // ERANGE on underflow still yields the correctly rounded subnormal.
  if (end != text.c_str() + text.size() || (errno == ERANGE && std::isinf(v))) {
    throw ParseError("expected a number, got '" + text + "'");
  }
  return v;
}

inline std::uint64_t parse_uint(std::string_view s) {
  const std::string text(s);
  if (text.empty() || text.front() == '-') throw ParseError("expected an unsigned integer, got '" + text + "'");
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (end != text.c_str() + text.size() || errno == ERANGE) {
    throw ParseError("expected an unsigned integer, got '" + text + "'");
  }
  return v;
}

inline Json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

inline double read_number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_double(j.get<std::string>());
  throw ParseError("expected a number, got " + j.dump());
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

inline Json parse_json(std::string_view text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

inline Json read_json_file(const std::filesystem::path& path) {
  return parse_json(read_text_file(path), path.string());
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// JSON helpers

namespace detail {

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline void reject_unknown(const Json& j, std::initializer_list<std::string_view> allowed, const char* what) {
  if (!j.is_object()) throw ParseError(std::string(what) + ": expected a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || item.key() == a;
    if (!known) throw ParseError(std::string(what) + ": unknown field '" + item.key() + "'");
  }
}

template <class T>
T get_as(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const Json::type_error& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

inline std::vector<double> number_array(const Json& j, const char* key) {
  const Json& a = field(j, key);
  if (!a.is_array()) throw ParseError(std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  out.reserve(a.size());
  for (const auto& v : a) out.push_back(read_number(v));
  return out;
}

inline Json array_of(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Oscillator

inline Json to_json(const OscillatorParams& p) { return {{"m", number(p.m())}, {"c", number(p.c())}, {"k", number(p.k())}}; }

inline OscillatorParams params_from_json(const Json& j) {
  detail::reject_unknown(j, {"m", "c", "k"}, "oscillator");
  return {read_number(detail::field(j, "m")), read_number(detail::field(j, "c")), read_number(detail::field(j, "k"))};
}

inline Json to_json(const SamplingPlan& p) {
  return {{"t_start", number(p.t_start)}, {"t_end", number(p.t_end)}, {"base_points", p.base_points},
          {"decimation", p.decimation},   {"snr", number(p.snr)},     {"seed", p.seed}};
}

inline SamplingPlan plan_from_json(const Json& j, const SamplingPlan& defaults = {}) {
  detail::reject_unknown(j, {"t_start", "t_end", "base_points", "decimation", "snr", "seed"}, "sampling plan");
  SamplingPlan p = defaults;
  if (j.contains("t_start")) p.t_start = read_number(j["t_start"]);
  if (j.contains("t_end")) p.t_end = read_number(j["t_end"]);
  if (j.contains("base_points")) p.base_points = detail::get_as<std::size_t>(j, "base_points");
  if (j.contains("decimation")) p.decimation = detail::get_as<std::size_t>(j, "decimation");
  if (j.contains("snr")) p.snr = read_number(j["snr"]);
  if (j.contains("seed")) p.seed = detail::get_as<std::uint64_t>(j, "seed");
  return p;
}

inline Json to_json(const TrainingSet& d) {
  return {{"n", d.size()},
          {"sigma_n", number(d.sigma_n)},
          {"seed", d.seed},
          {"plan", to_json(d.plan)},
          {"params", to_json(d.params)},
          {"t", detail::array_of(d.t)},
          {"y", detail::array_of(d.y)},
          {"true_h", detail::array_of(d.true_h)}};
}

inline TrainingSet training_set_from_json(const Json& j) {
  detail::reject_unknown(j, {"n", "sigma_n", "seed", "plan", "params", "t", "y", "true_h"}, "training set");
  TrainingSet d;
  d.sigma_n = read_number(detail::field(j, "sigma_n"));
  d.seed = detail::get_as<std::uint64_t>(j, "seed");
  d.plan = plan_from_json(detail::field(j, "plan"));
  d.params = params_from_json(detail::field(j, "params"));
  d.t = detail::number_array(j, "t");
  d.y = detail::number_array(j, "y");
  d.true_h = detail::number_array(j, "true_h");
  if (j.contains("n") && detail::get_as<std::size_t>(j, "n") != d.t.size()) {
    throw ParseError("training set: 'n' does not match the length of 't'");
  }
  try {
    d.validate();
  } catch (const InvalidInput& e) {
    throw ParseError(e.what());
  }
  return d;
}

inline std::string training_set_csv(const TrainingSet& d) {
  std::string out = "t,y,true_h\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    out += format_double(d.t[i]) + ',' + format_double(d.y[i]) + ',' + format_double(d.true_h[i]) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kernels

inline Json to_json(const KernelSpec& k) {
  if (k.family() == KernelFamily::SE) {
    return {{"family", "se"}, {"sigma_f", number(k.sigma_f())}, {"length_scale", number(k.length_scale())}};
  }
  const auto& p = k.oscillator();
  return {{"family", "sdof"}, {"sigma_f", number(k.sigma_f())}, {"m", number(p.m())}, {"c", number(p.c())},
          {"k", number(p.k())}};
}

inline KernelSpec kernel_from_json(const Json& j) {
  const auto family = family_from_string(detail::get_as<std::string>(j, "family"));
  const double sigma_f = read_number(detail::field(j, "sigma_f"));
  if (family == KernelFamily::SE) {
    detail::reject_unknown(j, {"family", "sigma_f", "length_scale"}, "SE kernel");
    return KernelSpec::se(sigma_f, read_number(detail::field(j, "length_scale")));
  }
  detail::reject_unknown(j, {"family", "sigma_f", "m", "c", "k"}, "SDOF kernel");
  return KernelSpec::sdof(sigma_f, OscillatorParams(read_number(detail::field(j, "m")),
                                                    read_number(detail::field(j, "c")),
                                                    read_number(detail::field(j, "k"))));
}

// ---------------------------------------------------------------------------
// Risk

inline Json to_json(const RiskReport& r) {
  return {{"emp_risk", number(r.empirical_risk)}, {"h", number(r.h)},         {"n", r.n},
          {"p", number(r.p)},                     {"delta", number(r.delta)}, {"bound", number(r.bound)},
          {"clipped", r.clipped},                 {"negative_eta", r.negative_eta}};
}

inline std::string_view to_string(DeltaRule rule) {
  return rule == DeltaRule::FIXED ? "fixed" : "four_over_sqrt_n";
}

inline Json to_json(const BoundConfig& c) {
  return {{"a1", number(c.a1)},
          {"a2", number(c.a2)},
          {"c", number(c.c)},
          {"delta", number(c.delta)},
          {"delta_rule", to_string(c.delta_rule)}};
}

inline BoundConfig bound_config_from_json(const Json& j) {
  detail::reject_unknown(j, {"a1", "a2", "c", "delta", "delta_rule"}, "bound config");
  BoundConfig c;
  if (j.contains("a1")) c.a1 = read_number(j["a1"]);
  if (j.contains("a2")) c.a2 = read_number(j["a2"]);
  if (j.contains("c")) c.c = read_number(j["c"]);
  if (j.contains("delta")) c.delta = read_number(j["delta"]);
  if (j.contains("delta_rule")) {
    const auto rule = detail::get_as<std::string>(j, "delta_rule");
    if (rule == "fixed") {
      c.delta_rule = DeltaRule::FIXED;
    } else if (rule == "four_over_sqrt_n") {
      c.delta_rule = DeltaRule::FOUR_OVER_SQRT_N;
    } else {
      throw ParseError("bound config: unknown delta_rule '" + rule + "'");
    }
  }
  return c;
}

inline constexpr std::string_view kReportHeader = "kernel,n,h,p,delta,emp_risk,bound,clipped";

inline std::string report_row(KernelFamily family, const RiskReport& r) {
  return std::string(to_string(family)) + ',' + std::to_string(r.n) + ',' + format_double(r.h) + ',' +
         format_double(r.p) + ',' + format_double(r.delta) + ',' + format_double(r.empirical_risk) + ',' +
         format_double(r.bound) + ',' + (r.clipped ? "true" : "false");
}

// ---------------------------------------------------------------------------
// SRM

inline constexpr std::string_view kTraceHeader =
    "kernel,n,h,p,delta,emp_risk,bound,clipped,sigma_f,length_scale,m,c,k";

inline std::string hyperparameter_fields(const KernelSpec& k) {
  if (k.family() == KernelFamily::SE) {
    return format_double(k.sigma_f()) + ',' + format_double(k.length_scale()) + ",,,";
  }
  const auto& p = k.oscillator();
  return format_double(k.sigma_f()) + ",," + format_double(p.m()) + ',' + format_double(p.c()) + ',' +
         format_double(p.k());
}

inline std::string trace_rows(const SelectionResult& s) {
  std::string out;
  for (const auto& c : s.trace) out += report_row(s.family, c.report) + ',' + hyperparameter_fields(c.spec) + '\n';
  return out;
}

inline std::string trace_csv(std::span<const SelectionResult> results) {
  std::string out = std::string(kTraceHeader) + '\n';
  for (const auto& s : results) out += trace_rows(s);
  return out;
}

inline Json to_json(const SelectionResult& s) {
  Json trace = Json::array();
  for (const auto& c : s.trace) trace.push_back({{"kernel", to_json(c.spec)}, {"report", to_json(c.report)}});
  return {{"family", to_string(s.family)},
          {"best_index", s.best_index},
          {"degenerate", s.degenerate},
          {"best_spec", to_json(s.best_spec)},
          {"best_report", to_json(s.best_report)},
          {"trace", std::move(trace)}};
}

inline Json to_json(const SeGridSettings& s) {
  Json j = {{"n_sigma", s.n_sigma}, {"n_l", s.n_l}, {"amp_lo", number(s.amp_lo)}, {"amp_hi", number(s.amp_hi)}};
  j["l_lo"] = s.l_lo ? number(*s.l_lo) : Json(nullptr);
  j["l_hi"] = s.l_hi ? number(*s.l_hi) : Json(nullptr);
  return j;
}

inline Json to_json(const SdofGridSettings& s) {
  return {{"n_sigma", s.n_sigma}, {"amp_lo", number(s.amp_lo)}, {"amp_hi", number(s.amp_hi)}};
}

inline Json to_json(const GridSettings& g) { return {{"se", to_json(g.se)}, {"sdof", to_json(g.sdof)}}; }

inline GridSettings grid_settings_from_json(const Json& j) {
  detail::reject_unknown(j, {"se", "sdof"}, "grids");
  GridSettings g;
  if (j.contains("se")) {
    const Json& s = j["se"];
    detail::reject_unknown(s, {"n_sigma", "n_l", "amp_lo", "amp_hi", "l_lo", "l_hi"}, "SE grid");
    if (s.contains("n_sigma")) g.se.n_sigma = detail::get_as<std::size_t>(s, "n_sigma");
    if (s.contains("n_l")) g.se.n_l = detail::get_as<std::size_t>(s, "n_l");
    if (s.contains("amp_lo")) g.se.amp_lo = read_number(s["amp_lo"]);
    if (s.contains("amp_hi")) g.se.amp_hi = read_number(s["amp_hi"]);
    if (s.contains("l_lo") && !s["l_lo"].is_null()) g.se.l_lo = read_number(s["l_lo"]);
    if (s.contains("l_hi") && !s["l_hi"].is_null()) g.se.l_hi = read_number(s["l_hi"]);
  }
  if (j.contains("sdof")) {
    const Json& s = j["sdof"];
    detail::reject_unknown(s, {"n_sigma", "amp_lo", "amp_hi"}, "SDOF grid");
    if (s.contains("n_sigma")) g.sdof.n_sigma = detail::get_as<std::size_t>(s, "n_sigma");
    if (s.contains("amp_lo")) g.sdof.amp_lo = read_number(s["amp_lo"]);
    if (s.contains("amp_hi")) g.sdof.amp_hi = read_number(s["amp_hi"]);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Experiment

inline Json to_json(const ExperimentConfig& c) {
  Json plans = Json::array();
  for (const auto& p : c.plans) {
    Json jp = to_json(p);
    jp.erase("seed");
    jp["n"] = p.sample_count();
    plans.push_back(std::move(jp));
  }
  return {{"params", to_json(c.params)}, {"plans", std::move(plans)},          {"repetitions", c.repetitions},
          {"base_seed", c.base_seed},    {"grids", to_json(c.grids)},          {"bound_config", to_json(c.bound_config)}};
}

/// Missing fields keep the reference configuration's values.
inline ExperimentConfig experiment_config_from_json(const Json& j) {
  detail::reject_unknown(j, {"params", "plans", "repetitions", "base_seed", "grids", "bound_config"},
                         "experiment config");
  ExperimentConfig c;
  try {
    if (j.contains("params")) c.params = params_from_json(j["params"]);
    if (j.contains("plans")) {
      if (!j["plans"].is_array()) throw ParseError("experiment config: 'plans' must be an array");
      c.plans.clear();
      for (Json p : j["plans"]) {
        if (p.is_object()) p.erase("n");
        c.plans.push_back(plan_from_json(p));
      }
    }
    if (j.contains("repetitions")) c.repetitions = detail::get_as<std::size_t>(j, "repetitions");
    if (j.contains("base_seed")) c.base_seed = detail::get_as<std::uint64_t>(j, "base_seed");
    if (j.contains("grids")) c.grids = grid_settings_from_json(j["grids"]);
    if (j.contains("bound_config")) c.bound_config = bound_config_from_json(j["bound_config"]);
  } catch (const InvalidInput& e) {
    throw ParseError(std::string("experiment config: ") + e.what());
  }
  return c;
}

inline constexpr std::string_view kRecordsHeader =
    "n,iteration,seed,family,sigma_f,length_scale,m,c,k,emp_risk,h,bound,true_mse";

inline std::string records_csv(std::span<const IterationRecord> records) {
  std::string out = std::string(kRecordsHeader) + '\n';
  for (const auto& r : records) {
    out += std::to_string(r.sample_size) + ',' + std::to_string(r.iteration) + ',' + std::to_string(r.seed) + ',' +
           std::string(to_string(r.family)) + ',' + hyperparameter_fields(r.chosen_spec) + ',' +
           format_double(r.emp_risk) + ',' + format_double(r.h) + ',' + format_double(r.bound) + ',' +
           format_double(r.true_mse) + '\n';
  }
  return out;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

/// Throws ParseError on a wrong header, a malformed row, or zero rows.
inline std::vector<IterationRecord> parse_records_csv(std::string_view text) {
  std::vector<IterationRecord> records;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError("records: empty file (0 records parsed)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordsHeader) throw ParseError("records: unexpected header '" + line + "'");

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 13) {
      throw ParseError("records line " + std::to_string(line_no) + ": expected 13 fields, got " +
                       std::to_string(f.size()));
    }
    try {
      const KernelFamily family = family_from_string(f[3]);
      const double sigma_f = parse_double(f[4]);
      const KernelSpec spec = family == KernelFamily::SE
                                  ? KernelSpec::se(sigma_f, parse_double(f[5]))
                                  : KernelSpec::sdof(sigma_f, OscillatorParams(parse_double(f[6]), parse_double(f[7]),
                                                                               parse_double(f[8])));
      records.push_back({static_cast<std::size_t>(parse_uint(f[0])), static_cast<std::size_t>(parse_uint(f[1])),
                         parse_uint(f[2]), family, spec, parse_double(f[9]), parse_double(f[11]),
                         parse_double(f[10]), parse_double(f[12])});
    } catch (const std::exception& e) {
      throw ParseError("records line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (records.empty()) throw ParseError("records: no data rows (0 records parsed)");
  return records;
}

inline Json to_json(const BoxStats& s) {
  return {{"min", number(s.min)},     {"q1", number(s.q1)},     {"median", number(s.median)},
          {"q3", number(s.q3)},       {"max", number(s.max)},   {"mean", number(s.mean)},
          {"count", s.count},         {"infinite_count", s.infinite_count}};
}

inline Json to_json(const BoxplotSummary& s) {
  Json entries = Json::array();
  for (const auto& e : s.entries) {
    Json j = {{"n", e.n}, {"family", to_string(e.family)}, {"metric", to_string(e.metric)}};
    const Json stats = to_json(e.stats);
    for (const auto& item : stats.items()) j[item.key()] = item.value();
    entries.push_back(std::move(j));
  }
  return {{"quantiles", "linear interpolation between order statistics, position q*(N-1)"},
          {"entries", std::move(entries)}};
}

inline Json to_json(const CapacitySpread& c) {
  Json medians = Json::array();
  for (const auto& [n, h] : c.median_h) medians.push_back({{"n", n}, {"median_h", number(h)}});
  return {{"family", to_string(c.family)}, {"median_h", std::move(medians)}, {"spread", number(c.spread)}};
}

}  // namespace srmks::io
