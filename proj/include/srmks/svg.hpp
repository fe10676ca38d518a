#pragma once

// Self-contained SVG charts of experiment output. Coordinates are printed
// with two decimals so identical input gives identical bytes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "srmks/error.hpp"
#include "srmks/experiment.hpp"
#include "srmks/kernels.hpp"
#include "srmks/oscillator.hpp"
#include "srmks/smoother.hpp"

namespace srmks::svg {

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline std::string_view colour(KernelFamily f) { return f == KernelFamily::SE ? "#d95f02" : "#1b9e77"; }

class Document {
 public:
  Document(double width, double height) : width_(width), height_(height) {}

  void raw(std::string_view s) { body_ += s; }

  void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0) {
    body_ += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) + "\" y2=\"" + fmt(y2) +
             "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + fmt(width) + "\"/>\n";
  }

  void rect(double x, double y, double w, double h, std::string_view fill, std::string_view stroke) {
    body_ += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(w) + "\" height=\"" + fmt(h) +
             "\" fill=\"" + std::string(fill) + "\" stroke=\"" + std::string(stroke) + "\"/>\n";
  }

  void text(double x, double y, std::string_view s, std::string_view anchor = "middle", double size = 12.0) {
    body_ += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-size=\"" + fmt(size) +
             "\" font-family=\"sans-serif\" text-anchor=\"" + std::string(anchor) + "\">" + std::string(s) +
             "</text>\n";
  }

  void circle(double x, double y, double r, std::string_view fill) {
    body_ += "<circle cx=\"" + fmt(x) + "\" cy=\"" + fmt(y) + "\" r=\"" + fmt(r) + "\" fill=\"" +
             std::string(fill) + "\"/>\n";
  }

  void polyline(std::span<const std::pair<double, double>> pts, std::string_view cls, std::string_view stroke,
                std::string_view extra_attrs = "") {
    body_ += "<polyline class=\"" + std::string(cls) + "\" " + std::string(extra_attrs) + " fill=\"none\" stroke=\"" +
             std::string(stroke) + "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) body_ += ' ';
      body_ += fmt(pts[i].first) + ',' + fmt(pts[i].second);
    }
    body_ += "\"/>\n";
  }

  std::string str() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width_) + "\" height=\"" + fmt(height_) +
           "\" viewBox=\"0 0 " + fmt(width_) + ' ' + fmt(height_) + "\">\n<rect width=\"100%\" height=\"100%\" "
           "fill=\"white\"/>\n" + body_ + "</svg>\n";
  }

 private:
  double width_;
  double height_;
  std::string body_;
};

/// Maps data values to a vertical pixel range, linear or log10.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;
  double top = 0.0;
  double bottom = 1.0;

  double map(double v) const {
    const double a = log ? std::log10(lo) : lo;
    const double b = log ? std::log10(hi) : hi;
    const double x = log ? std::log10(v) : v;
    const double frac = b > a ? (x - a) / (b - a) : 0.5;
    return bottom - frac * (bottom - top);
  }
};

inline Axis fit_axis(std::vector<double> values, bool log, double top, double bottom) {
  std::erase_if(values, [log](double v) { return !std::isfinite(v) || (log && v <= 0.0); });
  Axis axis{0.0, 1.0, log, top, bottom};
  if (values.empty()) {
    if (log) axis = {0.1, 10.0, true, top, bottom};
    return axis;
  }
  auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  double lo = *mn;
  double hi = *mx;
  if (log) {
    lo = std::pow(10.0, std::floor(std::log10(lo)));
    hi = std::pow(10.0, std::ceil(std::log10(hi)));
    if (hi <= lo) hi = lo * 10.0;
  } else {
    const double pad = hi > lo ? 0.05 * (hi - lo) : (std::abs(hi) > 0 ? 0.1 * std::abs(hi) : 1.0);
    lo -= pad;
    hi += pad;
  }
  axis.lo = lo;
  axis.hi = hi;
  return axis;
}

inline void draw_y_axis(Document& doc, const Axis& axis, double x, double right, std::string_view label) {
  doc.line(x, axis.top, x, axis.bottom, "black");
  std::vector<double> ticks;
  if (axis.log) {
    for (double d = std::log10(axis.lo); d <= std::log10(axis.hi) + 1e-9; d += 1.0) ticks.push_back(std::pow(10.0, d));
  } else {
    for (int i = 0; i <= 4; ++i) ticks.push_back(axis.lo + (axis.hi - axis.lo) * i / 4.0);
  }
  for (double t : ticks) {
    const double y = axis.map(t);
    doc.line(x - 4, y, x, y, "black");
    doc.line(x, y, right, y, "#e0e0e0", 0.5);
    doc.text(x - 6, y + 4, sci(t), "end", 10.0);
  }
  doc.text(x - 48, (axis.top + axis.bottom) / 2.0, label, "middle", 11.0);
}

struct Group {
  std::size_t n;
  KernelFamily family;
};

inline std::vector<Group> groups_of(std::span<const IterationRecord> records) {
  std::vector<Group> out;
  std::map<std::pair<std::size_t, KernelFamily>, bool> seen;
  for (const auto& r : records) seen[{r.sample_size, r.family}] = true;
  for (const auto& [key, unused] : seen) out.push_back({key.first, key.second});
  return out;
}

inline void box_panel(Document& doc, std::span<const IterationRecord> records, const BoxplotSummary& summary,
                      Metric metric, double top, double left, double width, double height, bool log) {
  const auto groups = groups_of(records);
  std::vector<double> all;
  for (const auto& r : records) all.push_back(metric_value(r, metric));
  const Axis axis = fit_axis(all, log, top + 20.0, top + height - 30.0);

  doc.text(left + width / 2.0, top + 12.0, std::string(to_string(metric)) + (log ? " (log scale)" : ""), "middle", 13.0);
  draw_y_axis(doc, axis, left, left + width, std::string(to_string(metric)));
  doc.line(left, axis.bottom, left + width, axis.bottom, "black");

  const double slot = width / static_cast<double>(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& grp = groups[g];
    const BoxStats& s = summary.at(grp.n, grp.family, metric);
    const double cx = left + slot * (static_cast<double>(g) + 0.5);
    const double half = std::min(20.0, slot * 0.3);
    const auto col = colour(grp.family);
    doc.raw("<g class=\"box\" data-metric=\"" + std::string(to_string(metric)) + "\" data-n=\"" +
            std::to_string(grp.n) + "\" data-family=\"" + std::string(to_string(grp.family)) + "\">\n");
    if (s.count > s.infinite_count) {
      doc.line(cx, axis.map(s.min), cx, axis.map(s.q1), col);
      doc.line(cx, axis.map(s.q3), cx, axis.map(s.max), col);
      doc.line(cx - half / 2, axis.map(s.min), cx + half / 2, axis.map(s.min), col);
      doc.line(cx - half / 2, axis.map(s.max), cx + half / 2, axis.map(s.max), col);
      const double y3 = axis.map(s.q3);
      const double y1 = axis.map(s.q1);
      doc.rect(cx - half, std::min(y1, y3), 2 * half, std::max(1.0, std::abs(y1 - y3)), "white", col);
      doc.line(cx - half, axis.map(s.median), cx + half, axis.map(s.median), col, 2.0);
    }
    if (s.infinite_count > 0) doc.text(cx, axis.top - 4.0, "inf x" + std::to_string(s.infinite_count), "middle", 9.0);
    doc.raw("</g>\n");
    doc.text(cx, axis.bottom + 14.0, std::string(to_string(grp.family)), "middle", 10.0);
    doc.text(cx, axis.bottom + 26.0, "n=" + std::to_string(grp.n), "middle", 10.0);
  }
}

}  // namespace detail

/// Guaranteed risk, prediction error and capacity, one box per (n, family).
inline std::string boxplot(std::span<const IterationRecord> records) {
  const BoxplotSummary summary = summarize(records);
  constexpr double kWidth = 900.0;
  constexpr double kPanel = 260.0;
  detail::Document doc(kWidth, 3 * kPanel + 20.0);
  const Metric metrics[] = {Metric::BOUND, Metric::TRUE_MSE, Metric::H};
  for (std::size_t i = 0; i < 3; ++i) {
    detail::box_panel(doc, records, summary, metrics[i], 10.0 + kPanel * static_cast<double>(i), 90.0, kWidth - 120.0,
                      kPanel, metrics[i] != Metric::H);
  }
  return doc.str();
}

/// Estimated capacity h per (n, family).
inline std::string complexity(std::span<const IterationRecord> records) {
  const BoxplotSummary summary = summarize(records);
  detail::Document doc(900.0, 300.0);
  detail::box_panel(doc, records, summary, Metric::H, 10.0, 90.0, 780.0, 280.0, false);
  return doc.str();
}

struct PredictionPanel {
  std::size_t n = 0;
  std::size_t iteration = 0;
  TrainingSet data;
  std::vector<double> grid;
  std::vector<double> truth;
  std::vector<double> se;
  std::vector<double> sdof;
};

/// Regenerates the training set of `iteration` for every plan, refits both
/// recorded winners and samples them on the plan's base grid.
inline std::vector<PredictionPanel> prediction_panels(std::span<const IterationRecord> records,
                                                      const ExperimentConfig& cfg, std::size_t iteration) {
  std::vector<PredictionPanel> panels;
  for (std::size_t p = 0; p < cfg.plans.size(); ++p) {
    PredictionPanel panel;
    panel.iteration = iteration;
    panel.data = iteration_training_set(cfg, p, iteration);
    panel.n = panel.data.size();
    const IterationRecord* chosen[2] = {nullptr, nullptr};
    for (const auto& r : records) {
      if (r.sample_size == panel.n && r.iteration == iteration) chosen[r.family == KernelFamily::SE ? 0 : 1] = &r;
    }
    if (!chosen[0] || !chosen[1]) continue;
    panel.grid = cfg.plans[p].base_grid();
    for (double t : panel.grid) panel.truth.push_back(impulse_response(cfg.params, t));
    panel.se = predict(fit(chosen[0]->chosen_spec, panel.data, panel.data.sigma_n), panel.grid);
    panel.sdof = predict(fit(chosen[1]->chosen_spec, panel.data, panel.data.sigma_n), panel.grid);
    panels.push_back(std::move(panel));
  }
  if (panels.empty()) {
    throw InvalidInput("predictions: records hold no SE/SDOF pair for iteration " + std::to_string(iteration));
  }
  return panels;
}

/// True signal, both smoothers and the training scatter, one panel per n.
inline std::string predictions(std::span<const PredictionPanel> panels) {
  constexpr double kWidth = 900.0;
  constexpr double kPanel = 260.0;
  constexpr double kLeft = 90.0;
  const double plot_w = kWidth - kLeft - 30.0;
  detail::Document doc(kWidth, kPanel * static_cast<double>(panels.size()) + 20.0);
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const auto& pn = panels[i];
    const double top = 10.0 + kPanel * static_cast<double>(i);
    std::vector<double> ys(pn.truth);
    ys.insert(ys.end(), pn.data.y.begin(), pn.data.y.end());
    const detail::Axis axis = detail::fit_axis(ys, false, top + 20.0, top + kPanel - 30.0);
    const double t0 = pn.grid.front();
    const double t1 = pn.grid.back();
    auto x_of = [&](double t) { return kLeft + (t - t0) / (t1 - t0) * plot_w; };

    doc.text(kLeft + plot_w / 2.0, top + 12.0,
             "n=" + std::to_string(pn.n) + ", iteration " + std::to_string(pn.iteration), "middle", 13.0);
    detail::draw_y_axis(doc, axis, kLeft, kLeft + plot_w, "response");
    doc.line(kLeft, axis.bottom, kLeft + plot_w, axis.bottom, "black");
    for (int k = 0; k <= 5; ++k) {
      const double t = t0 + (t1 - t0) * k / 5.0;
      doc.text(x_of(t), axis.bottom + 14.0, detail::sci(t), "middle", 10.0);
    }

    auto curve = [&](const std::vector<double>& v) {
      std::vector<std::pair<double, double>> pts;
      pts.reserve(v.size());
      for (std::size_t k = 0; k < v.size(); ++k) pts.emplace_back(x_of(pn.grid[k]), axis.map(v[k]));
      return pts;
    };
    const std::string attrs = "data-n=\"" + std::to_string(pn.n) + "\"";
    doc.raw("<g class=\"training\" " + attrs + ">\n");
    for (std::size_t k = 0; k < pn.data.size(); ++k) doc.circle(x_of(pn.data.t[k]), axis.map(pn.data.y[k]), 1.8, "#7570b3");
    doc.raw("</g>\n");
    doc.polyline(curve(pn.truth), "true", "black", attrs);
    doc.polyline(curve(pn.se), "se", detail::colour(KernelFamily::SE), attrs);
    doc.polyline(curve(pn.sdof), "sdof", detail::colour(KernelFamily::SDOF), attrs);
  }
  doc.text(kWidth - 40.0, 24.0, "black: true, orange: SE, green: SDOF, dots: training", "end", 10.0);
  return doc.str();
}

}  // namespace srmks::svg
