#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "srmks/svg.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace {

using srmks::IterationRecord;
using srmks::KernelFamily;

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++count;
  return count;
}

/// class attribute -> y coordinates of that polyline.
std::map<std::string, std::vector<double>> polylines(const std::string& svg) {
  std::map<std::string, std::vector<double>> out;
  const std::regex re(R"re(<polyline class="(\w+)"[^>]*points="([^"]*)")re");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    std::istringstream pts((*it)[2].str());
    std::string pair;
    auto& ys = out[(*it)[1].str()];
    while (pts >> pair) ys.push_back(std::stod(pair.substr(pair.find(',') + 1)));
  }
  return out;
}

std::vector<IterationRecord> reference_records_n251() {
  return srmks::run_iteration(srmks::ExperimentConfig{}, 2, 0);
}

TEST(Boxplot, OneBoxPerMetricForSingleRecord) {
  const std::vector<IterationRecord> records{
      {63, 0, 1, KernelFamily::SE, srmks::KernelSpec::se(1.0, 0.1), 1e-9, 2e-8, 10.0, 3e-9}};
  const auto svg = srmks::svg::boxplot(records);
  EXPECT_EQ(count_of(svg, "<g class=\"box\""), 3u);
  for (const char* m : {"bound", "true_mse", "h"}) {
    EXPECT_EQ(count_of(svg, std::string("data-metric=\"") + m + "\""), 1u) << m;
  }
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Boxplot, DeterministicAndComplete) {
  const auto records = srmks::run_experiment(fixtures::small_config(), 1);
  const auto a = srmks::svg::boxplot(records);
  EXPECT_EQ(a, srmks::svg::boxplot(records));
  EXPECT_EQ(count_of(a, "<g class=\"box\""), 3u * 2u * 2u);
  EXPECT_EQ(count_of(srmks::svg::complexity(records), "<g class=\"box\""), 2u * 2u);
}

TEST(Boxplot, InfiniteValuesAreAnnotated) {
  const std::vector<IterationRecord> records{
      {63, 0, 1, KernelFamily::SE, srmks::KernelSpec::se(1.0, 0.1), 1e-9, srmks::kInfinity, 63.0, 3e-9}};
  EXPECT_NE(srmks::svg::boxplot(records).find("inf x1"), std::string::npos);
}

TEST(Predictions, BothSmoothersTrackResponseAtLargestSampleSize) {
  const auto records = reference_records_n251();
  const auto panels = srmks::svg::prediction_panels(records, srmks::ExperimentConfig{}, 0);
  ASSERT_EQ(panels.size(), 1u);
  const auto& p = panels[0];
  ASSERT_EQ(p.n, 251u);
  // Both reconstructions beat the raw observations: error below the noise variance.
  const double noise_var = p.data.sigma_n * p.data.sigma_n;
  EXPECT_LT(oracle::mean_squared_residual(p.se, p.truth), noise_var);
  EXPECT_LT(oracle::mean_squared_residual(p.sdof, p.truth), noise_var);
  for (const auto& r : records) {
    const auto& curve = r.family == KernelFamily::SE ? p.se : p.sdof;
    EXPECT_NEAR(oracle::mean_squared_residual(curve, p.truth), r.true_mse, 1e-6 * r.true_mse);
  }
}

TEST(Predictions, MatchesGoldenPolylines) {
  const auto records = reference_records_n251();
  const auto panels = srmks::svg::prediction_panels(records, srmks::ExperimentConfig{}, 0);
  const auto svg = srmks::svg::predictions(panels);
  EXPECT_EQ(svg, srmks::svg::predictions(panels));

  const auto fresh = polylines(svg);
  const auto stored = polylines(fixtures::golden("golden_predictions_n251.svg", svg));
  for (const char* cls : {"true", "se", "sdof"}) {
    ASSERT_EQ(fresh.count(cls), 1u) << cls;
    ASSERT_EQ(stored.count(cls), 1u) << cls;
    const auto& a = fresh.at(cls);
    const auto& b = stored.at(cls);
    ASSERT_EQ(a.size(), 1001u);
    ASSERT_EQ(a.size(), b.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    // Within one pixel of the stored rendering.
    EXPECT_LE(worst, 1.0) << cls;
  }
  EXPECT_EQ(count_of(svg, "<circle"), 251u);
}

TEST(Predictions, MissingIterationIsAnError) {
  const auto records = reference_records_n251();
  EXPECT_THROW(srmks::svg::prediction_panels(records, srmks::ExperimentConfig{}, 5), srmks::InvalidInput);
}

}  // namespace
