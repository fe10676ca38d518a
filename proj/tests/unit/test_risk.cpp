#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "srmks/risk.hpp"
#include "support/oracles.hpp"

namespace {

using srmks::BoundConfig;
using srmks::DeltaRule;

TEST(EmpiricalRisk, Examples) {
  const std::vector<double> a{1.0, 2.0, 3.0};
  EXPECT_EQ(srmks::empirical_risk(a, a), 0.0);
  EXPECT_EQ(srmks::empirical_risk(std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 0.0}), 1.0);
}

TEST(EmpiricalRisk, MatchesSummationOracle) {
  std::mt19937_64 gen(31);
  std::normal_distribution<double> dist(0.0, 3.0);
  std::vector<double> y(7), f(7);
  for (int i = 0; i < 7; ++i) {
    y[i] = dist(gen);
    f[i] = dist(gen);
  }
  EXPECT_LT(oracle::rel_diff(srmks::empirical_risk(y, f), oracle::mean_squared_residual(y, f)), 1e-12);
}

TEST(EmpiricalRisk, RejectsMismatchedLengths) {
  EXPECT_THROW(srmks::empirical_risk(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), srmks::InvalidInput);
  EXPECT_THROW(srmks::empirical_risk(std::vector<double>{}, std::vector<double>{}), srmks::InvalidInput);
}

TEST(ReducedBound, FullCapacityIsClipped) {
  for (std::size_t n : {10u, 63u, 1000u}) {
    const auto r = srmks::vc_bound_reduced(1.0, static_cast<double>(n), n);
    EXPECT_TRUE(r.clipped);
    EXPECT_TRUE(std::isinf(r.bound));
    EXPECT_EQ(r.p, 1.0);
  }
}

TEST(ReducedBound, ZeroCapacityApproachesRisk) {
  double previous = srmks::kInfinity;
  for (std::size_t n : {100u, 10000u, 1000000u, 100000000u}) {
    const auto r = srmks::vc_bound_reduced(2.0, 0.0, n);
    EXPECT_FALSE(r.clipped);
    EXPECT_LT(r.bound, previous);
    previous = r.bound;
  }
  EXPECT_NEAR(previous, 2.0, 2e-3);
}

TEST(ReducedBound, RegressionConstant) {
  // 1 / (1 - sqrt(0.1 + 0.1 ln 10 + ln(100) / 200)), evaluated offline.
  const auto r = srmks::vc_bound_reduced(1.0, 10.0, 100);
  EXPECT_NEAR(r.bound, 2.465345183774974, 1e-13);
  EXPECT_DOUBLE_EQ(r.p, 0.1);
  EXPECT_DOUBLE_EQ(r.delta, 0.4);
  EXPECT_FALSE(r.clipped);
  EXPECT_FALSE(r.negative_eta);
}

TEST(ReducedBound, RejectsInvalidArguments) {
  EXPECT_THROW(srmks::vc_bound_reduced(1.0, 1.0, 0), srmks::InvalidInput);
  EXPECT_THROW(srmks::vc_bound_reduced(1.0, -1.0, 10), srmks::InvalidInput);
  EXPECT_THROW(srmks::vc_bound_reduced(-1.0, 1.0, 10), srmks::InvalidInput);
}

TEST(ReducedBound, CapacityAboveSampleSizeIsClipped) {
  const auto r = srmks::vc_bound_reduced(1.0, 2.5 * 63, 63);
  EXPECT_TRUE(r.clipped);
  EXPECT_TRUE(std::isinf(r.bound));
}

TEST(GeneralBound, ZeroCapacityEta) {
  BoundConfig cfg;
  cfg.c = 0.5;
  for (std::size_t n : {20u, 63u, 500u}) {
    const double nd = static_cast<double>(n);
    const double eta = std::log(nd) / (2.0 * nd);
    const auto r = srmks::vc_bound_general(3.0, 0.0, n, cfg);
    EXPECT_NEAR(r.bound, 3.0 / (1.0 - 0.5 * std::sqrt(eta)), 1e-12);
  }
}

TEST(GeneralBound, VanishingConfidenceFactor) {
  BoundConfig cfg;
  for (double c : {1e-2, 1e-4, 1e-8}) {
    cfg.c = c;
    EXPECT_NEAR(srmks::vc_bound_general(0.7, 20.0, 100, cfg).bound, 0.7, 0.7 * 10 * c);
  }
}

TEST(GeneralBound, CrossCheckAgainstReduced) {
  const auto general = srmks::vc_bound_general(1.0, 10.0, 100, BoundConfig{});
  const auto reduced = srmks::vc_bound_reduced(1.0, 10.0, 100);
  EXPECT_LT(oracle::rel_diff(general.bound, reduced.bound), 1e-10);
}

TEST(GeneralBound, AgreesWithReducedOnRandomInputs) {
  std::mt19937_64 gen(32);
  std::uniform_int_distribution<std::size_t> size(2, 5000);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int finite = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = size(gen);
    const double h = unit(gen) * static_cast<double>(n);
    const double mse = std::pow(10.0, -8.0 + 8.0 * unit(gen));
    const auto g = srmks::vc_bound_general(mse, h, n, BoundConfig{});
    const auto r = srmks::vc_bound_reduced(mse, h, n);
    ASSERT_EQ(g.clipped, r.clipped) << "n=" << n << " h=" << h;
    if (!r.clipped) {
      ++finite;
      EXPECT_LT(oracle::rel_diff(g.bound, r.bound), 1e-10) << "n=" << n << " h=" << h;
    }
  }
  EXPECT_GT(finite, 20);
}

TEST(GuaranteedRisk, DispatchesOnConfiguration) {
  const auto reduced = srmks::guaranteed_risk(1.0, 10.0, 100, BoundConfig{});
  EXPECT_EQ(reduced.bound, srmks::vc_bound_reduced(1.0, 10.0, 100).bound);
  BoundConfig cfg;
  cfg.a1 = 2.0;
  EXPECT_EQ(srmks::guaranteed_risk(1.0, 10.0, 100, cfg).bound, srmks::vc_bound_general(1.0, 10.0, 100, cfg).bound);
}

TEST(RealizedConfidence, ReferenceSampleSizes) {
  EXPECT_NEAR(srmks::realized_confidence(63), 1.0 - 4.0 / std::sqrt(63.0), 1e-15);
  EXPECT_NEAR(srmks::realized_confidence(63), 0.496, 5e-4);
  EXPECT_NEAR(srmks::realized_confidence(126), 0.644, 5e-4);
  EXPECT_NEAR(srmks::realized_confidence(251), 0.748, 5e-4);
  EXPECT_GT(srmks::realized_confidence(17), 0.0);
}

TEST(RealizedConfidence, UndefinedAtSixteen) {
  EXPECT_THROW(srmks::realized_confidence(16), srmks::InvalidInput);
  EXPECT_THROW(srmks::realized_confidence(1), srmks::InvalidInput);
}

TEST(BoundProperties, MonotoneInCapacityWithSingleBlowUp) {
  for (std::size_t n : {63u, 126u, 251u, 1000u}) {
    double previous = 0.0;
    int transitions = 0;
    bool was_infinite = false;
    for (int i = 0; i <= 2000; ++i) {
      const double h = static_cast<double>(n) * i / 2000.0;
      const auto r = srmks::vc_bound_reduced(1e-3, h, n);
      if (r.clipped) {
        if (!was_infinite) ++transitions;
        was_infinite = true;
        continue;
      }
      EXPECT_FALSE(was_infinite) << "finite again after blow-up, n=" << n << " h=" << h;
      EXPECT_GE(r.bound, previous);
      previous = r.bound;
    }
    EXPECT_EQ(transitions, 1) << n;
  }
}

TEST(BoundProperties, FiniteBoundDominatesRisk) {
  std::mt19937_64 gen(33);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(unit(gen) * 500);
    const double mse = unit(gen);
    const auto r = srmks::vc_bound_reduced(mse, unit(gen) * n, n);
    if (!r.clipped) {
      EXPECT_GE(r.bound, mse);
    }
  }
}

TEST(BoundProperties, ClipsExactlyAtThreshold) {
  // Scan capacities around the blow-up point and compare the clipping flag
  // against the denominator recomputed independently.
  for (std::size_t n : {63u, 126u, 251u}) {
    const double nd = static_cast<double>(n);
    for (int i = 0; i <= 20000; ++i) {
      const double h = nd * (0.3 + 0.7 * i / 20000.0);
      const double p = h / nd;
      const double g = p - p * std::log(p) + std::log(nd) / (2.0 * nd);
      const double denominator = 1.0 - std::sqrt(g);
      const auto r = srmks::vc_bound_reduced(1.0, h, n);
      EXPECT_EQ(r.clipped, denominator <= srmks::kClipEpsilon) << "n=" << n << " h=" << h;
    }
  }
}

TEST(BoundProperties, ClipFlagFollowsEpsilonNotZero) {
  // Denominators in (0, 1e-12] still clip.
  srmks::RiskReport r;
  r.empirical_risk = 1.0;
  srmks::detail::finish(r, 5e-13);
  EXPECT_TRUE(r.clipped);
  srmks::detail::finish(r, 2e-12);
  EXPECT_FALSE(r.clipped);
  EXPECT_EQ(r.bound, 5e11);
}

TEST(BoundConfig, FixedDeltaRule) {
  BoundConfig cfg;
  cfg.delta_rule = DeltaRule::FIXED;
  cfg.delta = 0.05;
  EXPECT_FALSE(cfg.is_reduced_form());
  const auto r = srmks::vc_bound_general(1.0, 5.0, 100, cfg);
  EXPECT_EQ(r.delta, 0.05);
  const double eta = (5.0 * (std::log(100.0 / 5.0) + 1.0) - std::log(0.05 / 4.0)) / 100.0;
  EXPECT_NEAR(r.bound, 1.0 / (1.0 - std::sqrt(eta)), 1e-12);
}

TEST(BoundConfig, NegativeEtaIsFlagged) {
  // h > n drives h [ln(n / h) + 1] below -ln(delta / 4).
  const auto r = srmks::vc_bound_general(1.0, 100.0, 10, BoundConfig{});
  EXPECT_TRUE(r.negative_eta);
  EXPECT_TRUE(std::isinf(r.bound));
}

TEST(BoundConfig, RejectsInvalidConstants) {
  BoundConfig cfg;
  cfg.a1 = 0.0;
  EXPECT_THROW(cfg.validate(), srmks::InvalidInput);
  cfg = {};
  cfg.delta_rule = DeltaRule::FIXED;
  cfg.delta = 0.0;
  EXPECT_THROW(cfg.validate(), srmks::InvalidInput);
}

}  // namespace
