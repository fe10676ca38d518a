#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "srmks/oscillator.hpp"
#include "srmks/rng.hpp"
#include "support/oracles.hpp"

namespace {

using srmks::OscillatorParams;

TEST(Oscillator, ReferenceModalQuantities) {
  const auto p = OscillatorParams::reference();
  EXPECT_DOUBLE_EQ(p.omega_n(), 1000.0);
  EXPECT_DOUBLE_EQ(p.zeta(), 0.01);
  EXPECT_DOUBLE_EQ(p.omega_d(), 1000.0 * std::sqrt(1.0 - 1e-4));
}

TEST(Oscillator, ResponseStartsAtZero) {
  EXPECT_EQ(srmks::impulse_response(OscillatorParams::reference(), 0.0), 0.0);
}

TEST(Oscillator, MatchesRk4AtOneMillisecond) {
  const auto p = OscillatorParams::reference();
  const double expected = oracle::rk4_impulse(1.0, 20.0, 1e6, {0.001})[0];
  EXPECT_LT(oracle::rel_diff(srmks::impulse_response(p, 0.001), expected), 1e-8);
}

TEST(Oscillator, MatchesRk4OnRandomTimes) {
  const auto p = OscillatorParams::reference();
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> dist(0.0, 0.3);
  std::vector<double> times(1000);
  for (double& t : times) t = dist(gen);
  const auto expected = oracle::rk4_impulse(p.m(), p.c(), p.k(), times);
  double worst = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    worst = std::max(worst, oracle::rel_diff(srmks::impulse_response(p, times[i]), expected[i]));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Oscillator, MatchesRk4ForOtherCoefficients) {
  const OscillatorParams p(2.0, 3.0, 500.0);
  const std::vector<double> times{0.01, 0.1, 0.37, 1.2};
  const auto expected = oracle::rk4_impulse(2.0, 3.0, 500.0, times, 1e-5);
  for (std::size_t i = 0; i < times.size(); ++i) {
    EXPECT_LT(oracle::rel_diff(srmks::impulse_response(p, times[i]), expected[i]), 1e-8) << times[i];
  }
}

TEST(Oscillator, StaysInsideExponentialEnvelope) {
  const auto p = OscillatorParams::reference();
  for (int i = 0; i <= 5000; ++i) {
    const double t = 0.3 * i / 5000.0;
    const double envelope = std::exp(-p.zeta() * p.omega_n() * t) / (p.m() * p.omega_d());
    EXPECT_LE(std::abs(srmks::impulse_response(p, t)), envelope * (1.0 + 1e-15)) << t;
  }
}

TEST(Oscillator, RejectsInvalidCoefficients) {
  EXPECT_THROW(OscillatorParams(0.0, 20.0, 1e6), srmks::InvalidInput);
  EXPECT_THROW(OscillatorParams(1.0, -1.0, 1e6), srmks::InvalidInput);
  EXPECT_THROW(OscillatorParams(1.0, 20.0, 0.0), srmks::InvalidInput);
  // critically damped and overdamped
  EXPECT_THROW(OscillatorParams(1.0, 2000.0, 1e6), srmks::InvalidInput);
  EXPECT_THROW(OscillatorParams(1.0, 5000.0, 1e6), srmks::InvalidInput);
  EXPECT_THROW(OscillatorParams(1.0, std::nan(""), 1e6), srmks::InvalidInput);
}

TEST(Oscillator, RejectsInvalidTimes) {
  const auto p = OscillatorParams::reference();
  EXPECT_THROW(srmks::impulse_response(p, std::numeric_limits<double>::infinity()), srmks::InvalidInput);
  EXPECT_THROW(srmks::impulse_response(p, std::nan("")), srmks::InvalidInput);
  EXPECT_THROW(srmks::impulse_response(p, -0.1), srmks::InvalidInput);
}

TEST(SamplingPlan, ReferenceSampleSizes) {
  EXPECT_EQ(srmks::reference_plan(16).sample_count(), 63u);
  EXPECT_EQ(srmks::reference_plan(8).sample_count(), 126u);
  EXPECT_EQ(srmks::reference_plan(4).sample_count(), 251u);
  const auto p = OscillatorParams::reference();
  EXPECT_EQ(srmks::generate_training_set(p, srmks::reference_plan(16)).size(), 63u);
  EXPECT_EQ(srmks::generate_training_set(p, srmks::reference_plan(8)).size(), 126u);
  EXPECT_EQ(srmks::generate_training_set(p, srmks::reference_plan(4)).size(), 251u);
}

TEST(SamplingPlan, BaseGridEndpoints) {
  const auto grid = srmks::reference_plan(1).base_grid();
  ASSERT_EQ(grid.size(), 1001u);
  EXPECT_EQ(grid.front(), 0.0);
  EXPECT_EQ(grid.back(), 0.3);
}

TEST(SamplingPlan, FirstSampleIsStartTime) {
  const auto p = OscillatorParams::reference();
  for (std::size_t d : {1u, 3u, 4u, 8u, 16u, 999u}) {
    auto plan = srmks::reference_plan(d);
    plan.t_start = 0.05;
    EXPECT_EQ(srmks::generate_training_set(p, plan).t.front(), 0.05) << d;
  }
}

TEST(SamplingPlan, TooFewSamplesIsAnError) {
  auto plan = srmks::reference_plan(1000);
  EXPECT_EQ(plan.sample_count(), 2u);
  plan.decimation = 1001;
  EXPECT_THROW(srmks::generate_training_set(OscillatorParams::reference(), plan), srmks::InvalidInput);
}

TEST(TrainingSet, InfiniteSnrIsNoiseless) {
  auto plan = srmks::reference_plan(8, 3);
  plan.snr = std::numeric_limits<double>::infinity();
  const auto d = srmks::generate_training_set(OscillatorParams::reference(), plan);
  EXPECT_EQ(d.sigma_n, 0.0);
  EXPECT_EQ(d.y, d.true_h);
}

TEST(TrainingSet, NoiseLevelFollowsSnr) {
  const auto d = srmks::generate_training_set(OscillatorParams::reference(), srmks::reference_plan(4, 11));
  double ms = 0.0;
  for (double h : d.true_h) ms += h * h;
  ms /= static_cast<double>(d.size());
  EXPECT_NEAR(d.sigma_n, std::sqrt(ms / 10.0), 1e-18);
  const double noise = oracle::mean_squared_residual(d.y, d.true_h);
  EXPECT_NEAR(noise / (d.sigma_n * d.sigma_n), 1.0, 0.2);
}

TEST(TrainingSet, CleanSignalMatchesClosedForm) {
  const auto p = OscillatorParams::reference();
  const auto d = srmks::generate_training_set(p, srmks::reference_plan(16));
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_DOUBLE_EQ(d.t[i], 0.3 * static_cast<double>(16 * i) / 1000.0);
    EXPECT_EQ(d.true_h[i], srmks::impulse_response(p, d.t[i]));
  }
}

TEST(TrainingSet, SeedDeterminesNoise) {
  const auto p = OscillatorParams::reference();
  const auto a = srmks::generate_training_set(p, srmks::reference_plan(16, 42));
  const auto b = srmks::generate_training_set(p, srmks::reference_plan(16, 42));
  const auto c = srmks::generate_training_set(p, srmks::reference_plan(16, 43));
  EXPECT_EQ(a.y, b.y);
  EXPECT_NE(a.y, c.y);
  EXPECT_EQ(a.true_h, c.true_h);
}

TEST(GaussianStream, MomentsAndRange) {
  srmks::GaussianStream g(123);
  double sum = 0.0, sq = 0.0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    const double z = g.standard_normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / draws, 0.0, 0.01);
  EXPECT_NEAR(sq / draws, 1.0, 0.02);
  for (int i = 0; i < 1000; ++i) {
    const double u = g.uniform();
    EXPECT_GT(u, 0.0);
    EXPECT_LE(u, 1.0);
  }
}

}  // namespace
