#include "sino2d/montecarlo.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace sino2d {
namespace {

const ParamVector kReference{1.0, 5.0, 1.0, 0.2, 0.3};

McConfig reference(double sigma, int trials, int n = 32) {
  return McConfig{.theta_true = kReference, .sigma = sigma, .n = n, .trials = trials, .base_seed = 3};
}

TEST(RunTrials, ZeroNoiseHasZeroVarianceAndSystematicBias) {
  const McSummary s = run_trials(reference(0.0, 2), 1);
  EXPECT_EQ(s.trials, 2);
  EXPECT_EQ(s.failures, 0);
  const EstimationResult clean = estimate(synthesize(kReference, 32));
  const ParamError err = param_distance(clean.theta_hat, kReference);
  for (std::size_t i = 0; i < kParamCount; ++i) {
    EXPECT_EQ(s.params[i].variance, 0.0) << kParamNames[i];
    EXPECT_EQ(s.params[i].bias, err[i]) << kParamNames[i];
    EXPECT_EQ(s.noiseless_error[i], err[i]);
    EXPECT_EQ(s.params[i].crlb, 0.0);
    EXPECT_TRUE(std::isnan(s.params[i].efficiency));
  }
  EXPECT_EQ(s.j_checks, 1);  // trial 0
}

TEST(RunTrials, DeterministicAcrossRunsAndThreadCounts) {
  const McConfig cfg = reference(0.1, 40);
  const McSummary one = run_trials(cfg, 1);
  EXPECT_EQ(one, run_trials(cfg, 1));
  EXPECT_EQ(one, run_trials(cfg, 4));
  McConfig other = cfg;
  other.base_seed = 4;
  EXPECT_NE(one.params[0].variance, run_trials(other, 1).params[0].variance);
}

TEST(RunTrials, TrialsUseDerivedSeeds) {
  // Trial t must see exactly the noise derived from (base_seed, t).
  McConfig cfg = reference(0.2, 2);
  const GridSignal clean = synthesize(kReference, 32);
  ParamError sum{};
  for (int t = 0; t < 2; ++t) {
    const GridSignal noisy = add_noise(clean, {0.2, derive_seed(cfg.base_seed, static_cast<std::uint64_t>(t))});
    const ParamError e = param_distance(estimate(noisy).theta_hat, kReference);
    for (std::size_t i = 0; i < kParamCount; ++i) sum[i] += e[i];
  }
  const McSummary s = run_trials(cfg, 1);
  for (std::size_t i = 0; i < kParamCount; ++i) EXPECT_DOUBLE_EQ(s.params[i].bias, sum[i] / 2);
}

TEST(RunTrials, ValidatesConfig) {
  auto kind_of = [](const McConfig& c) -> std::pair<ErrorKind, std::string> {
    try {
      run_trials(c, 1);
    } catch (const Error& e) {
      return {e.kind(), e.what()};
    }
    return {ErrorKind::TooManyFailures, "no error"};
  };
  EXPECT_EQ(kind_of(reference(0.1, 1)).first, ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of(reference(-0.1, 10)).first, ErrorKind::InvalidArgument);

  McConfig guard = reference(0.1, 10);
  guard.theta_true.f0 = 0.5;
  const auto [kind, msg] = kind_of(guard);
  EXPECT_EQ(kind, ErrorKind::InvalidArgument);
  EXPECT_NE(msg.find("guard"), std::string::npos) << msg;

  McConfig alias = reference(0.1, 10);
  alias.theta_true.f0 = 0.7;
  EXPECT_EQ(kind_of(alias).first, ErrorKind::InvalidArgument);
}

TEST(RunTrials, BiasSmallAndEfficient) {
  const int trials = 400;
  const McSummary s = run_trials(reference(0.05, trials), 1);
  EXPECT_EQ(s.failures, 0);
  for (std::size_t i = 0; i < kParamCount; ++i) {
    const ParamStats& p = s.params[i];
    EXPECT_LE(std::abs(p.bias), 3 * std::sqrt(p.crlb / trials) + std::abs(s.noiseless_error[i])) << kParamNames[i];
    // Wider than the 2000-trial band: the variance estimate is noisier here.
    EXPECT_GT(p.efficiency, 0.6) << kParamNames[i];
    EXPECT_LT(p.efficiency, 2.0) << kParamNames[i];
  }
  EXPECT_EQ(s.j_checks, 4);
}

TEST(Sweep, EmptyListGivesEmptyResult) { EXPECT_TRUE(sweep({}).empty()); }

TEST(Sweep, KeepsOrderAndRecordsErrors) {
  McConfig bad = reference(0.1, 10);
  bad.theta_true.f1 = 0.0;
  const std::vector<SweepEntry> out = sweep({reference(0.1, 10), bad, reference(0.2, 10)}, 1);
  ASSERT_EQ(out.size(), 3u);
  ASSERT_TRUE(out[0].summary);
  EXPECT_FALSE(out[1].summary);
  EXPECT_EQ(out[1].error_kind, ErrorKind::InvalidArgument);
  EXPECT_FALSE(out[1].error.empty());
  ASSERT_TRUE(out[2].summary);
  EXPECT_EQ(*out[0].summary, run_trials(reference(0.1, 10), 1));
}

TEST(Sweep, FrequencyVarianceGrowsWithSigma) {
  std::vector<McConfig> cfgs;
  for (double s : {0.02, 0.05, 0.1}) cfgs.push_back(reference(s, 200));
  const std::vector<SweepEntry> out = sweep(cfgs, 1);
  for (Param p : {Param::F0, Param::F1}) {
    const auto i = static_cast<std::size_t>(p);
    EXPECT_LT(out[0].summary->params[i].variance, out[1].summary->params[i].variance);
    EXPECT_LT(out[1].summary->params[i].variance, out[2].summary->params[i].variance);
  }
}

TEST(Sweep, FrequencyVarianceShrinksWithGridSize) {
  const std::vector<SweepEntry> out = sweep({reference(0.1, 300, 16), reference(0.1, 300, 32)}, 1);
  for (Param p : {Param::F0, Param::F1}) {
    const auto i = static_cast<std::size_t>(p);
    const double crlb_ratio = out[0].summary->params[i].crlb / out[1].summary->params[i].crlb;
    EXPECT_NEAR(crlb_ratio, 4.0 * 1023 / 255, 1e-9);
    const double ratio = out[0].summary->params[i].variance / out[1].summary->params[i].variance;
    EXPECT_GT(ratio, 10.0);
    EXPECT_LT(ratio, 25.0);
  }
}

}  // namespace
}  // namespace sino2d
