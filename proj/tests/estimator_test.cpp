#include "sino2d/estimator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

namespace sino2d {
namespace {

const ParamVector kReference{1.0, 5.0, 1.0, 0.2, 0.3};

// Direct double-sum DFT with the combined phase per sample; shares no code
// with dft2_at.
std::complex<double> oracle_dft(const GridSignal& s, double f0, double f1) {
  long double re = 0.0L, im = 0.0L;
  for (int x = 0; x < s.n(); ++x) {
    for (int y = 0; y < s.n(); ++y) {
      const long double arg = -2.0L * std::numbers::pi_v<long double> * (static_cast<long double>(f0) * x +
                                                                          static_cast<long double>(f1) * y);
      re += s(x, y) * std::cos(arg);
      im += s(x, y) * std::sin(arg);
    }
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

// Oracle for bin (p, q) of an m-point grid: the phase is reduced mod m in
// integers first.
double oracle_bin_power(const GridSignal& s, int p, int q, int m) {
  long double re = 0.0L, im = 0.0L;
  for (int x = 0; x < s.n(); ++x) {
    for (int y = 0; y < s.n(); ++y) {
      const long long k = (static_cast<long long>(p) * x + static_cast<long long>(q) * y) % m;
      const long double arg = -2.0L * std::numbers::pi_v<long double> * k / m;
      re += s(x, y) * std::cos(arg);
      im += s(x, y) * std::sin(arg);
    }
  }
  return static_cast<double>(re * re + im * im);
}

GridSignal random_grid(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 2.0);
  std::vector<double> v(static_cast<std::size_t>(n) * n);
  for (double& x : v) x = d(rng);
  return GridSignal(n, std::move(v));
}

GridSignal centered(const GridSignal& s) {
  const double m = mean(s);
  std::vector<double> v(s.values().begin(), s.values().end());
  for (double& x : v) x -= m;
  return GridSignal(s.n(), std::move(v));
}

TEST(Dft2At, Examples) {
  const GridSignal ones = GridSignal::filled(4, 1.0);
  EXPECT_NEAR(std::abs(dft2_at(ones, 0, 0) - std::complex<double>(16, 0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(dft2_at(ones, 0.25, 0)), 0.0, 1e-14);
  const GridSignal s = synthesize({1, 0, 0, 0.25, 0.25}, 16);
  EXPECT_NEAR(std::abs(dft2_at(s, 0.25, 0.25)), 128.0, 1e-10);
}

TEST(Dft2At, MatchesOracleOffGrid) {
  const GridSignal s = random_grid(13, 3);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> f(-0.5, 1.5);
  for (int i = 0; i < 50; ++i) {
    const double f0 = f(rng), f1 = f(rng);
    EXPECT_LE(std::abs(dft2_at(s, f0, f1) - oracle_dft(s, f0, f1)), 1e-11);
  }
}

TEST(Periodogram, Examples) {
  const Periodogram zero = periodogram(GridSignal::filled(8, 0.0), 2);
  for (double v : zero.power()) EXPECT_EQ(v, 0.0);

  const GridSignal s = random_grid(8, 1);
  double total = 0.0;
  for (double v : s.values()) total += v;
  EXPECT_NEAR(periodogram(s, 1)(0, 0), total * total, 1e-10 * total * total);

  EXPECT_THROW(periodogram(s, 0), Error);
}

TEST(Periodogram, MatchesDirectDftOracle) {
  for (int n : {8, 16, 32}) {
    for (int pad : {1, 2, 4}) {
      const GridSignal s = random_grid(n, static_cast<std::uint64_t>(n * 10 + pad));
      const Periodogram pg = periodogram(s, pad);
      ASSERT_EQ(pg.m(), n * pad);
      // Full check on the small grids, a stride on the large ones.
      const int stride = n * pad >= 64 ? 5 : 1;
      double worst = 0.0;
      for (int p = 0; p < pg.m(); p += stride) {
        for (int q = 0; q < pg.m(); q += stride) {
          const double want = oracle_bin_power(s, p, q, pg.m());
          worst = std::max(worst, std::abs(pg(p, q) - want) / want);
        }
      }
      EXPECT_LE(worst, 1e-8) << "n=" << n << " pad=" << pad;
    }
  }
}

TEST(Periodogram, AliasSymmetry) {
  for (int n : {8, 15, 32}) {
    const GridSignal s = random_grid(n, static_cast<std::uint64_t>(n));
    const Periodogram pg = periodogram(s, 2);
    const int m = pg.m();
    for (int p = 0; p < m; ++p) {
      for (int q = 0; q < m; ++q) {
        const double a = pg(p, q);
        const double b = pg((m - p) % m, (m - q) % m);
        EXPECT_LE(std::abs(a - b), 1e-10 * std::max(a, b));
      }
    }
    // continuous version through the direct transform
    EXPECT_NEAR(std::abs(dft2_at(s, 0.137, 0.42)), std::abs(dft2_at(s, 1 - 0.137, 1 - 0.42)),
                1e-10 * std::abs(dft2_at(s, 0.137, 0.42)));
  }
}

TEST(FindPeak, OnBinSinusoidWithLargeOffset) {
  const GridSignal s = synthesize({1, 10, 0, 0.25, 0.25}, 16);
  const PeakBin pk = find_peak(periodogram(centered(s), 4), 0.1);
  const bool direct = pk.f0 == 0.25 && pk.f1 == 0.25;
  const bool alias = pk.f0 == 0.75 && pk.f1 == 0.75;
  EXPECT_TRUE(direct || alias) << pk.f0 << "," << pk.f1;
  EXPECT_NEAR(pk.power, std::norm(oracle_dft(centered(s), pk.f0, pk.f1)), 1e-8 * pk.power);
  EXPECT_TRUE(direct) << "ties resolve to the smaller bin";
}

TEST(FindPeak, PureOffsetHasOnlyLeakage) {
  const int n = 16;
  const PeakBin pk = find_peak(periodogram(GridSignal::filled(n, 1.0), 4), 0.1);
  EXPECT_LT(pk.power, std::pow(n, 4) / 4.0 / 10.0);
}

TEST(FindPeak, Errors) {
  const Periodogram pg = periodogram(random_grid(8, 2), 2);
  try {
    find_peak(pg, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptySearchRegion);
  }
  EXPECT_THROW(find_peak(pg, 0.0), Error);
}

TEST(FindPeak, TiesGoToSmallestBin) {
  std::vector<double> power(16 * 16, 1.0);
  const Periodogram pg(4, 16, power);
  const PeakBin pk = find_peak(pg, 0.05);
  EXPECT_EQ(pk.p, 0);
  EXPECT_EQ(pk.q, 1);
}

TEST(RefinePeak, OnGridStaysPut) {
  const GridSignal s = synthesize({1, 0, 0, 0.25, 0.25}, 16);
  const RefinedPeak r = refine_peak(s, {0.25, 0.25}, 1.0 / 64);
  EXPECT_NEAR(r.f0, 0.25, 1e-9);
  EXPECT_NEAR(r.f1, 0.25, 1e-9);
}

// Alternating 1e-6-step line searches over the +-1 bin box around `start`.
Point2 brute_force_peak(const GridSignal& s, Point2 start, double bin) {
  Point2 best = start;
  const double step = 1e-6;
  const int span = static_cast<int>(bin / step);
  for (int sweep = 0; sweep < 4; ++sweep) {
    const Point2 before = best;
    double best_val = std::norm(dft2_at(s, best.x, best.y));
    for (int i = -span; i <= span; ++i) {
      const double x = start.x + i * step;
      const double v = std::norm(dft2_at(s, x, best.y));
      if (v > best_val) best_val = v, best.x = x;
    }
    for (int i = -span; i <= span; ++i) {
      const double y = start.y + i * step;
      const double v = std::norm(dft2_at(s, best.x, y));
      if (v > best_val) best_val = v, best.y = y;
    }
    if (before.x == best.x && before.y == best.y) break;
  }
  return best;
}

TEST(RefinePeak, OffGridCleanSignal) {
  const ParamVector t{1, 0, 0.9, 0.2337, 0.1183};
  const GridSignal s = synthesize(t, 32);
  const Periodogram pg = periodogram(s, 4);
  const PeakBin pk = find_peak(pg, default_dc_exclusion(32));
  const RefinedPeak r = refine_peak(s, {pk.f0, pk.f1}, 1.0 / pg.m());
  EXPECT_NEAR(r.f0, t.f0, 5e-4);
  EXPECT_NEAR(r.f1, t.f1, 5e-4);
  EXPECT_GT(r.iterations, 0);

  const Point2 brute = brute_force_peak(s, {pk.f0, pk.f1}, 1.0 / pg.m());
  EXPECT_NEAR(r.f0, brute.x, 2e-6);
  EXPECT_NEAR(r.f1, brute.y, 2e-6);
  EXPECT_GE(std::norm(dft2_at(s, r.f0, r.f1)), std::norm(dft2_at(s, brute.x, brute.y)) * (1 - 1e-12));
}

TEST(RefinePeak, FlatObjectiveReturnsCoarse) {
  const RefinedPeak r = refine_peak(GridSignal::filled(8, 0.0), {0.3, 0.1}, 1.0 / 32);
  EXPECT_EQ(r.f0, 0.3);
  EXPECT_EQ(r.f1, 0.1);
  EXPECT_EQ(r.iterations, 0);
}

TEST(RefinePeak, IterationCap) {
  const GridSignal s = synthesize({1, 0, 0.9, 0.2337, 0.1183}, 32);
  try {
    refine_peak(s, {0.234375, 0.1171875}, 1.0 / 128, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonConvergence);
  }
}

TEST(RefinePeak, NeverWorseThanCoarse) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> f(0.08, 0.42);
  for (int i = 0; i < 20; ++i) {
    const ParamVector t{1, 2, 0.4 * i, f(rng), f(rng)};
    const GridSignal s = centered(add_noise(synthesize(t, 16), {0.5, static_cast<std::uint64_t>(i)}));
    const Periodogram pg = periodogram(s, 4);
    const PeakBin pk = find_peak(pg, default_dc_exclusion(16));
    const RefinedPeak r = refine_peak(s, {pk.f0, pk.f1}, 1.0 / pg.m());
    EXPECT_GE(std::norm(dft2_at(s, r.f0, r.f1)), std::norm(dft2_at(s, pk.f0, pk.f1)));
    EXPECT_LE(std::abs(r.f0 - pk.f0), 1.0 / pg.m());
    EXPECT_LE(std::abs(r.f1 - pk.f1), 1.0 / pg.m());
  }
}

TEST(RecoverLinear, Examples) {
  const LinearCoefficients z = recover_linear(GridSignal::filled(8, 0.0), 0.2, 0.3);
  EXPECT_EQ(z.alpha1, 0.0);
  EXPECT_EQ(z.alpha2, 0.0);
  EXPECT_EQ(z.b, 0.0);

  const LinearCoefficients c = recover_linear(synthesize({1, 0, kPi / 2, 0.25, 0.25}, 16), 0.25, 0.25);
  EXPECT_NEAR(c.alpha1, 0.0, 0.02);
  EXPECT_NEAR(c.alpha2, 1.0, 0.02);
  EXPECT_NEAR(c.b, 0.0, 0.02);

  EXPECT_EQ(recover_linear(GridSignal::filled(8, 7.0), 0.2, 0.3).b, 7.0);
}

TEST(ExactLs, RecoversNoiselessCoefficients) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> f(0.07, 0.43), ph(0, kTwoPi), amp(0.2, 3.0);
  for (int i = 0; i < 20; ++i) {
    const ParamVector t{amp(rng), amp(rng) - 1.0, ph(rng), f(rng), f(rng)};
    const LinearCoefficients c = exact_ls(synthesize(t, 16), t.f0, t.f1);
    EXPECT_NEAR(c.alpha1, t.A * std::cos(t.phi), 1e-10);
    EXPECT_NEAR(c.alpha2, t.A * std::sin(t.phi), 1e-10);
    EXPECT_NEAR(c.b, t.B, 1e-10);
  }
}

TEST(ExactLs, SingularAtZeroFrequency) {
  try {
    exact_ls(random_grid(8, 1), 0.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularMatrix);
  }
}

double residual(const GridSignal& s, const LinearCoefficients& c, double f0, double f1) {
  double acc = 0.0;
  for (int x = 0; x < s.n(); ++x) {
    for (int y = 0; y < s.n(); ++y) {
      const double arg = kTwoPi * (f0 * x + f1 * y);
      const double r = s(x, y) - c.alpha1 * std::sin(arg) - c.alpha2 * std::cos(arg) - c.b;
      acc += r * r;
    }
  }
  return acc;
}

TEST(ExactLs, NeverWorseThanClosedForm) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> f(0.07, 0.93);
  for (int i = 0; i < 30; ++i) {
    const GridSignal s = add_noise(synthesize({1, 3, 0.5, 0.21, 0.33}, 12), {0.7, static_cast<std::uint64_t>(i)});
    const double f0 = f(rng), f1 = f(rng);
    EXPECT_LE(residual(s, exact_ls(s, f0, f1), f0, f1), residual(s, recover_linear(s, f0, f1), f0, f1) + 1e-9);
  }
}

TEST(LinearCoefficients, PhaseAmplitudeRoundTrip) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> d(0.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const LinearCoefficients c{d(rng), d(rng), 0.0};
    const double a = c.amplitude(), phi = c.phase();
    EXPECT_GE(phi, 0.0);
    EXPECT_LT(phi, kTwoPi);
    EXPECT_NEAR(a * std::cos(phi), c.alpha1, 1e-12 * std::max(1.0, a));
    EXPECT_NEAR(a * std::sin(phi), c.alpha2, 1e-12 * std::max(1.0, a));
  }
}

TEST(Estimate, NoiselessReference) {
  const EstimationResult r = estimate(synthesize(kReference, 32));
  const ParamError e = param_distance(r.theta_hat, kReference);
  EXPECT_LE(std::abs(e[0]), 0.01);
  EXPECT_LE(std::abs(e[1]), 0.01);
  EXPECT_LE(std::abs(e[2]), 0.02);
  EXPECT_LE(std::abs(e[3]), 5e-4);
  EXPECT_LE(std::abs(e[4]), 5e-4);
  EXPECT_FALSE(r.canonicalized);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_GT(r.peak_power, 0.0);
}

TEST(Estimate, OnBinIsExact) {
  const ParamVector t{2, 0, 0, 0.25, 0.25};
  const GridSignal s = synthesize(t, 16);
  const EstimationResult r = estimate(s);
  const ParamError e = param_distance(r.theta_hat, t);
  for (double v : e) EXPECT_LE(std::abs(v), 1e-6);

  const LinearCoefficients ls = exact_ls(s, r.theta_hat.f0, r.theta_hat.f1);
  EXPECT_NEAR(r.theta_hat.A, ls.amplitude(), 1e-6);
  EXPECT_NEAR(r.theta_hat.B, ls.b, 1e-6);
}

TEST(Estimate, ErrorShrinksWithGridSize) {
  ParamError prev{};
  for (int n : {16, 32, 64}) {
    const ParamError e = param_distance(estimate(synthesize(kReference, n)).theta_hat, kReference);
    if (n > 16) {
      for (std::size_t i = 0; i < kParamCount; ++i) EXPECT_LT(std::abs(e[i]), std::abs(prev[i])) << kParamNames[i] << " n=" << n;
    }
    prev = e;
  }
}

TEST(Estimate, ConstantGridGivesZeroAmplitude) {
  const EstimationResult r = estimate(GridSignal::filled(16, 3.0));
  EXPECT_LE(r.theta_hat.A, 1e-12);
  EXPECT_DOUBLE_EQ(r.theta_hat.B, 3.0);
}

TEST(Estimate, SmallGridWarns) {
  const EstimationResult r = estimate(synthesize({1, 0, 0.3, 0.3, 0.2}, 6));
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Estimate, PropagatesSearchErrors) {
  try {
    estimate(synthesize(kReference, 16), {.dc_exclusion = 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptySearchRegion);
  }
}

TEST(Canonicalize, AliasMap) {
  const auto [t, flipped] = canonicalize({1, 0, 0.4, 0.75, 0.7});
  EXPECT_TRUE(flipped);
  EXPECT_DOUBLE_EQ(t.f0, 0.25);
  EXPECT_NEAR(t.f1, 0.3, 1e-15);
  EXPECT_NEAR(t.phi, kPi - 0.4, 1e-15);
  // Both describe the same samples.
  const GridSignal a = synthesize({1, 0, 0.4, 0.75, 0.7}, 8);
  const GridSignal b = synthesize(t, 8);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.values()[i], b.values()[i], 1e-12);

  EXPECT_FALSE(canonicalize({1, 0, 0.4, 0.25, 0.7}).second);
}

TEST(SquaredError, Examples) {
  const ParamVector t{1.3, 2, 0.5, 0.21, 0.34};
  EXPECT_EQ(squared_error(synthesize(t, 8), t), 0.0);
  EXPECT_EQ(squared_error(GridSignal::filled(4, 0.0), {0, 1, 0, 0.3, 0.3}), 16.0);
}

TEST(ParamDistance, Examples) {
  const ParamVector a{1, 2, 0.3, 0.2, 0.3};
  for (double v : param_distance(a, a)) EXPECT_EQ(v, 0.0);

  const ParamError e = param_distance({1, 0, 0.1, 0.2, 0.3}, {1, 0, kTwoPi - 0.1, 0.2, 0.3});
  EXPECT_NEAR(e[2], 0.2, 1e-15);

  const ParamVector alias{1, 0, wrap_phase(kPi - 0.3), 0.8, 0.7};
  const ParamError before = param_distance(alias, {1, 0, 0.3, 0.2, 0.3});
  EXPECT_GT(std::abs(before[3]), 0.1);
  const ParamError after = param_distance(canonicalize(alias).first, {1, 0, 0.3, 0.2, 0.3});
  for (double v : after) EXPECT_NEAR(v, 0.0, 1e-15);
}

}  // namespace
}  // namespace sino2d
