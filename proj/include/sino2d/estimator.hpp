#pragma once

// Maximum-likelihood estimation of (A, B, phi, f0, f1).
//
// Minimizing J(theta) = |s - z(theta)|^2 is separable: for fixed frequencies
// the model is linear in alpha = (A cos phi, A sin phi, B) with regressors
// u = sin(2 pi (f0 x + f1 y)), v = cos(...), 1. Concentrating alpha out, and
// using u'u ~ v'v ~ N^2/2 with the cross terms ~ 0, leaves
//
//   s'H(H'H)^-1 H's ~ (2/N^2) |S(f0, f1)|^2 + (1/N^2) (sum s)^2,
//
// so the frequency MLE is the periodogram peak, found coarsely on a zero-padded
// FFT grid and then polished with Nelder-Mead on the continuous transform.

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sino2d/core.hpp"
#include "sino2d/dense.hpp"
#include "sino2d/nelder_mead.hpp"
#include "sino2d/periodogram.hpp"

namespace sino2d {

inline constexpr double kFrequencyTolerance = 1e-9;
inline constexpr int kDefaultRefineIterations = 200;
inline constexpr int kDefaultPadFactor = 4;
inline constexpr double kNormalMatrixConditionLimit = 1e12;

/// max(2/n, 0.02) cycles/sample.
inline double default_dc_exclusion(int n) { return std::max(2.0 / n, 0.02); }

struct PeakBin {
  int p = 0;
  int q = 0;
  double f0 = 0.0;
  double f1 = 0.0;
  double power = 0.0;
};

/// Wrapped Euclidean distance of a frequency pair from (0, 0).
inline double distance_from_dc(double f0, double f1) {
  const double d0 = std::min(f0, 1.0 - f0);
  const double d1 = std::min(f1, 1.0 - f1);
  return std::hypot(d0, d1);
}

/// Maximum-power bin farther than `dc_exclusion` from (0, 0). Ties go to the
/// lexicographically smallest (p, q).
inline PeakBin find_peak(const Periodogram& pg, double dc_exclusion) {
  if (!(dc_exclusion > 0.0)) fail(ErrorKind::InvalidArgument, "dc exclusion radius must be > 0");
  const int m = pg.m();
  std::optional<PeakBin> best;
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      const double f0 = pg.bin_frequency(p);
      const double f1 = pg.bin_frequency(q);
      if (distance_from_dc(f0, f1) <= dc_exclusion) continue;
      const double power = pg(p, q);
      if (!best || power > best->power) best = PeakBin{p, q, f0, f1, power};
    }
  }
  if (!best) fail(ErrorKind::EmptySearchRegion, "dc exclusion masks every periodogram bin");
  return *best;
}

struct RefinedPeak {
  double f0 = 0.0;
  double f1 = 0.0;
  int iterations = 0;
};

/// Locally maximizes |S(f0, f1)|^2 within +-bin_width of `coarse` on each axis.
inline RefinedPeak refine_peak(const GridSignal& signal, Point2 coarse, double bin_width,
                               int max_iterations = kDefaultRefineIterations) {
  if (!(bin_width > 0.0)) fail(ErrorKind::InvalidArgument, "bin width must be > 0");
  auto objective = [&](Point2 f) { return -std::norm(dft2_at(signal, f.x, f.y)); };

  const Box2 box{{coarse.x - bin_width, coarse.y - bin_width}, {coarse.x + bin_width, coarse.y + bin_width}};
  const double h = bin_width / 2.0;
  const double start = objective(coarse);
  if (objective({coarse.x + h, coarse.y}) == start && objective({coarse.x, coarse.y + h}) == start) {
    return {coarse.x, coarse.y, 0};  // flat objective
  }

  const NelderMeadResult r =
      nelder_mead(objective, coarse, box, {.step = h, .x_tolerance = kFrequencyTolerance, .max_iterations = max_iterations});
  if (!r.converged) {
    fail(ErrorKind::NonConvergence,
         "peak refinement did not converge within " + std::to_string(max_iterations) + " iterations");
  }
  return {r.best.x, r.best.y, r.iterations};
}

/// alpha1 = A cos(phi), alpha2 = A sin(phi), b = B.
struct LinearCoefficients {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double b = 0.0;

  double amplitude() const { return std::hypot(alpha1, alpha2); }
  /// atan2(alpha2, alpha1) wrapped into [0, 2 pi).
  double phase() const { return wrap_phase(std::atan2(alpha2, alpha1)); }
};

inline double mean(const GridSignal& s) {
  double acc = 0.0;
  for (double v : s.values()) acc += v;
  return acc / static_cast<double>(s.size());
}

/// Closed-form approximate solution of the normal equations:
///   alpha1 = (2/N^2) sum s sin(.), alpha2 = (2/N^2) sum s cos(.), b = mean(s).
inline LinearCoefficients recover_linear(const GridSignal& signal, double f0, double f1) {
  const int n = signal.n();
  double ss = 0.0;
  double sc = 0.0;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      const double arg = kTwoPi * (f0 * x + f1 * y);
      ss += signal(x, y) * std::sin(arg);
      sc += signal(x, y) * std::cos(arg);
    }
  }
  const double nn = static_cast<double>(n) * n;
  return {2.0 * ss / nn, 2.0 * sc / nn, mean(signal)};
}

/// Exact least squares over the regressors [u v 1] via the 3x3 normal
/// equations.
inline LinearCoefficients exact_ls(const GridSignal& signal, double f0, double f1) {
  const int n = signal.n();
  Matrix<3> hth{};
  Vector<3> hts{};
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      const double arg = kTwoPi * (f0 * x + f1 * y);
      const std::array<double, 3> h{std::sin(arg), std::cos(arg), 1.0};
      for (std::size_t i = 0; i < 3; ++i) {
        hts[i] += h[i] * signal(x, y);
        for (std::size_t j = 0; j < 3; ++j) hth[i][j] += h[i] * h[j];
      }
    }
  }
  Matrix<3> inv;
  try {
    inv = checked_inverse(hth, kNormalMatrixConditionLimit);
  } catch (const Error&) {
    fail(ErrorKind::SingularMatrix, "normal matrix H'H is singular at these frequencies");
  }
  const Vector<3> a = multiply(inv, hts);
  return {a[0], a[1], a[2]};
}

inline double squared_error(const GridSignal& signal, const ParamVector& theta) {
  const int n = signal.n();
  double acc = 0.0;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      const double r = signal(x, y) - eval_model(theta, x, y);
      acc += r * r;
    }
  }
  return acc;
}

/// Maps (f0, f1, phi) -> (1 - f0, 1 - f1, pi - phi) when f0 > 1/2, so that the
/// reported representative has f0 in [0, 1/2]. Both describe the same samples
/// on an integer grid. Returns whether the map was applied.
inline std::pair<ParamVector, bool> canonicalize(ParamVector t) {
  t = canonical_sign(t);
  t.f0 = wrap_frequency(t.f0);
  t.f1 = wrap_frequency(t.f1);
  if (t.f0 <= 0.5) return {t, false};
  t.f0 = wrap_frequency(1.0 - t.f0);
  t.f1 = wrap_frequency(1.0 - t.f1);
  t.phi = wrap_phase(kPi - t.phi);
  return {t, true};
}

using ParamError = std::array<double, kParamCount>;

/// a - b per parameter, phase difference wrapped to (-pi, pi].
inline ParamError param_distance(const ParamVector& a, const ParamVector& b) {
  return {a.A - b.A, a.B - b.B, wrap_phase_difference(a.phi - b.phi), a.f0 - b.f0, a.f1 - b.f1};
}

struct EstimateOptions {
  int pad_factor = kDefaultPadFactor;
  std::optional<double> dc_exclusion{};  ///< defaults to default_dc_exclusion(n)
  int max_refine_iterations = kDefaultRefineIterations;
};

struct EstimationResult {
  ParamVector theta_hat;
  double peak_power = 0.0;  ///< |S|^2 of the mean-removed grid at the refined frequencies
  std::pair<int, int> coarse_bin{0, 0};
  int refine_iterations = 0;
  bool canonicalized = false;
  std::vector<std::string> warnings{};
};

inline constexpr int kRecommendedMinimumDimension = 8;

/// Full pipeline. The sample mean is the offset estimate; it is removed before
/// the spectral steps so its DC leakage cannot outrank the sinusoid peak.
inline EstimationResult estimate(const GridSignal& signal, const EstimateOptions& opt = {}) {
  const int n = signal.n();
  EstimationResult result;
  if (n < kRecommendedMinimumDimension) {
    result.warnings.push_back("grid dimension " + std::to_string(n) + " is below " +
                              std::to_string(kRecommendedMinimumDimension) +
                              "; large-N approximations may not hold");
  }
  const double offset = mean(signal);
  std::vector<double> centered_values(signal.values().begin(), signal.values().end());
  for (double& v : centered_values) v -= offset;
  const GridSignal centered(n, std::move(centered_values));

  const Periodogram pg = periodogram(centered, opt.pad_factor);
  const PeakBin peak = find_peak(pg, opt.dc_exclusion.value_or(default_dc_exclusion(n)));
  const RefinedPeak refined =
      refine_peak(centered, {peak.f0, peak.f1}, 1.0 / pg.m(), opt.max_refine_iterations);

  const LinearCoefficients c = recover_linear(centered, refined.f0, refined.f1);
  const ParamVector raw{c.amplitude(), offset, c.phase(), refined.f0, refined.f1};
  const auto [theta, aliased] = canonicalize(raw);

  result.theta_hat = theta;
  result.peak_power = std::norm(dft2_at(centered, refined.f0, refined.f1));
  result.coarse_bin = {peak.p, peak.q};
  result.refine_iterations = refined.iterations;
  result.canonicalized = aliased;
  return result;
}

}  // namespace sino2d
