#pragma once

// Model of a 2D sinusoid with offset on an N x N grid,
//
//   f(x, y) = A sin(2 pi (f0 x + f1 y) + phi) + B,   x, y = 0..N-1,
//
// observed in white Gaussian noise, plus the closed-form exponential sums the
// large-N approximations rest on.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sino2d/error.hpp"
#include "sino2d/rng.hpp"

namespace sino2d {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Model parameters in the fixed order (A, B, phi, f0, f1).
struct ParamVector {
  double A = 0.0;    ///< amplitude
  double B = 0.0;    ///< offset
  double phi = 0.0;  ///< phase, radians
  double f0 = 0.0;   ///< x-frequency, cycles/sample
  double f1 = 0.0;   ///< y-frequency, cycles/sample

  friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

inline constexpr std::size_t kParamCount = 5;

enum class Param : std::size_t { A = 0, B = 1, Phi = 2, F0 = 3, F1 = 4 };

inline constexpr const char* kParamNames[kParamCount] = {"A", "B", "phi", "f0", "f1"};

inline double get(const ParamVector& p, std::size_t i) {
  switch (i) {
    case 0: return p.A;
    case 1: return p.B;
    case 2: return p.phi;
    case 3: return p.f0;
    default: return p.f1;
  }
}

/// Wraps an angle into [0, 2 pi).
inline double wrap_phase(double phi) {
  double r = std::fmod(phi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Wraps an angle difference into (-pi, pi].
inline double wrap_phase_difference(double d) {
  double r = std::remainder(d, kTwoPi);  // [-pi, pi]
  if (r <= -kPi) r += kTwoPi;
  return r;
}

/// Wraps a frequency into [0, 1).
inline double wrap_frequency(double f) {
  double r = f - std::floor(f);
  if (r >= 1.0) r = 0.0;
  return r;
}

/// Guard band half-width around {0, 1/2, 1}, in cycles/sample.
inline double guard_width(int n) { return 2.0 / static_cast<double>(n); }

/// Distance from `f` to the nearest of {0, 1/2, 1}.
inline double distance_to_singular(double f) {
  return std::min({std::abs(f), std::abs(f - 0.5), std::abs(f - 1.0)});
}

inline bool inside_guard(double f, int n) { return distance_to_singular(f) < guard_width(n); }

/// Absorbs a negative amplitude into the phase and wraps the phase.
inline ParamVector canonical_sign(ParamVector p) {
  if (p.A < 0.0) {
    p.A = -p.A;
    p.phi += kPi;
  }
  p.phi = wrap_phase(p.phi);
  return p;
}

/// Rejects non-finite values, A < 0 and frequencies outside (0, 1).
inline void validate_params(const ParamVector& p) {
  for (std::size_t i = 0; i < kParamCount; ++i) {
    if (!std::isfinite(get(p, i))) {
      fail(ErrorKind::InvalidArgument, std::string("parameter ") + kParamNames[i] + " must be finite");
    }
  }
  if (p.A < 0.0) fail(ErrorKind::InvalidArgument, "amplitude A must be >= 0");
  if (!(p.f0 > 0.0 && p.f0 < 1.0)) fail(ErrorKind::InvalidArgument, "frequency f0 must lie in (0, 1)");
  if (!(p.f1 > 0.0 && p.f1 < 1.0)) fail(ErrorKind::InvalidArgument, "frequency f1 must lie in (0, 1)");
}

inline void validate_dimension(int n) {
  if (n < 2) fail(ErrorKind::InvalidArgument, "grid dimension must be >= 2");
}

/// validate_params plus the frequency guard bands required for the large-N
/// approximations behind the CRLB.
inline void validate_guarded(const ParamVector& p, int n) {
  validate_params(p);
  validate_dimension(n);
  const std::pair<const char*, double> freqs[] = {{"f0", p.f0}, {"f1", p.f1}};
  for (const auto& [name, f] : freqs) {
    if (inside_guard(f, n)) {
      fail(ErrorKind::InvalidArgument,
           std::string("frequency guard violated: ") + name + "=" + std::to_string(f) +
               " is within 2/n=" + std::to_string(guard_width(n)) + " of {0, 1/2, 1}");
    }
  }
}

/// N x N real samples, row-major with x as the row index: values[x * n + y].
class GridSignal {
 public:
  GridSignal() = default;

  GridSignal(int n, std::vector<double> values) : n_(n), values_(std::move(values)) {
    validate_dimension(n_);
    if (values_.size() != static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_)) {
      fail(ErrorKind::InvalidArgument, "grid must hold n*n samples");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "grid samples must be finite");
    }
  }

  static GridSignal filled(int n, double value) {
    validate_dimension(n);
    return GridSignal(n, std::vector<double>(static_cast<std::size_t>(n) * n, value));
  }

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator()(int x, int y) const { return values_[static_cast<std::size_t>(x) * n_ + y]; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const GridSignal&, const GridSignal&) = default;

 private:
  int n_ = 0;
  std::vector<double> values_;
};

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

inline double eval_model(const ParamVector& t, int x, int y) {
  return t.A * std::sin(kTwoPi * (t.f0 * x + t.f1 * y) + t.phi) + t.B;
}

inline GridSignal synthesize(const ParamVector& theta, int n) {
  validate_dimension(n);
  std::vector<double> values(static_cast<std::size_t>(n) * n);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) values[static_cast<std::size_t>(x) * n + y] = eval_model(theta, x, y);
  }
  return GridSignal(n, std::move(values));
}

/// Adds i.i.d. N(0, sigma^2) noise, drawn in row-major sample order.
inline GridSignal add_noise(const GridSignal& clean, const NoiseSpec& spec) {
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) {
    fail(ErrorKind::InvalidArgument, "noise sigma must be >= 0");
  }
  if (spec.sigma == 0.0) return clean;
  GaussianSource source(spec.seed);
  std::vector<double> values(clean.values().begin(), clean.values().end());
  for (double& v : values) v += spec.sigma * source.gaussian();
  return GridSignal(clean.n(), std::move(values));
}

/// Query for the weighted exponential sum (1/n^(k+1)) sum_m m^k e^{i(omega m + phi)}.
struct LemmaSumQuery {
  double omega = 0.0;
  double phi = 0.0;
  int n = 1;
  int k = 0;
};

inline std::complex<double> lemma_sum_direct(const LemmaSumQuery& q) {
  if (q.n < 1) fail(ErrorKind::InvalidArgument, "lemma sum needs n >= 1");
  if (q.k < 0) fail(ErrorKind::InvalidArgument, "lemma sum needs k >= 0");
  std::complex<double> acc{0.0, 0.0};
  for (int m = 0; m < q.n; ++m) {
    const double weight = std::pow(static_cast<double>(m), q.k);
    acc += weight * std::polar(1.0, q.omega * m + q.phi);
  }
  return acc / std::pow(static_cast<double>(q.n), q.k + 1);
}

inline constexpr double kSingularFrequencyTolerance = 1e-9;

/// Closed form of (1/n) sum_{m<n} e^{i(omega m + phi)}:
///   [e^{i(pi/2 - omega/2 + phi)} + e^{-i(pi/2 - omega(n - 1/2) - phi)}] / (2 n sin(omega/2)).
inline std::complex<double> lemma_sum_closed(double omega, double phi, int n) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "lemma sum needs n >= 1");
  const double denom = std::sin(omega / 2.0);
  if (std::abs(denom) < kSingularFrequencyTolerance) {
    fail(ErrorKind::SingularFrequency, "omega is a multiple of 2*pi; closed form is singular");
  }
  const double nn = static_cast<double>(n);
  const auto a = std::polar(1.0, kPi / 2.0 - omega / 2.0 + phi);
  const auto b = std::polar(1.0, -(kPi / 2.0 - omega * (nn - 0.5) - phi));
  return (a + b) / (2.0 * nn * denom);
}

/// Magnitude bound 1/(n |sin(omega/2)|) of the closed form; infinite at
/// the singular points.
inline double lemma_envelope(double omega, int n) {
  const double s = std::abs(std::sin(omega / 2.0));
  if (s == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (static_cast<double>(n) * s);
}

struct CurvePoint {
  double f = 0.0;
  double y = 0.0;
};

/// y(f) = (1/n) sum_{x<n} sin(2 k_mult pi f x + phi) for each f in `f_grid`.
/// k_mult = 2 and k_mult = 1 give the two approximation-validity curves.
inline std::vector<CurvePoint> approx_curve(int k_mult, double phi, int n, std::span<const double> f_grid) {
  if (k_mult != 1 && k_mult != 2) fail(ErrorKind::InvalidArgument, "k_mult must be 1 or 2");
  if (n < 1) fail(ErrorKind::InvalidArgument, "curve needs n >= 1");
  std::vector<CurvePoint> out;
  out.reserve(f_grid.size());
  for (double f : f_grid) {
    if (!(f >= 0.0 && f <= 1.0)) fail(ErrorKind::InvalidArgument, "curve frequencies must lie in [0, 1]");
    double acc = 0.0;
    for (int x = 0; x < n; ++x) acc += std::sin(2.0 * k_mult * kPi * f * x + phi);
    out.push_back({f, acc / n});
  }
  return out;
}

/// Uniform frequency grid 0, step, 2*step, ... up to and including 1 (when it
/// lands within rounding of 1).
inline std::vector<double> frequency_grid(double step) {
  if (!(step > 0.0 && step < 1.0)) fail(ErrorKind::InvalidArgument, "frequency step must lie in (0, 1)");
  const auto count = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
  std::vector<double> grid;
  grid.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i) grid.push_back(std::min(1.0, static_cast<double>(i) * step));
  return grid;
}

}  // namespace sino2d
