#pragma once

// Fisher information and Cramer-Rao bounds for theta = (A, B, phi, f0, f1)
// under s = f(theta) + w, w ~ N(0, sigma^2 I).
//
// With psi = 2 pi (f0 x + f1 y) + phi, the exact entries -E[d^2 ln p] are
// double sums over the grid, e.g.
//
//   (A, A)   = (1/2s^2)  sum (1 - cos 2psi)
//   (phi,f0) = (pi A^2/s^2) sum x (1 + cos 2psi)
//   (f0,f1)  = (2 pi^2 A^2/s^2) sum x y (1 + cos 2psi)
//
// Dropping every oscillating sum (valid for large N away from f = 0, 1/2, 1)
// leaves the asymptotic matrix, whose inverse has a closed form:
//
//   var(A)   >= 2 s^2 / N^2
//   var(B)   >= s^2 / N^2
//   var(phi) >= 2 (7N - 5) s^2 / (A^2 N^2 (N + 1))
//   var(fk)  >= 6 s^2 / (pi^2 A^2 N^2 (N^2 - 1))
//
//   det = pi^4 A^6 N^10 (N^2 - 1)^2 / (144 s^10)

#include <cmath>
#include <string>

#include "sino2d/core.hpp"
#include "sino2d/dense.hpp"

namespace sino2d {

inline constexpr double kFisherConditionLimit = 1e12;

enum class FisherMode { Asymptotic, Exact };

inline const char* to_string(FisherMode mode) { return mode == FisherMode::Exact ? "exact" : "asymptotic"; }

struct FisherMatrix {
  Matrix<5> entries{};
  int n = 0;
  double sigma = 0.0;
  FisherMode mode = FisherMode::Asymptotic;

  double operator()(Param i, Param j) const {
    return entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
};

struct CrlbBounds {
  double var_A = 0.0;
  double var_B = 0.0;
  double var_phi = 0.0;
  double var_f0 = 0.0;
  double var_f1 = 0.0;

  double operator[](std::size_t i) const {
    switch (i) {
      case 0: return var_A;
      case 1: return var_B;
      case 2: return var_phi;
      case 3: return var_f0;
      default: return var_f1;
    }
  }
};

namespace detail {

inline void check_fisher_inputs(double sigma, int n) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) fail(ErrorKind::InvalidArgument, "noise sigma must be > 0");
  validate_dimension(n);
}

inline void set_symmetric(Matrix<5>& m, Param i, Param j, double v) {
  m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
  m[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v;
}

}  // namespace detail

/// Large-N Fisher matrix. Independent of phi, f0 and f1.
inline FisherMatrix fisher_asymptotic(const ParamVector& theta, double sigma, int n) {
  detail::check_fisher_inputs(sigma, n);
  const double N = n;
  const double A2 = theta.A * theta.A;
  const double s2 = sigma * sigma;
  const double N2 = N * N;

  FisherMatrix fm{.n = n, .sigma = sigma, .mode = FisherMode::Asymptotic};
  auto& m = fm.entries;
  using enum Param;
  detail::set_symmetric(m, A, A, N2 / (2.0 * s2));
  detail::set_symmetric(m, B, B, N2 / s2);
  detail::set_symmetric(m, Phi, Phi, A2 * N2 / (2.0 * s2));
  const double ff = kPi * kPi * A2 * N2 * (N - 1.0) * (2.0 * N - 1.0) / (3.0 * s2);
  detail::set_symmetric(m, F0, F0, ff);
  detail::set_symmetric(m, F1, F1, ff);
  const double pf = kPi * A2 * N2 * (N - 1.0) / (2.0 * s2);
  detail::set_symmetric(m, Phi, F0, pf);
  detail::set_symmetric(m, Phi, F1, pf);
  detail::set_symmetric(m, F0, F1, kPi * kPi * A2 * N2 * (N - 1.0) * (N - 1.0) / (2.0 * s2));
  return fm;
}

/// Finite-N Fisher matrix from the expectation sums, before any large-N
/// approximation. The (y, f1) entries mirror the (x, f0) ones.
inline FisherMatrix fisher_exact(const ParamVector& theta, double sigma, int n) {
  detail::check_fisher_inputs(sigma, n);
  // Sums over the grid; "2" suffix means argument 2 psi.
  double sin1 = 0, cos1 = 0, sin2 = 0, cos2 = 0;
  double x_cos1 = 0, y_cos1 = 0, x_sin2 = 0, y_sin2 = 0;
  double x_1pc2 = 0, y_1pc2 = 0, xx_1pc2 = 0, yy_1pc2 = 0, xy_1pc2 = 0;
  for (int xi = 0; xi < n; ++xi) {
    for (int yi = 0; yi < n; ++yi) {
      const double x = xi;
      const double y = yi;
      const double psi = kTwoPi * (theta.f0 * x + theta.f1 * y) + theta.phi;
      const double s_1 = std::sin(psi), c_1 = std::cos(psi);
      const double s_2 = std::sin(2.0 * psi), c_2 = std::cos(2.0 * psi);
      sin1 += s_1;
      cos1 += c_1;
      sin2 += s_2;
      cos2 += c_2;
      x_cos1 += x * c_1;
      y_cos1 += y * c_1;
      x_sin2 += x * s_2;
      y_sin2 += y * s_2;
      x_1pc2 += x * (1.0 + c_2);
      y_1pc2 += y * (1.0 + c_2);
      xx_1pc2 += x * x * (1.0 + c_2);
      yy_1pc2 += y * y * (1.0 + c_2);
      xy_1pc2 += x * y * (1.0 + c_2);
    }
  }
  const double N2 = static_cast<double>(n) * n;
  const double a = theta.A;
  const double s2 = sigma * sigma;
  const double pi2 = kPi * kPi;

  FisherMatrix fm{.n = n, .sigma = sigma, .mode = FisherMode::Exact};
  auto& m = fm.entries;
  using enum Param;
  detail::set_symmetric(m, A, A, (N2 - cos2) / (2.0 * s2));
  detail::set_symmetric(m, A, B, sin1 / s2);
  detail::set_symmetric(m, A, Phi, a * sin2 / (2.0 * s2));
  detail::set_symmetric(m, A, F0, kPi * a * x_sin2 / s2);
  detail::set_symmetric(m, A, F1, kPi * a * y_sin2 / s2);
  detail::set_symmetric(m, B, B, N2 / s2);
  detail::set_symmetric(m, B, Phi, a * cos1 / s2);
  detail::set_symmetric(m, B, F0, kTwoPi * a * x_cos1 / s2);
  detail::set_symmetric(m, B, F1, kTwoPi * a * y_cos1 / s2);
  detail::set_symmetric(m, Phi, Phi, a * a * (N2 + cos2) / (2.0 * s2));
  detail::set_symmetric(m, Phi, F0, kPi * a * a * x_1pc2 / s2);
  detail::set_symmetric(m, Phi, F1, kPi * a * a * y_1pc2 / s2);
  detail::set_symmetric(m, F0, F0, 2.0 * pi2 * a * a * xx_1pc2 / s2);
  detail::set_symmetric(m, F0, F1, 2.0 * pi2 * a * a * xy_1pc2 / s2);
  detail::set_symmetric(m, F1, F1, 2.0 * pi2 * a * a * yy_1pc2 / s2);
  return fm;
}

/// Inverse with a 1e12 condition-number guard.
inline Matrix<5> invert_fisher(const FisherMatrix& fm) {
  try {
    return checked_inverse(fm.entries, kFisherConditionLimit);
  } catch (const Error& e) {
    fail(ErrorKind::SingularMatrix, std::string("Fisher matrix is singular or ill-conditioned: ") + e.what());
  }
}

inline double fisher_determinant(const FisherMatrix& fm) { return LuDecomposition<5>(fm.entries).determinant(); }

/// pi^4 A^6 N^10 (N^2 - 1)^2 / (144 sigma^10).
inline double fisher_determinant_closed_form(double amplitude, double sigma, int n) {
  const double N = n;
  return std::pow(kPi, 4) * std::pow(amplitude, 6) * std::pow(N, 10) * std::pow(N * N - 1.0, 2) /
         (144.0 * std::pow(sigma, 10));
}

/// The asymptotic inverse written out entry by entry.
inline Matrix<5> inverse_fisher_closed_form(double amplitude, double sigma, int n) {
  const double N = n;
  const double A2 = amplitude * amplitude;
  const double scale = sigma * sigma / (N * N);
  Matrix<5> m{};
  using enum Param;
  detail::set_symmetric(m, A, A, 2.0 * scale);
  detail::set_symmetric(m, B, B, scale);
  detail::set_symmetric(m, Phi, Phi, scale * 2.0 * (7.0 * N - 5.0) / (A2 * (N + 1.0)));
  const double ff = scale * 6.0 / (kPi * kPi * A2 * (N * N - 1.0));
  detail::set_symmetric(m, F0, F0, ff);
  detail::set_symmetric(m, F1, F1, ff);
  const double pf = scale * -6.0 / (kPi * A2 * (N + 1.0));
  detail::set_symmetric(m, Phi, F0, pf);
  detail::set_symmetric(m, Phi, F1, pf);
  return m;
}

inline CrlbBounds crlb_closed_form(const ParamVector& theta, double sigma, int n) {
  if (!(theta.A > 0.0)) fail(ErrorKind::InvalidArgument, "amplitude A must be > 0 for the CRLB");
  detail::check_fisher_inputs(sigma, n);
  const double N = n;
  const double A2 = theta.A * theta.A;
  const double s2 = sigma * sigma;
  const double N2 = N * N;
  const double vf = 6.0 * s2 / (kPi * kPi * A2 * N2 * (N2 - 1.0));
  return {2.0 * s2 / N2, s2 / N2, 2.0 * (7.0 * N - 5.0) * s2 / (A2 * N2 * (N + 1.0)), vf, vf};
}

/// Diagonal of a numerically inverted Fisher matrix.
inline CrlbBounds crlb_from_inverse(const Matrix<5>& inv) {
  return {inv[0][0], inv[1][1], inv[2][2], inv[3][3], inv[4][4]};
}

}  // namespace sino2d
