#pragma once

// Fixed-size dense matrices and an LU factorization with partial pivoting.
// Sized for the 3x3 normal equations and the 5x5 Fisher matrix; no structure
// is exploited.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "sino2d/error.hpp"

namespace sino2d {

template <std::size_t N>
using Vector = std::array<double, N>;

template <std::size_t N>
using Matrix = std::array<std::array<double, N>, N>;

template <std::size_t N>
Matrix<N> identity() {
  Matrix<N> m{};
  for (std::size_t i = 0; i < N; ++i) m[i][i] = 1.0;
  return m;
}

template <std::size_t N>
Matrix<N> multiply(const Matrix<N>& a, const Matrix<N>& b) {
  Matrix<N> c{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < N; ++k)
      for (std::size_t j = 0; j < N; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

template <std::size_t N>
Vector<N> multiply(const Matrix<N>& a, const Vector<N>& v) {
  Vector<N> r{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) r[i] += a[i][j] * v[j];
  return r;
}

/// Maximum absolute column sum.
template <std::size_t N>
double norm1(const Matrix<N>& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += std::abs(a[i][j]);
    best = std::max(best, s);
  }
  return best;
}

/// PA = LU with unit-diagonal L stored below the diagonal of `lu`.
template <std::size_t N>
class LuDecomposition {
 public:
  explicit LuDecomposition(const Matrix<N>& a) : lu_(a) {
    for (std::size_t i = 0; i < N; ++i) perm_[i] = i;
    for (std::size_t col = 0; col < N; ++col) {
      std::size_t pivot = col;
      double best = std::abs(lu_[col][col]);
      for (std::size_t r = col + 1; r < N; ++r) {
        if (std::abs(lu_[r][col]) > best) {
          best = std::abs(lu_[r][col]);
          pivot = r;
        }
      }
      if (best == 0.0 || !std::isfinite(best)) {
        singular_ = true;
        continue;
      }
      if (pivot != col) {
        std::swap(lu_[pivot], lu_[col]);
        std::swap(perm_[pivot], perm_[col]);
        sign_ = -sign_;
      }
      for (std::size_t r = col + 1; r < N; ++r) {
        const double factor = lu_[r][col] / lu_[col][col];
        lu_[r][col] = factor;
        for (std::size_t c = col + 1; c < N; ++c) lu_[r][c] -= factor * lu_[col][c];
      }
    }
  }

  bool singular() const noexcept { return singular_; }

  double determinant() const {
    if (singular_) return 0.0;
    double det = sign_;
    for (std::size_t i = 0; i < N; ++i) det *= lu_[i][i];
    return det;
  }

  Vector<N> solve(const Vector<N>& b) const {
    if (singular_) fail(ErrorKind::SingularMatrix, "matrix is singular");
    Vector<N> x{};
    for (std::size_t i = 0; i < N; ++i) {
      double s = b[perm_[i]];
      for (std::size_t j = 0; j < i; ++j) s -= lu_[i][j] * x[j];
      x[i] = s;
    }
    for (std::size_t i = N; i-- > 0;) {
      double s = x[i];
      for (std::size_t j = i + 1; j < N; ++j) s -= lu_[i][j] * x[j];
      x[i] = s / lu_[i][i];
    }
    return x;
  }

  Matrix<N> inverse() const {
    Matrix<N> inv{};
    for (std::size_t j = 0; j < N; ++j) {
      Vector<N> e{};
      e[j] = 1.0;
      const Vector<N> col = solve(e);
      for (std::size_t i = 0; i < N; ++i) inv[i][j] = col[i];
    }
    return inv;
  }

 private:
  Matrix<N> lu_;
  std::array<std::size_t, N> perm_{};
  double sign_ = 1.0;
  bool singular_ = false;
};

/// Inverts `a`, failing with SingularMatrix when it is exactly singular or its
/// 1-norm condition number exceeds `max_condition`.
template <std::size_t N>
Matrix<N> checked_inverse(const Matrix<N>& a, double max_condition, double* condition_out = nullptr) {
  const LuDecomposition<N> lu(a);
  if (lu.singular()) fail(ErrorKind::SingularMatrix, "matrix is singular");
  const Matrix<N> inv = lu.inverse();
  const double cond = norm1(a) * norm1(inv);
  if (condition_out) *condition_out = cond;
  if (!std::isfinite(cond) || cond > max_condition) {
    fail(ErrorKind::SingularMatrix, "matrix condition number " + std::to_string(cond) + " exceeds limit");
  }
  return inv;
}

}  // namespace sino2d
