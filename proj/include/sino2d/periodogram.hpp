#pragma once

// Zero-padded 2D periodogram |S(p/m, q/m)|^2 and the direct continuous-
// frequency transform it is checked against.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "sino2d/core.hpp"

namespace sino2d {

/// S(f0, f1) = sum_x sum_y s(x, y) e^{-2 pi i (f0 x + f1 y)}, summed directly.
/// Separable: the y sum is done per row, then combined along x.
inline std::complex<double> dft2_at(const GridSignal& signal, double f0, double f1) {
  const int n = signal.n();
  std::vector<std::complex<double>> ey(static_cast<std::size_t>(n));
  for (int y = 0; y < n; ++y) ey[y] = std::polar(1.0, -kTwoPi * f1 * y);
  std::complex<double> total{0.0, 0.0};
  const auto values = signal.values();
  for (int x = 0; x < n; ++x) {
    std::complex<double> row{0.0, 0.0};
    const double* r = values.data() + static_cast<std::size_t>(x) * n;
    for (int y = 0; y < n; ++y) row += r[y] * ey[y];
    total += row * std::polar(1.0, -kTwoPi * f0 * x);
  }
  return total;
}

/// Power on an m x m frequency grid, m = pad_factor * n. Row index p maps to
/// f0 = p/m, column index q to f1 = q/m.
class Periodogram {
 public:
  Periodogram(int n, int m, std::vector<double> power) : n_(n), m_(m), power_(std::move(power)) {}

  int n() const noexcept { return n_; }
  int m() const noexcept { return m_; }
  double operator()(int p, int q) const { return power_[static_cast<std::size_t>(p) * m_ + q]; }
  double bin_frequency(int index) const { return static_cast<double>(index) / m_; }
  const std::vector<double>& power() const noexcept { return power_; }

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<double> power_;
};

namespace detail {

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_alloc(std::size_t count) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * count));
  if (!p) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

// FFTW's planner is not thread-safe; plan execution through the new-array
// interface is. Plans are created once per size under a lock and reused.
// All buffers come from fftw_malloc so every execution sees the alignment
// the plan was made for.
inline fftw_plan r2c_plan(int m) {
  static std::mutex mutex;
  static std::map<int, fftw_plan> plans;
  std::lock_guard lock(mutex);
  if (auto it = plans.find(m); it != plans.end()) return it->second;
  const std::size_t mm = static_cast<std::size_t>(m) * m;
  auto in = fftw_alloc<double>(mm);
  auto out = fftw_alloc<fftw_complex>(static_cast<std::size_t>(m) * (m / 2 + 1));
  fftw_plan plan = fftw_plan_dft_r2c_2d(m, m, in.get(), out.get(), FFTW_ESTIMATE);
  if (!plan) fail(ErrorKind::InvalidArgument, "FFTW could not plan the transform");
  plans.emplace(m, plan);
  return plan;
}

}  // namespace detail

inline Periodogram periodogram(const GridSignal& signal, int pad_factor) {
  if (pad_factor < 1) fail(ErrorKind::InvalidArgument, "pad factor must be >= 1");
  const int n = signal.n();
  const int m = pad_factor * n;
  const int half = m / 2 + 1;
  const std::size_t mm = static_cast<std::size_t>(m) * m;

  auto in = detail::fftw_alloc<double>(mm);
  auto out = detail::fftw_alloc<fftw_complex>(static_cast<std::size_t>(m) * half);
  std::fill(in.get(), in.get() + mm, 0.0);
  const auto values = signal.values();
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) in[static_cast<std::size_t>(x) * m + y] = values[static_cast<std::size_t>(x) * n + y];
  }
  fftw_execute_dft_r2c(detail::r2c_plan(m), in.get(), out.get());

  std::vector<double> power(mm);
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < half; ++q) {
      const fftw_complex& c = out[static_cast<std::size_t>(p) * half + q];
      power[static_cast<std::size_t>(p) * m + q] = c[0] * c[0] + c[1] * c[1];
    }
  }
  // Real input: |S(p, q)| = |S(-p mod m, -q mod m)|.
  for (int p = 0; p < m; ++p) {
    for (int q = half; q < m; ++q) {
      const int pp = (m - p) % m;
      const int qq = m - q;
      power[static_cast<std::size_t>(p) * m + q] = power[static_cast<std::size_t>(pp) * m + qq];
    }
  }
  return Periodogram(n, m, std::move(power));
}

}  // namespace sino2d
