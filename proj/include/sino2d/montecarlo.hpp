#pragma once

// Seeded Monte Carlo harness: synthesize -> add noise -> estimate, repeated,
// then per-parameter bias and variance against the closed-form CRLB.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sino2d/core.hpp"
#include "sino2d/estimator.hpp"
#include "sino2d/fisher.hpp"

namespace sino2d {

struct McConfig {
  ParamVector theta_true;
  double sigma = 0.0;
  int n = 32;
  int trials = 2;
  std::uint64_t base_seed = 0;
  int pad_factor = kDefaultPadFactor;
  std::optional<double> dc_exclusion{};
};

struct ParamStats {
  double mean = 0.0;        ///< mean estimate (phase: truth + wrapped mean error)
  double bias = 0.0;        ///< mean of param_distance(estimate, truth)
  double variance = 0.0;    ///< unbiased, divisor (count - 1)
  double crlb = 0.0;
  double efficiency = 0.0;  ///< variance / crlb; NaN when the CRLB is 0 (sigma = 0)

  // NaN efficiencies compare equal so that determinism checks work at sigma = 0.
  friend bool operator==(const ParamStats& a, const ParamStats& b) {
    auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    return same(a.mean, b.mean) && same(a.bias, b.bias) && same(a.variance, b.variance) && same(a.crlb, b.crlb) &&
           same(a.efficiency, b.efficiency);
  }
};

struct McSummary {
  std::array<ParamStats, kParamCount> params{};
  int trials = 0;
  int failures = 0;
  ParamError noiseless_error{};  ///< estimate(clean) - truth, the systematic part of the bias
  int j_checks = 0;              ///< trials where J(theta_hat) was compared to J(theta_true)
  int j_violations = 0;

  friend bool operator==(const McSummary&, const McSummary&) = default;
};

inline constexpr double kMaxFailureFraction = 0.10;
inline constexpr int kJCheckStride = 100;  // 1% of trials

/// Explicit request, else $SINO2D_THREADS, else the hardware concurrency.
inline unsigned resolve_threads(unsigned requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SINO2D_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline void validate(const McConfig& cfg) {
  if (cfg.trials < 2) fail(ErrorKind::InvalidArgument, "trials must be >= 2");
  if (!(cfg.sigma >= 0.0) || !std::isfinite(cfg.sigma)) fail(ErrorKind::InvalidArgument, "noise sigma must be >= 0");
  if (cfg.pad_factor < 1) fail(ErrorKind::InvalidArgument, "pad factor must be >= 1");
  if (cfg.dc_exclusion && !(*cfg.dc_exclusion > 0.0)) fail(ErrorKind::InvalidArgument, "dc exclusion radius must be > 0");
  validate_guarded(cfg.theta_true, cfg.n);
  if (canonicalize(cfg.theta_true).second) {
    fail(ErrorKind::InvalidArgument, "theta_true must be canonical (f0 < 1/2)");
  }
}

namespace detail {

struct TrialOutcome {
  ParamError error{};
  bool failed = false;
  bool j_checked = false;
  bool j_violated = false;
};

inline TrialOutcome run_trial(const McConfig& cfg, const GridSignal& clean, int t) {
  const EstimateOptions opt{.pad_factor = cfg.pad_factor, .dc_exclusion = cfg.dc_exclusion};
  const GridSignal noisy = add_noise(clean, {cfg.sigma, derive_seed(cfg.base_seed, static_cast<std::uint64_t>(t))});
  TrialOutcome out;
  try {
    const EstimationResult r = estimate(noisy, opt);
    out.error = param_distance(r.theta_hat, cfg.theta_true);
    if (t % kJCheckStride == 0) {
      out.j_checked = true;
      const double slack = 1e-9 * static_cast<double>(cfg.n) * cfg.n;
      out.j_violated = squared_error(noisy, r.theta_hat) > squared_error(noisy, cfg.theta_true) + slack;
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NonConvergence && e.kind() != ErrorKind::EmptySearchRegion) throw;
    out.failed = true;
  }
  return out;
}

}  // namespace detail

/// Runs cfg.trials independent trials; trial t uses noise seed
/// derive_seed(base_seed, t). The summary is bit-identical for any thread count.
inline McSummary run_trials(const McConfig& cfg, unsigned threads = 0) {
  validate(cfg);
  const GridSignal clean = synthesize(cfg.theta_true, cfg.n);
  std::vector<detail::TrialOutcome> outcomes(static_cast<std::size_t>(cfg.trials));

  const unsigned workers = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(cfg.trials));
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      for (int t = next++; t < cfg.trials; t = next++) outcomes[static_cast<std::size_t>(t)] = detail::run_trial(cfg, clean, t);
    } catch (...) {
      errors[w] = std::current_exception();
      next = cfg.trials;
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  McSummary s;
  s.trials = cfg.trials;
  for (const auto& o : outcomes) {
    s.failures += o.failed ? 1 : 0;
    s.j_checks += o.j_checked ? 1 : 0;
    s.j_violations += o.j_violated ? 1 : 0;
  }
  if (s.failures > kMaxFailureFraction * cfg.trials) {
    fail(ErrorKind::TooManyFailures, std::to_string(s.failures) + " of " + std::to_string(cfg.trials) +
                                         " trials failed (limit 10%)");
  }
  const int used = cfg.trials - s.failures;
  if (used < 2) fail(ErrorKind::TooManyFailures, "fewer than two successful trials");

  const EstimateOptions opt{.pad_factor = cfg.pad_factor, .dc_exclusion = cfg.dc_exclusion};
  s.noiseless_error = param_distance(estimate(clean, opt).theta_hat, cfg.theta_true);

  // Zero sigma has a zero bound; the closed form rejects it, so special-case.
  CrlbBounds bounds{};
  if (cfg.sigma > 0.0) bounds = crlb_closed_form(cfg.theta_true, cfg.sigma, cfg.n);

  for (std::size_t i = 0; i < kParamCount; ++i) {
    double sum = 0.0;
    for (const auto& o : outcomes) {
      if (!o.failed) sum += o.error[i];
    }
    const double bias = sum / used;
    double ss = 0.0;
    for (const auto& o : outcomes) {
      if (!o.failed) ss += (o.error[i] - bias) * (o.error[i] - bias);
    }
    ParamStats& p = s.params[i];
    p.bias = bias;
    p.variance = ss / (used - 1);
    p.mean = i == static_cast<std::size_t>(Param::Phi) ? wrap_phase(get(cfg.theta_true, i) + bias)
                                                       : get(cfg.theta_true, i) + bias;
    p.crlb = bounds[i];
    p.efficiency = p.crlb > 0.0 ? p.variance / p.crlb : std::nan("");
  }
  return s;
}

struct SweepEntry {
  std::optional<McSummary> summary;
  std::optional<ErrorKind> error_kind;
  std::string error;
};

/// run_trials per config, in order. A failing config records its error and
/// the sweep continues.
inline std::vector<SweepEntry> sweep(const std::vector<McConfig>& cfgs, unsigned threads = 0) {
  std::vector<SweepEntry> out;
  out.reserve(cfgs.size());
  for (const auto& cfg : cfgs) {
    SweepEntry entry;
    try {
      entry.summary = run_trials(cfg, threads);
    } catch (const Error& e) {
      entry.error_kind = e.kind();
      entry.error = e.what();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace sino2d
