// Synthesizes a noisy 2D sinusoid, estimates its parameters and prints them
// next to the truth and the Cramer-Rao standard deviations.

#include <cmath>
#include <cstdio>

#include "sino2d/sino2d.hpp"

int main() {
  const sino2d::ParamVector truth{.A = 1.0, .B = 5.0, .phi = 1.0, .f0 = 0.2, .f1 = 0.3};
  const int n = 32;
  const double sigma = 0.1;

  const auto noisy = sino2d::add_noise(sino2d::synthesize(truth, n), {.sigma = sigma, .seed = 7});
  const auto result = sino2d::estimate(noisy);
  const auto bounds = sino2d::crlb_closed_form(truth, sigma, n);

  std::printf("%-4s %12s %12s %12s\n", "", "truth", "estimate", "crlb std");
  for (std::size_t i = 0; i < sino2d::kParamCount; ++i) {
    std::printf("%-4s %12.6f %12.6f %12.3e\n", sino2d::kParamNames[i], sino2d::get(truth, i),
                sino2d::get(result.theta_hat, i), std::sqrt(bounds[i]));
  }
  std::printf("refinement iterations: %d\n", result.refine_iterations);
}
