#pragma once

// Derivative-free minimization over a 2D box (Nelder & Mead 1965), standard
// coefficients: reflect 1, expand 2, contract 1/2, shrink 1/2. Trial points
// are clamped into the box.

#include <algorithm>
#include <array>
#include <cmath>

namespace sino2d {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Box2 {
  Point2 lo;
  Point2 hi;

  Point2 clamp(Point2 p) const { return {std::clamp(p.x, lo.x, hi.x), std::clamp(p.y, lo.y, hi.y)}; }
};

struct NelderMeadResult {
  Point2 best;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct NelderMeadOptions {
  double step = 0.0;        ///< initial simplex edge length on each axis
  double x_tolerance = 0.0; ///< stop once every vertex is this close to the best (max-norm)
  int max_iterations = 200;
};

/// Minimizes `fn` from `start`. The returned value never exceeds fn(start).
template <typename Fn>
NelderMeadResult nelder_mead(Fn&& fn, Point2 start, const Box2& box, const NelderMeadOptions& opt) {
  struct Vertex {
    Point2 p;
    double v;
  };
  auto eval = [&](Point2 p) {
    p = box.clamp(p);
    return Vertex{p, fn(p)};
  };

  const Point2 s = box.clamp(start);
  std::array<Vertex, 3> simplex = {Vertex{s, fn(s)}, eval({s.x + opt.step, s.y}), eval({s.x, s.y + opt.step})};

  auto order = [&] {
    // stable so that ties keep the earlier vertex (the start) in front
    std::stable_sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.v < b.v; });
  };
  auto spread = [&] {
    double d = 0.0;
    for (int i = 1; i < 3; ++i) {
      d = std::max({d, std::abs(simplex[i].p.x - simplex[0].p.x), std::abs(simplex[i].p.y - simplex[0].p.y)});
    }
    return d;
  };

  order();
  NelderMeadResult result;
  for (int it = 0; it < opt.max_iterations; ++it) {
    if (spread() < opt.x_tolerance) {
      result.converged = true;
      result.iterations = it;
      break;
    }
    result.iterations = it + 1;

    const Vertex& best = simplex[0];
    const Vertex& second = simplex[1];
    const Vertex worst = simplex[2];
    const Point2 centroid{(best.p.x + second.p.x) / 2.0, (best.p.y + second.p.y) / 2.0};
    auto along = [&](double t) {
      return Point2{centroid.x + t * (worst.p.x - centroid.x), centroid.y + t * (worst.p.y - centroid.y)};
    };

    const Vertex reflected = eval(along(-1.0));
    if (reflected.v < best.v) {
      const Vertex expanded = eval(along(-2.0));
      simplex[2] = expanded.v < reflected.v ? expanded : reflected;
    } else if (reflected.v < second.v) {
      simplex[2] = reflected;
    } else {
      const bool outside = reflected.v < worst.v;
      const Vertex contracted = eval(along(outside ? -0.5 : 0.5));
      if (contracted.v < (outside ? reflected.v : worst.v)) {
        simplex[2] = contracted;
      } else {
        for (int i = 1; i < 3; ++i) {
          simplex[i] = eval({best.p.x + 0.5 * (simplex[i].p.x - best.p.x), best.p.y + 0.5 * (simplex[i].p.y - best.p.y)});
        }
      }
    }
    order();
  }
  if (!result.converged && spread() < opt.x_tolerance) result.converged = true;
  result.best = simplex[0].p;
  result.value = simplex[0].v;
  return result;
}

}  // namespace sino2d
