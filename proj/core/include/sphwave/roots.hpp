#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sphwave/errors.hpp"

namespace sphwave::roots {

inline int sign(double v) { return (v > 0) - (v < 0); }

// Bisection on [a, b] with f(a), f(b) of opposite sign (or zero).
// Stops when the bracket is narrower than rel_tol * max(|a|, |b|, scale_floor).
template <class F>
double bisect(F&& f, double a, double b, double fa, double fb,
              double rel_tol = 1e-13, double scale_floor = 0.0,
              int max_iter = 400) {
  if (fa == 0) return a;
  if (fb == 0) return b;
  if (sign(fa) == sign(fb)) {
    throw RootNotBracketed("bisect: f has the same sign at both ends [" +
                           std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  for (int it = 0; it < max_iter; ++it) {
    double m = 0.5 * (a + b);
    double width = std::abs(b - a);
    double scale = std::max({std::abs(a), std::abs(b), scale_floor});
    if (width <= rel_tol * scale || m == a || m == b) break;
    double fm = f(m);
    if (fm == 0) return m;
    if (sign(fm) == sign(fa)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  // Return the endpoint with the smaller residual.
  return std::abs(fa) <= std::abs(fb) ? a : b;
}

template <class F>
double bisect(F&& f, double a, double b, double rel_tol = 1e-13,
              double scale_floor = 0.0) {
  return bisect(f, a, b, f(a), f(b), rel_tol, scale_floor);
}

// Geometric grid of n points on [lo, hi], lo > 0.
inline std::vector<double> geomspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  double r = std::log(hi / lo);
  for (int i = 0; i < n; ++i) g[i] = lo * std::exp(r * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  g.front() = lo;
  g.back() = hi;
  return g;
}

// All sign-change brackets of f over a sorted grid, each bisected.
template <class F>
std::vector<double> all_roots(F&& f, const std::vector<double>& grid,
                              double rel_tol = 1e-13) {
  std::vector<double> out;
  if (grid.empty()) return out;
  double xa = grid[0], fa = f(xa);
  if (fa == 0) out.push_back(xa);
  for (size_t i = 1; i < grid.size(); ++i) {
    double xb = grid[i], fb = f(xb);
    if (fb == 0) {
      out.push_back(xb);
    } else if (fa != 0 && sign(fa) != sign(fb)) {
      out.push_back(bisect(f, xa, xb, fa, fb, rel_tol));
    }
    xa = xb;
    fa = fb;
  }
  return out;
}

}  // namespace sphwave::roots
