#pragma once

#include <array>
#include <functional>
#include <optional>

namespace sphwave::ode {

using Vec2 = std::array<double, 2>;

// Right side; an empty optional marks a point where the field is undefined.
using Rhs = std::function<std::optional<Vec2>(double x, const Vec2& y)>;

// Fourth-order continuous extension of one Dormand-Prince step.
struct DenseStep {
  double x0 = 0.0;
  double h = 0.0;
  std::array<Vec2, 5> r{};

  Vec2 at_theta(double theta) const;
  Vec2 at(double x) const { return at_theta((x - x0) / h); }
  Vec2 y0() const { return r[0]; }
  Vec2 y1() const { return at_theta(1.0); }
};

struct Tolerance {
  double rtol = 1e-10;
  Vec2 atol{1e-14, 1e-14};
};

struct StepOutcome {
  bool rhs_failed = false;  // some stage hit an undefined point
  double err = 0.0;         // scaled error norm; accept when <= 1
  Vec2 y1{};
  Vec2 k_end{};  // derivative at the new point (first-same-as-last)
  DenseStep dense;
};

// One Dormand-Prince 5(4) trial step from (x, y) with derivative k1.
StepOutcome dp45_step(const Rhs& f, double x, const Vec2& y, const Vec2& k1, double h,
                      const Tolerance& tol);

// Step size factor from an error norm, clamped to [0.2, 5].
double step_factor(double err);

}  // namespace sphwave::ode
