#include "sphwave/ode.hpp"

#include <algorithm>
#include <cmath>

namespace sphwave::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output coefficients.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace

Vec2 DenseStep::at_theta(double theta) const {
  double t1 = 1.0 - theta;
  Vec2 out;
  for (int i = 0; i < 2; ++i) {
    out[i] = r[0][i] + theta * (r[1][i] + t1 * (r[2][i] + theta * (r[3][i] + t1 * r[4][i])));
  }
  return out;
}

double step_factor(double err) {
  if (err == 0.0) return 5.0;
  return std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
}

StepOutcome dp45_step(const Rhs& f, double x, const Vec2& y, const Vec2& k1, double h,
                      const Tolerance& tol) {
  StepOutcome out;
  auto comb = [&](std::initializer_list<std::pair<double, const Vec2*>> terms) {
    Vec2 v = y;
    for (auto& [c, k] : terms) {
      v[0] += h * c * (*k)[0];
      v[1] += h * c * (*k)[1];
    }
    return v;
  };
  auto call = [&](double xs, const Vec2& ys, Vec2& k) {
    auto r = f(xs, ys);
    if (!r || !std::isfinite((*r)[0]) || !std::isfinite((*r)[1])) return false;
    k = *r;
    return true;
  };
  Vec2 k2, k3, k4, k5, k6, k7;
  if (!call(x + c2 * h, comb({{a21, &k1}}), k2) ||
      !call(x + c3 * h, comb({{a31, &k1}, {a32, &k2}}), k3) ||
      !call(x + c4 * h, comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}), k4) ||
      !call(x + c5 * h, comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}), k5) ||
      !call(x + h, comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}), k6)) {
    out.rhs_failed = true;
    return out;
  }
  Vec2 y1 = comb({{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
  if (!call(x + h, y1, k7)) {
    out.rhs_failed = true;
    return out;
  }
  double acc = 0.0;
  for (int i = 0; i < 2; ++i) {
    double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    double sc = tol.atol[i] + tol.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
    acc += (e / sc) * (e / sc);
  }
  out.err = std::sqrt(acc / 2.0);
  out.y1 = y1;
  out.k_end = k7;
  DenseStep& d = out.dense;
  d.x0 = x;
  d.h = h;
  for (int i = 0; i < 2; ++i) {
    double ydiff = y1[i] - y[i];
    double bspl = h * k1[i] - ydiff;
    d.r[0][i] = y[i];
    d.r[1][i] = ydiff;
    d.r[2][i] = bspl;
    d.r[3][i] = ydiff - h * k7[i] - bspl;
    d.r[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
  }
  return out;
}

}  // namespace sphwave::ode
