#include "sphwave/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace sphwave {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

struct Tracker {
  CheckRecord rec;
  Tracker(std::string name, double tol) {
    rec.name = std::move(name);
    rec.tolerance = tol;
  }
  // Records a residual that must stay at or below the tolerance.
  void residual(double r, double s, const std::string& what) {
    if (!std::isfinite(r)) r = std::numeric_limits<double>::infinity();
    if (r > rec.max_residual) {
      rec.max_residual = r;
      rec.at_s = s;
    }
    if (!(r <= rec.tolerance)) fail(what + " residual " + fmt(r) + " at s = " + fmt(s));
  }
  void fail(const std::string& what) {
    rec.pass = false;
    rec.findings.push_back(what);
  }
  void note(const std::string& what) { rec.findings.push_back(what); }
};

double sound_speed0(const WaveSolution& sol) {
  try {
    return sound_speed_rho(sol.eos, sol.rho0);
  } catch (const Error&) {
    return 0.0;
  }
}

constexpr double kMinGap = 1e-9;
constexpr double kFieldFloor = 1e-3;
constexpr size_t kStencil = 7;

double rel_diff(double a, double b, double scale) { return std::abs(a - b) / scale; }

// State mismatch relative to the far-field scales.
double state_gap(const WaveSolution& sol, const State& a, const State& b) {
  double us = std::abs(sol.u0) + sound_speed0(sol);
  if (!(us > 0)) us = 1.0;
  return std::max(rel_diff(a.u, b.u, us), rel_diff(a.rho, b.rho, sol.rho0));
}

// Derivative at xs[i] of the Lagrange interpolant through (xs[k], ys[k]).
double lagrange_slope(const std::vector<double>& xs, const std::vector<double>& ys, size_t i) {
  double d = 0.0;
  const size_t n = xs.size();
  for (size_t j = 0; j < n; ++j) {
    double w;
    if (j == i) {
      w = 0.0;
      for (size_t k = 0; k < n; ++k) {
        if (k != i) w += 1.0 / (xs[i] - xs[k]);
      }
    } else {
      double num = 1.0, den = 1.0;
      for (size_t k = 0; k < n; ++k) {
        if (k == j) continue;
        den *= xs[j] - xs[k];
        if (k != i) num *= xs[i] - xs[k];
      }
      w = num / den;
    }
    d += w * ys[j];
  }
  return d;
}

}  // namespace

bool AuditReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

nlohmann::json AuditReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["verdict"] = pass() ? "pass" : "fail";
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name},
                           {"max_residual", std::isfinite(c.max_residual) ? nlohmann::json(c.max_residual)
                                                                          : nlohmann::json("inf")},
                           {"at_s", c.at_s},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass},
                           {"findings", c.findings}});
  }
  return j;
}

CheckRecord audit_rh(const WaveSolution& sol, const AuditTolerances& tol) {
  Tracker t("rankine_hugoniot", tol.rh);
  for (const auto& sh : sol.shocks) {
    const State& a = sh.front;
    const State& b = sh.back;
    double sigma = sh.sigma;
    double pa, pb;
    try {
      pa = sol.eos.p(a.tau());
      pb = sol.eos.p(b.tau());
    } catch (const Error& e) {
      t.fail(std::string("shock state outside the law's domain: ") + e.what());
      continue;
    }
    double ma = a.rho * a.u, mb = b.rho * b.u;
    double fa = ma * a.u + pa, fb = mb * b.u + pb;
    double r1 = sigma * (b.rho - a.rho) - (mb - ma);
    double r2 = sigma * (mb - ma) - (fb - fa);
    double sc1 = std::abs(sigma) * (a.rho + b.rho) + std::abs(ma) + std::abs(mb);
    double sc2 = std::abs(sigma) * (std::abs(ma) + std::abs(mb)) + std::abs(fa) + std::abs(fb);
    t.residual(std::abs(r1) / sc1, sh.s, "mass jump");
    t.residual(std::abs(r2) / sc2, sh.s, "momentum jump");
    t.residual(std::abs(sigma * sh.s - 1.0), sh.s, "shock speed against its position");
  }
  return t.rec;
}

CheckRecord audit_entropy(const WaveSolution& sol, const AuditTolerances& tol) {
  Tracker t("entropy", tol.entropy);
  t.rec.max_residual = 0.0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& sh : sol.shocks) {
    double t1 = sh.front.tau(), t2 = sh.back.tau();
    bool compressive = t2 < t1;
    if (compressive != (sh.kind == ShockKind::Compression)) {
      t.fail("shock at s = " + fmt(sh.s) + " is labelled " + to_string(sh.kind) + " but its volumes say otherwise");
    }
    EntropyResult e;
    try {
      e = entropy_E(sol.eos, sh.front, t2, tol.entropy_grid);
    } catch (const Error& err) {
      t.fail(std::string("entropy test undefined: ") + err.what());
      continue;
    }
    if (e.margin < worst) {
      worst = e.margin;
      t.rec.at_s = sh.s;
    }
    if (!(e.margin >= tol.entropy)) t.fail("entropy margin " + fmt(e.margin) + " at s = " + fmt(sh.s));
    if (std::abs(e.margin) < kEntropyEps) t.note("boundary-admissible shock at s = " + fmt(sh.s));
  }
  // Reported as the most negative margin, zero when none is negative.
  t.rec.max_residual = std::isfinite(worst) ? std::max(0.0, -worst) : 0.0;
  return t.rec;
}

CheckRecord audit_ode(const WaveSolution& sol, const AuditTolerances& tol) {
  Tracker t("ode_residual", tol.ode);
  const EosSpec& eos = sol.eos;
  for (const auto& seg : sol.segments) {
    switch (seg.kind) {
      case SegmentKind::ConstantState:
        if (seg.state.u != 0.0) t.fail("constant state with u != 0 on [" + fmt(seg.s_begin) + ", " + fmt(seg.s_end) + "]");
        break;
      case SegmentKind::Vacuum:
        if (seg.state.rho != 0.0) t.fail("vacuum segment with rho != 0");
        break;
      case SegmentKind::PressurePlateau: {
        const auto& pp = seg.plateau;
        const auto& L = eos.landmarks();
        if (!eos.has_plateau()) {
          t.fail("plateau segment on a law without a plateau");
          break;
        }
        for (int k = 0; k <= 100; ++k) {
          double s = seg.s_begin + (seg.s_end - seg.s_begin) * k / 100.0;
          double q = (1.0 - pp.u * s) / (1.0 - pp.u * pp.s_start);
          double rho = pp.rho_start * q * q;
          State st = seg.state_at(s);
          t.residual(std::abs(st.rho - rho) / rho, s, "plateau closed form");
          double tau = 1.0 / rho;
          double band = 1e-9 * *L.taut2;
          if (tau < *L.taut1 - band || tau > *L.taut2 + band) {
            t.fail("plateau state leaves the plateau at s = " + fmt(s));
            break;
          }
        }
        break;
      }
      case SegmentKind::SmoothArc: {
        const auto& S = seg.samples;
        if (S.size() < 2) {
          t.fail("arc with fewer than two samples");
          break;
        }
        // Coordinates (s/ks, u/ku, ln rho) with ks, ku the largest magnitudes on the arc.
        auto magnitude = [&](auto get) {
          double m = 0.0;
          for (const auto& p : S) m = std::max(m, std::abs(get(p)));
          return m > 0 ? m : 1.0;
        };
        double ks = magnitude([](const SelfSimilarPoint& p) { return p.s; });
        double ku = magnitude([](const SelfSimilarPoint& p) { return p.state.u; });
        double kl = 1.0;
        // Cumulative scaled chord length; samples closer than kMinGap to the last kept
        // one are dropped so rounding noise does not dominate the differences.
        const size_t w = kStencil;
        std::vector<size_t> keep{0};
        std::vector<double> lam{0.0};
        for (size_t i = 1; i < S.size(); ++i) {
          const auto& q = S[keep.back()];
          double ds = (S[i].s - q.s) / ks;
          double du = (S[i].state.u - q.state.u) / ku;
          double dl = (std::log(S[i].state.rho) - std::log(q.state.rho)) / kl;
          double d = std::sqrt(ds * ds + du * du + dl * dl);
          if (d < kMinGap) continue;
          keep.push_back(i);
          lam.push_back(lam.back() + d);
        }
        const size_t n = keep.size();
        if (n < w) {
          t.note("arc on [" + fmt(seg.s_begin) + ", " + fmt(seg.s_end) + "] too short for a residual");
          break;
        }
        // Field (D, 2 c^2 u s, 2 u (1 - u s)) in the scaled coordinates.
        std::vector<std::array<double, 3>> V(n);
        double v_max = 0.0;
        for (size_t i = 0; i < n; ++i) {
          const auto& p = S[keep[i]];
          double s = p.s, u = p.state.u, tau = p.state.tau();
          double c2 = -tau * tau * eos.eval(tau).dp;
          double one = 1.0 - u * s;
          V[i] = {(s * s * c2 - one * one) / ks, 2.0 * c2 * u * s / ku, 2.0 * u * one / kl};
          v_max = std::max(v_max, std::hypot(V[i][0], V[i][1], V[i][2]));
        }
        for (size_t i = 1; i + 1 < n; ++i) {
          size_t a = i < w / 2 ? 0 : std::min(i - w / 2, n - w);
          std::vector<double> xs(lam.begin() + a, lam.begin() + a + w), ys(w), yu(w), yl(w);
          for (size_t k = 0; k < w; ++k) {
            const auto& q = S[keep[a + k]];
            ys[k] = q.s / ks;
            yu[k] = q.state.u / ku;
            yl[k] = std::log(q.state.rho) / kl;
          }
          size_t c = i - a;
          double T[3] = {lagrange_slope(xs, ys, c), lagrange_slope(xs, yu, c), lagrange_slope(xs, yl, c)};
          const auto& v = V[i];
          double cx = T[1] * v[2] - T[2] * v[1];
          double cy = T[2] * v[0] - T[0] * v[2];
          double cz = T[0] * v[1] - T[1] * v[0];
          double nt = std::hypot(T[0], T[1], T[2]);
          // The angle is ill-conditioned where the field vanishes (quiet and vacuum
          // corners), so its norm is floored at a fraction of the arc maximum.
          double nv = std::max(std::hypot(v[0], v[1], v[2]), kFieldFloor * v_max);
          double sine = std::hypot(cx, cy, cz) / (nt * nv);
          t.residual(sine, S[keep[i]].s, "direction field");
        }
        break;
      }
    }
  }
  return t.rec;
}

CheckRecord audit_boundary(const WaveSolution& sol, const AuditTolerances& tol) {
  Tracker t("boundary", tol.far_field);
  if (sol.segments.empty()) {
    t.fail("empty solution");
    return t.rec;
  }
  const Segment& first = sol.segments.front();
  if (first.s_begin != 0.0) t.fail("first segment starts at s = " + fmt(first.s_begin));
  State a = first.begin_state();
  t.residual(state_gap(sol, a, State{sol.u0, sol.rho0}), first.s_begin, "far field");

  const Segment& last = sol.segments.back();
  const double s_max = sol.controls.ode.s_max;
  const double c0 = sound_speed0(sol);
  switch (last.kind) {
    case SegmentKind::ConstantState: {
      // c0 vanishes on the plateau; fall back to an absolute bound there.
      double scale = std::abs(sol.u0) + c0;
      double r = std::abs(last.state.u) / (scale > 0 ? scale : 1.0);
      if (!(r <= tol.quiet_u)) t.fail("terminal constant state is not quiet, |u| = " + fmt(last.state.u));
      break;
    }
    case SegmentKind::Vacuum:
      if (last.state.rho != 0.0) t.fail("terminal vacuum with rho = " + fmt(last.state.rho));
      break;
    case SegmentKind::SmoothArc:
    case SegmentKind::PressurePlateau: {
      if (last.s_end < s_max * (1.0 - 1e-12)) {
        t.fail("solution ends at s = " + fmt(last.s_end) + " before the horizon without a quiet state or vacuum");
        break;
      }
      State e = last.end_state();
      double flux = std::abs(e.u * e.rho) / std::max(std::abs(sol.u0) * sol.rho0, 1e-300);
      if (!(flux <= tol.boundary_flux)) t.fail("centre flux |u rho| = " + fmt(std::abs(e.u * e.rho)) + " at the horizon");
      break;
    }
  }
  return t.rec;
}

CheckRecord audit_structure(const WaveSolution& sol, const AuditTolerances& tol) {
  Tracker t("structure", tol.junction);
  const auto& segs = sol.segments;
  if (segs.empty()) {
    t.fail("empty solution");
    return t.rec;
  }
  double s_max = sol.controls.ode.s_max;
  if (std::abs(segs.back().s_end - s_max) > 1e-12 * s_max) {
    t.fail("segments end at s = " + fmt(segs.back().s_end) + ", expected " + fmt(s_max));
  }
  std::vector<bool> used(sol.shocks.size(), false);
  for (size_t i = 0; i < segs.size(); ++i) {
    const Segment& g = segs[i];
    if (!(g.s_end > g.s_begin)) t.fail("segment " + std::to_string(i) + " has an empty range");
    if (g.kind == SegmentKind::SmoothArc) {
      for (size_t k = 1; k < g.samples.size(); ++k) {
        if (!(g.samples[k].s > g.samples[k - 1].s)) {
          t.fail("arc samples not increasing in s near " + fmt(g.samples[k].s));
          break;
        }
      }
      if (!g.samples.empty() &&
          (g.samples.front().s != g.s_begin || g.samples.back().s != g.s_end)) {
        t.fail("arc samples do not span the segment range");
      }
    }
    if (i == 0) continue;
    const Segment& p = segs[i - 1];
    double s = g.s_begin;
    if (std::abs(p.s_end - s) > 1e-12 * std::max(1.0, s)) {
      t.fail("gap between segments at s = " + fmt(p.s_end) + " and " + fmt(s));
      continue;
    }
    State left = p.end_state(), right = g.begin_state();
    int hit = -1;
    for (size_t k = 0; k < sol.shocks.size(); ++k) {
      if (!used[k] && std::abs(sol.shocks[k].s - s) <= 1e-12 * std::max(1.0, s)) hit = static_cast<int>(k);
    }
    if (hit >= 0) {
      used[hit] = true;
      const auto& sh = sol.shocks[hit];
      t.residual(state_gap(sol, sh.front, left), s, "shock front against the segment ahead");
      t.residual(state_gap(sol, sh.back, right), s, "shock back against the segment behind");
    } else {
      t.residual(state_gap(sol, left, right), s, "continuity");
    }
  }
  for (size_t k = 0; k < used.size(); ++k) {
    if (!used[k]) t.fail("shock at s = " + fmt(sol.shocks[k].s) + " is not at a segment junction");
  }
  if (sol.shocks.size() > 2) t.fail("more than two shocks");
  return t.rec;
}

AuditReport audit_all(const WaveSolution& sol, const AuditTolerances& tol) {
  AuditReport r;
  r.checks.push_back(audit_structure(sol, tol));
  r.checks.push_back(audit_rh(sol, tol));
  r.checks.push_back(audit_entropy(sol, tol));
  r.checks.push_back(audit_ode(sol, tol));
  r.checks.push_back(audit_boundary(sol, tol));
  return r;
}

std::vector<double> oracle_grid(const EosSpec& eos, double tau1, int grid_n) {
  TauDomain d = eos.tau_domain();
  double base = d.lo;
  // Reaches down to the scan floor, or further below tau1 when that is closer to the domain edge.
  double a = (tau1 - base) * 1e-4;
  if (eos.scan_lo() > base) a = std::min(a, eos.scan_lo() - base);
  double b = std::max(eos.scan_hi() - base, 1e4 * (tau1 - base));
  if (std::isfinite(d.hi)) b = std::min(b, d.hi - base);
  std::vector<double> g(grid_n);
  double r = std::log(b / a) / (grid_n - 1);
  for (int i = 0; i < grid_n; ++i) g[i] = base + a * std::exp(r * i);
  return g;
}

std::vector<OracleRoot> oracle_back_state(const EosSpec& eos, const State& front, double sigma, int grid_n) {
  const double t1 = front.tau();
  const double p1 = eos.p(t1);
  const double rhs = (sigma - front.u) * (sigma - front.u);
  auto phi = [&](double tau) {
    double chord = tau == t1 ? eos.dp(t1) : (eos.p(tau) - p1) / (tau - t1);
    return t1 * t1 * (-chord) - rhs;
  };
  auto g = oracle_grid(eos, t1, grid_n);
  std::vector<OracleRoot> out;
  double fa = phi(g[0]);
  for (int i = 1; i < grid_n; ++i) {
    double fb = phi(g[i]);
    if (fb == 0.0) {
      out.push_back({g[i], g[i]});
    } else if (fa != 0.0 && (fa < 0) != (fb < 0)) {
      out.push_back({g[i - 1], g[i]});
    }
    fa = fb;
  }
  return out;
}

}  // namespace sphwave
