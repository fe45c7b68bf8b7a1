#include "sphwave/selfsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sphwave/roots.hpp"

namespace sphwave {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Cubic Lagrange interpolation through the four samples nearest to s.
State interpolate_samples(const std::vector<SelfSimilarPoint>& pts, double s) {
  size_t n = pts.size();
  if (n == 0) throw DomainError("empty sample list");
  if (n == 1) return pts[0].state;
  auto it = std::lower_bound(pts.begin(), pts.end(), s,
                             [](const SelfSimilarPoint& p, double v) { return p.s < v; });
  size_t i = std::clamp<size_t>(it - pts.begin(), 1, n - 1);
  if (pts[i].s == s) return pts[i].state;
  if (pts[i - 1].s == s) return pts[i - 1].state;
  if (n < 4) {
    const auto& a = pts[i - 1];
    const auto& b = pts[i];
    double w = (s - a.s) / (b.s - a.s);
    return {a.state.u + w * (b.state.u - a.state.u), a.state.rho + w * (b.state.rho - a.state.rho)};
  }
  size_t lo = (i >= 2) ? i - 2 : 0;
  lo = std::min(lo, n - 4);
  State out{0, 0};
  for (size_t j = lo; j < lo + 4; ++j) {
    double w = 1.0;
    for (size_t k = lo; k < lo + 4; ++k) {
      if (k != j) w *= (s - pts[k].s) / (pts[j].s - pts[k].s);
    }
    out.u += w * pts[j].state.u;
    out.rho += w * pts[j].state.rho;
  }
  return out;
}

}  // namespace

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::SonicVacuum: return "SonicVacuum";
    case EventKind::QuietState: return "QuietState";
    case EventKind::SonicInterior: return "SonicInterior";
    case EventKind::SonicNegative: return "SonicNegative";
    case EventKind::SupersonicEdge: return "SupersonicEdge";
    case EventKind::PlateauEdge: return "PlateauEdge";
    case EventKind::MaxSReached: return "MaxSReached";
  }
  return "?";
}

const char* to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::SmoothArc: return "SmoothArc";
    case SegmentKind::ConstantState: return "ConstantState";
    case SegmentKind::PressurePlateau: return "PressurePlateau";
    case SegmentKind::Vacuum: return "Vacuum";
  }
  return "?";
}

SegmentKind segment_kind_from_string(const std::string& s) {
  if (s == "SmoothArc") return SegmentKind::SmoothArc;
  if (s == "ConstantState") return SegmentKind::ConstantState;
  if (s == "PressurePlateau") return SegmentKind::PressurePlateau;
  if (s == "Vacuum") return SegmentKind::Vacuum;
  throw DomainError("unknown segment kind: " + s);
}

double plateau_rho(const PlateauParams& p, double s) {
  double r = (1.0 - p.u * s) / (1.0 - p.u * p.s_start);
  return p.rho_start * r * r;
}

std::optional<State> DenseTrajectory::state_at(double s) const {
  if (pieces.empty()) return std::nullopt;
  auto it = std::lower_bound(pieces.begin(), pieces.end(), s,
                             [](const DensePiece& p, double v) { return p.s1 < v; });
  if (it == pieces.end() || s < it->s0) return std::nullopt;
  const DensePiece& p = *it;
  if (p.param == Param::S) {
    auto y = p.step.at(s);
    return State{y[0], std::exp(y[1])};
  }
  // U piece: invert the monotone s(theta).
  double a = 0.0, b = p.theta_end;
  double sa = p.step.at_theta(a)[0];
  bool increasing = p.s1 >= p.s0;
  for (int i = 0; i < 80; ++i) {
    double m = 0.5 * (a + b);
    double sm = p.step.at_theta(m)[0];
    if ((sm < s) == increasing) {
      a = m;
      sa = sm;
    } else {
      b = m;
    }
  }
  (void)sa;
  double th = 0.5 * (a + b);
  auto y = p.step.at_theta(th);
  return State{p.step.x0 + th * p.step.h, std::exp(y[1])};
}

State Segment::state_at(double s) const {
  switch (kind) {
    case SegmentKind::ConstantState:
    case SegmentKind::Vacuum:
      return state;
    case SegmentKind::PressurePlateau:
      return State{plateau.u, plateau_rho(plateau, s)};
    case SegmentKind::SmoothArc:
      if (dense) {
        if (auto st = dense->state_at(s)) return *st;
      }
      return interpolate_samples(samples, s);
  }
  return state;
}

double h(const EosSpec& eos, double rho, double s) {
  return 1.0 / s - sound_speed_rho(eos, rho);
}

Denominator denominator(const EosSpec& eos, double s, const State& st) {
  double tau = 1.0 / st.rho;
  double c2 = -tau * tau * eos.dp(tau);
  double a = 1.0 - st.u * s;
  double b = s * s * c2;
  return {c2, b - a * a, b + a * a};
}

std::pair<double, double> rhs_s(const EosSpec& eos, double s, const State& st, double eps_sonic) {
  auto d = denominator(eos, s, st);
  if (std::abs(d.D) <= eps_sonic * d.N) {
    throw SonicSingularity("sonic degeneracy at s = " + fmt(s));
  }
  return {2.0 * d.c2 * st.u * s / d.D, 2.0 * st.rho * st.u * (1.0 - st.u * s) / d.D};
}

std::pair<double, double> rhs_u(const EosSpec& eos, double u, double s, double rho) {
  auto d = denominator(eos, s, State{u, rho});
  double q = d.c2 * u * s;
  if (!(std::abs(q) > 1e-300) || !(d.c2 > 0)) {
    throw DegenerateParametrization("u-parametrization degenerate at u = " + fmt(u) + ", s = " + fmt(s));
  }
  return {d.D / (2.0 * q), rho * (1.0 - u * s) / (d.c2 * s)};
}

double sonic_dD_du(const EosSpec& eos, double s, const State& st) {
  double tau = st.tau();
  PressureEval e = eos.eval_smooth(tau);
  double c2 = -tau * tau * e.dp;
  return s * (1.0 - st.u * s) * tau * tau * tau * e.d2p / c2;
}

namespace {

struct Integrator {
  const EosSpec& eos;
  const IntegrationControls& ctl;
  StartRegime regime;
  double ln_rho_vac;
  bool plateau;
  double t1 = 0, t2 = 0;

  struct Phys {
    bool ok;
    double c2, D, N;
  };

  Phys phys(double s, double u, double L) const {
    double tau = std::exp(-L);
    if (!eos.in_domain(tau)) return {false, 0, 0, 0};
    double c2 = -tau * tau * eos.eval_smooth(tau).dp;
    double a = 1.0 - u * s;
    double b = s * s * c2;
    return {true, c2, b - a * a, b + a * a};
  }

  std::optional<ode::Vec2> f_s(double s, const ode::Vec2& y) const {
    auto P = phys(s, y[0], y[1]);
    if (!P.ok || std::abs(P.D) <= ctl.eps_sonic * P.N) return std::nullopt;
    double u = y[0];
    return ode::Vec2{2.0 * P.c2 * u * s / P.D, 2.0 * u * (1.0 - u * s) / P.D};
  }

  std::optional<ode::Vec2> f_u(double u, const ode::Vec2& y) const {
    double s = y[0];
    auto P = phys(s, u, y[1]);
    if (!P.ok || !(P.c2 > 0) || !(s > 0) || u == 0.0) return std::nullopt;
    double q = P.c2 * u * s;
    return ode::Vec2{P.D / (2.0 * q), (1.0 - u * s) / (P.c2 * s)};
  }

  // (s, u, ln rho) from a parametrized point.
  static void unpack(Param m, double x, const ode::Vec2& y, double& s, double& u, double& L) {
    if (m == Param::S) {
      s = x;
      u = y[0];
    } else {
      s = y[0];
      u = x;
    }
    L = y[1];
  }

  double drel(double s, double u, double L) const {
    auto P = phys(s, u, L);
    return P.ok ? P.D / P.N : std::numeric_limits<double>::quiet_NaN();
  }

  bool subsonic_regime() const { return regime != StartRegime::Supersonic; }

  EventKind classify_sonic(double s, double u) const {
    if (!subsonic_regime() && u * s > 1.0) return EventKind::SupersonicEdge;
    if (std::abs(u) * s < ctl.eps_u) return EventKind::QuietState;
    if (u > 0 && 1.0 - u * s < ctl.eps_u) return EventKind::SonicVacuum;
    return u > 0 ? EventKind::SonicInterior : EventKind::SonicNegative;
  }
};

enum class Ev { None, Vacuum, Plateau, UZero, SMax, Sonic };

}  // namespace

ArcResult integrate_until_event(const EosSpec& eos, const SelfSimilarPoint& start,
                                StartRegime regime, double rho_ref,
                                const IntegrationControls& ctl) {
  if (!(start.state.rho > 0)) throw DomainError("arc start needs rho > 0");
  Integrator I{eos, ctl, regime, std::log(ctl.rho_vac_rel * rho_ref), eos.has_plateau()};
  if (I.plateau) {
    I.t1 = *eos.landmarks().taut1;
    I.t2 = *eos.landmarks().taut2;
  }

  ArcResult res;
  Segment& arc = res.arc;
  arc.kind = SegmentKind::SmoothArc;
  arc.s_begin = start.s;
  auto dense = std::make_shared<DenseTrajectory>();
  arc.samples.push_back(start);

  const double u_scale = std::max(std::abs(start.state.u), sound_speed_rho(eos, start.state.rho, Side::Below));
  const double vel_scale = std::max(u_scale, 1e-300);

  // Constant stationary data.
  if (start.state.u == 0.0 && regime == StartRegime::Subsonic) {
    double c = sound_speed_rho(eos, start.state.rho);
    double s_q = c > 0 ? std::max(1.0 / c, start.s) : ctl.s_max;
    arc.kind = SegmentKind::ConstantState;
    arc.state = start.state;
    arc.samples.clear();
    EventKind k = EventKind::QuietState;
    if (s_q > ctl.s_max) {
      s_q = ctl.s_max;
      k = EventKind::MaxSReached;
    }
    arc.s_end = s_q;
    res.event = {k, {s_q, start.state}};
    return res;
  }

  Param mode = Param::S;
  double x = start.s;
  ode::Vec2 y{start.state.u, std::log(start.state.rho)};
  double dir = 1.0;  // sign of the step in the current parametrization
  ode::Tolerance tol_s{ctl.rtol, {ctl.atol * vel_scale, ctl.atol}};
  double s_ref = std::max(start.s, 1.0 / vel_scale);
  ode::Tolerance tol_u{ctl.rtol, {ctl.atol * s_ref, ctl.atol}};

  auto f_s = [&](double xx, const ode::Vec2& yy) { return I.f_s(xx, yy); };
  auto f_u = [&](double xx, const ode::Vec2& yy) { return I.f_u(xx, yy); };
  ode::Rhs rhs_s_fn = f_s, rhs_u_fn = f_u;

  double hstep = 1e-4 / vel_scale;
  if (regime == StartRegime::SonicStart) {
    mode = Param::U;
    x = start.state.u;
    y = {start.s, std::log(start.state.rho)};
    double dD = sonic_dD_du(eos, start.s, start.state);
    if (dD == 0.0) throw StepFailure("sonic start with p'' = 0 has no preferred direction");
    dir = dD > 0 ? -1.0 : 1.0;
    hstep = dir * 1e-6 * vel_scale;
  }

  auto current_rhs = [&]() -> const ode::Rhs& { return mode == Param::S ? rhs_s_fn : rhs_u_fn; };
  auto eval_k = [&](ode::Vec2& k) {
    auto r = current_rhs()(x, y);
    if (!r) return false;
    k = *r;
    return true;
  };

  ode::Vec2 k{};
  bool have_k = eval_k(k);
  int switches = 0;
  double prev_s = start.s, prev_h = std::numeric_limits<double>::quiet_NaN();
  bool collapsed = false;

  auto event_values = [&](double s, double u, double L, double out[5]) {
    out[0] = L - I.ln_rho_vac;  // vacuum: + to -
    if (I.plateau) {
      double tau = std::exp(-L);
      out[1] = std::min(tau - I.t1, I.t2 - tau);  // inside plateau: positive
    } else {
      out[1] = -1.0;
    }
    out[2] = u;
    out[3] = s - ctl.s_max;
    out[4] = I.drel(s, u, L);
  };
  auto triggered = [&](int e, double a, double b) {
    switch (e) {
      case 0: return a > 0 && b <= 0;
      case 1: return a <= 0 && b > 0;
      case 2: return roots::sign(a) != 0 && roots::sign(b) != roots::sign(a);
      case 3: return a < 0 && b >= 0;
      case 4:
        if (mode != Param::U) return false;
        return I.subsonic_regime() ? (a < 0 && b >= 0) : (a > 0 && b <= 0);
    }
    return false;
  };

  EventKind final_kind = EventKind::MaxSReached;
  SelfSimilarPoint final_pt;
  bool done = false;

  for (int step = 0; step < ctl.max_steps && !done; ++step) {
    double s_c, u_c, L_c;
    Integrator::unpack(mode, x, y, s_c, u_c, L_c);
    double dr = I.drel(s_c, u_c, L_c);

    // Parametrization switching near sonic points.
    if (mode == Param::S && std::abs(u_c) * s_c > 1e-3 && std::abs(dr) < ctl.delta_switch && switches < 8 &&
        s_c > 0) {
      double sgn_du = roots::sign(u_c) * roots::sign(dr);
      if (sgn_du != 0) {
        ode::Vec2 ks{};
        double h_s = std::abs(hstep);
        double du_ds = have_k ? k[0] : 0.0;
        mode = Param::U;
        dir = sgn_du;
        x = u_c;
        y = {s_c, L_c};
        double guess = std::abs(du_ds) > 0 ? h_s * std::abs(du_ds) : 1e-6 * vel_scale;
        hstep = dir * std::min(guess, 1e-2 * std::abs(u_c));
        have_k = eval_k(k);
        ++switches;
        (void)ks;
        continue;
      }
    }
    if (mode == Param::U && (std::abs(dr) > 4 * ctl.delta_switch || std::abs(u_c) * s_c < 1e-4) &&
        switches < 16) {
      double ds_du = have_k ? std::abs(k[0]) : 0.0;
      mode = Param::S;
      x = s_c;
      y = {u_c, L_c};
      double guess = ds_du > 0 ? std::abs(hstep) * ds_du : 1e-6 * s_ref;
      hstep = std::max(guess, 1e-12 * std::max(1.0, s_c));
      have_k = eval_k(k);
      ++switches;
      continue;
    }

    if (!have_k) {
      collapsed = true;
      break;
    }
    if (mode == Param::S) {
      // Land exactly on s_max.
      if (x + hstep > ctl.s_max) hstep = ctl.s_max - x;
    }
    const ode::Tolerance& tol = mode == Param::S ? tol_s : tol_u;
    auto out = ode::dp45_step(current_rhs(), x, y, k, hstep, tol);
    if (out.rhs_failed || out.err > 1.0) {
      hstep *= out.rhs_failed ? 0.25 : std::max(0.2, ode::step_factor(out.err));
      double floor = mode == Param::S ? 1e-15 * std::max(1.0, std::abs(x)) : 1e-15 * vel_scale;
      if (std::abs(hstep) < floor) {
        collapsed = true;
        break;
      }
      continue;
    }

    // Accepted step: look for events inside it.
    double s1, u1, L1;
    Integrator::unpack(mode, x + hstep, out.y1, s1, u1, L1);
    double ev0[5], ev1[5];
    event_values(s_c, u_c, L_c, ev0);
    event_values(s1, u1, L1, ev1);
    double best_theta = 2.0;
    int best = -1;
    for (int e = 0; e < 5; ++e) {
      if (!triggered(e, ev0[e], ev1[e])) continue;
      auto g = [&](double th) {
        auto yy = out.dense.at_theta(th);
        double ss, uu, LL;
        Integrator::unpack(mode, x + th * hstep, yy, ss, uu, LL);
        double v[5];
        event_values(ss, uu, LL, v);
        return v[e];
      };
      double a = 0.0, b = 1.0, ga = ev0[e];
      if (mode == Param::S && e == 3) {
        a = b = std::clamp((ctl.s_max - x) / hstep, 0.0, 1.0);
      } else {
        for (int it = 0; it < 64; ++it) {
          double m = 0.5 * (a + b);
          double gm = g(m);
          if (triggered(e, ga, gm)) {
            b = m;
          } else {
            a = m;
            ga = gm;
          }
        }
      }
      if (b < best_theta) {
        best_theta = b;
        best = e;
      }
    }

    double theta_end = best >= 0 ? best_theta : 1.0;
    int nsub = std::max(1, ctl.dense_subsamples);
    for (int j = 1; j <= nsub; ++j) {
      double th = theta_end * double(j) / nsub;
      auto yy = out.dense.at_theta(th);
      double ss, uu, LL;
      Integrator::unpack(mode, x + th * hstep, yy, ss, uu, LL);
      if (ss > arc.samples.back().s) arc.samples.push_back({ss, {uu, std::exp(LL)}});
    }
    DensePiece piece;
    piece.param = mode;
    piece.step = out.dense;
    piece.theta_end = theta_end;
    {
      double ss, uu, LL;
      Integrator::unpack(mode, x, out.dense.at_theta(0.0), ss, uu, LL);
      piece.s0 = ss;
      Integrator::unpack(mode, x + theta_end * hstep, out.dense.at_theta(theta_end), ss, uu, LL);
      piece.s1 = ss;
    }
    if (piece.s1 > piece.s0) dense->pieces.push_back(piece);

    prev_s = s_c;
    prev_h = 1.0 / s_c - std::sqrt(std::max(0.0, I.phys(s_c, u_c, L_c).c2));

    if (best >= 0) {
      auto yy = out.dense.at_theta(best_theta);
      double ss, uu, LL;
      Integrator::unpack(mode, x + best_theta * hstep, yy, ss, uu, LL);
      State st{uu, std::exp(LL)};
      switch (best) {
        case 0: final_kind = EventKind::SonicVacuum; break;
        case 1:
          final_kind = EventKind::PlateauEdge;
          st.rho = std::abs(std::exp(-LL) - I.t1) < std::abs(std::exp(-LL) - I.t2) ? 1.0 / I.t1 : 1.0 / I.t2;
          break;
        case 2:
          final_kind = EventKind::QuietState;
          st.u = 0.0;
          break;
        case 3:
          final_kind = EventKind::MaxSReached;
          ss = ctl.s_max;
          break;
        case 4: final_kind = I.classify_sonic(ss, uu); break;
      }
      if (ss > arc.samples.back().s) {
        arc.samples.push_back({ss, st});
      } else {
        arc.samples.back() = {std::max(ss, arc.samples.back().s), st};
      }
      final_pt = arc.samples.back();
      done = true;
      break;
    }

    x += hstep;
    y = out.y1;
    k = out.k_end;
    have_k = true;
    hstep *= ode::step_factor(out.err);
  }

  if (!done) {
    double s_c, u_c, L_c;
    Integrator::unpack(mode, x, y, s_c, u_c, L_c);
    if (!collapsed) {
      throw StepFailure("step budget exhausted at s = " + fmt(s_c));
    }
    double dr = I.drel(s_c, u_c, L_c);
    if (!(std::abs(dr) < 1e-5)) {
      throw StepFailure("step size underflow away from a sonic point at s = " + fmt(s_c) +
                        ", u = " + fmt(u_c) + ", rho = " + fmt(std::exp(L_c)));
    }
    final_kind = I.classify_sonic(s_c, u_c);
    State st{u_c, std::exp(L_c)};
    double s_end = s_c;
    if (final_kind == EventKind::QuietState) {
      // Extrapolate the zero of h from the last two accepted points.
      double h_end = 1.0 / s_c - std::sqrt(std::max(0.0, I.phys(s_c, u_c, L_c).c2));
      if (std::isfinite(prev_h) && s_c > prev_s && h_end != prev_h) {
        double ds = -h_end * (s_c - prev_s) / (h_end - prev_h);
        if (ds > 0 && ds < 10 * (s_c - prev_s)) s_end = s_c + ds;
      }
      st.u = 0.0;
    }
    if (s_end > arc.samples.back().s) {
      arc.samples.push_back({s_end, st});
    } else {
      arc.samples.back().state = st;
    }
    final_pt = arc.samples.back();
  }

  arc.s_end = final_pt.s;
  arc.dense = dense;
  res.event = {final_kind, final_pt};
  return res;
}

Segment plateau_segment(const EosSpec& eos, double u, double rho_start, double s_start) {
  if (!eos.has_plateau()) throw DomainError("plateau segment needs a plateau law");
  if (u == 0.0) throw NoExit("plateau with u = 0 never reaches an edge");
  double target = u > 0 ? 1.0 / *eos.landmarks().taut2 : 1.0 / *eos.landmarks().taut1;
  double a0 = 1.0 - u * s_start;
  if (!(a0 > 0)) throw NoExit("plateau start has u s >= 1");
  double s_end = (1.0 - a0 * std::sqrt(target / rho_start)) / u;
  if (!(s_end >= s_start) || !(1.0 - u * s_end > 0)) {
    throw NoExit("plateau closed form does not reach the edge before u s = 1");
  }
  Segment seg;
  seg.kind = SegmentKind::PressurePlateau;
  seg.s_begin = s_start;
  seg.s_end = s_end;
  seg.plateau = {u, rho_start, s_start};
  return seg;
}

}  // namespace sphwave
