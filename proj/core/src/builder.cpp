#include "sphwave/builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sphwave/roots.hpp"

namespace sphwave {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

int sgn(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

}  // namespace

const char* to_string(Classification c) {
  switch (c) {
    case Classification::ContinuousVacuum: return "ContinuousVacuum";
    case Classification::ContinuousQuiet: return "ContinuousQuiet";
    case Classification::GlobalSmooth: return "GlobalSmooth";
    case Classification::RarefactionShockThenVacuum: return "RarefactionShockThenVacuum";
    case Classification::RarefactionShockThenQuiet: return "RarefactionShockThenQuiet";
    case Classification::RarefactionShockThenSmooth: return "RarefactionShockThenSmooth";
    case Classification::SingleCompressionShock: return "SingleCompressionShock";
    case Classification::TwoCompressionShocks: return "TwoCompressionShocks";
    case Classification::PlateauComposite: return "PlateauComposite";
  }
  return "?";
}

Classification classification_from_string(const std::string& s) {
  for (int i = 0; i <= int(Classification::PlateauComposite); ++i) {
    auto c = Classification(i);
    if (s == to_string(c)) return c;
  }
  throw DomainError("unknown classification: " + s);
}

const char* to_string(Region r) {
  switch (r) {
    case Region::Convex: return "convex";
    case Region::BelowHat1: return "below-double-tangent";
    case Region::Hat1ToI1: return "double-tangent-to-first-inflection";
    case Region::InflBand: return "inflection-band";
    case Region::I2To3: return "second-inflection-to-chord-bound";
    case Region::Above3: return "above-chord-bound";
    case Region::Liquid: return "liquid";
    case Region::Plateau: return "plateau";
    case Region::Vapor: return "vapor";
  }
  return "?";
}

const char* to_string(Action a) {
  switch (a) {
    case Action::FinishVacuum: return "finish-vacuum";
    case Action::FinishQuiet: return "finish-quiet";
    case Action::FinishSmooth: return "finish-smooth";
    case Action::RarefactionFit: return "rarefaction-fit";
    case Action::CompressionFit: return "compression-fit";
    case Action::Impossible: return "impossible";
  }
  return "?";
}

Region region_of(const EosSpec& eos, double tau) {
  const auto& L = eos.landmarks();
  switch (eos.kind()) {
    case EosKind::TypeI:
      return Region::Convex;
    case EosKind::TypeII:
      if (tau < *L.tauhat1) return Region::BelowHat1;
      if (tau < *L.tau1_i) return Region::Hat1ToI1;
      if (tau < *L.tau2_i) return Region::InflBand;
      if (tau < *L.tau3) return Region::I2To3;
      return Region::Above3;
    case EosKind::TypeIII:
      if (tau <= *L.taut1) return Region::Liquid;
      if (tau < *L.taut2) return Region::Plateau;
      return Region::Vapor;
  }
  return Region::Convex;
}

// Inflow whose sonic point lies inside the eps_u band: the compression shock is
// weaker than the band and the arc is taken as ending quiet.
constexpr const char* kUnresolved = "convex inflow, sonic point inside the quiet band, shock below resolution";

const std::vector<DecisionRow>& decision_table() {
  using R = Region;
  using E = EventKind;
  using A = Action;
  const auto I = EosKind::TypeI, II = EosKind::TypeII, III = EosKind::TypeIII;
  static const std::vector<DecisionRow> rows = {
      {I, {}, +1, E::SonicVacuum, A::FinishVacuum, "convex outflow, continuous to vacuum"},
      {I, {}, +1, E::QuietState, A::FinishQuiet, "convex outflow, continuous to a quiet core"},
      {I, {}, +1, E::MaxSReached, A::FinishSmooth, "convex outflow, smooth to the horizon"},
      {I, {}, -1, E::SonicNegative, A::CompressionFit, "convex inflow, compression shock to a quiet core"},
      {I, {}, -1, E::QuietState, A::FinishQuiet, kUnresolved, true},

      {II, {}, +1, E::SonicVacuum, A::FinishVacuum, "inflected outflow, continuous to vacuum"},
      {II, {}, +1, E::QuietState, A::FinishQuiet, "inflected outflow, continuous to a quiet core"},
      {II, {}, +1, E::MaxSReached, A::FinishSmooth, "inflected outflow, smooth to the horizon"},
      {II, {R::BelowHat1, R::Hat1ToI1, R::InflBand}, +1, E::SonicInterior, A::RarefactionFit,
       "inflected outflow, interior sonic point, rarefaction window"},
      {II, {}, -1, E::SonicNegative, A::CompressionFit, "inflected inflow, compression family along the arc"},
      {II, {R::InflBand, R::I2To3, R::Above3}, -1, E::QuietState, A::FinishQuiet,
       "inflected inflow, continuous to a quiet core inside the inflection band"},
      {II, {R::BelowHat1, R::Hat1ToI1}, -1, E::QuietState, A::FinishQuiet, kUnresolved, true},

      {III, {}, +1, E::SonicVacuum, A::FinishVacuum, "plateau law outflow, continuous to vacuum"},
      {III, {}, +1, E::QuietState, A::FinishQuiet, "plateau law outflow, continuous to a quiet core"},
      {III, {}, +1, E::MaxSReached, A::FinishSmooth, "plateau law outflow, smooth to the horizon"},
      {III, {R::Liquid, R::Plateau}, +1, E::PlateauEdge, A::RarefactionFit,
       "plateau law outflow, supersonic vapor edge, rarefaction window on the plateau"},
      {III, {}, -1, E::SonicNegative, A::CompressionFit, "plateau law inflow, compression family along the arc"},
      {III, {R::Plateau, R::Vapor}, -1, E::PlateauEdge, A::CompressionFit,
       "plateau law inflow, supersonic liquid edge, compression family"},
      {III, {R::Liquid, R::Vapor}, -1, E::QuietState, A::FinishQuiet, kUnresolved, true},
  };
  return rows;
}

const DecisionRow& lookup_decision(EosKind kind, Region region, int u_sign, EventKind terminal) {
  for (const auto& r : decision_table()) {
    if (r.kind != kind || r.u_sign != u_sign || r.terminal != terminal) continue;
    if (!r.regions.empty() && std::find(r.regions.begin(), r.regions.end(), region) == r.regions.end()) continue;
    return r;
  }
  static const DecisionRow none{EosKind::TypeI, {}, 0, EventKind::MaxSReached, Action::Impossible,
                                "configuration excluded by the case analysis"};
  return none;
}

State WaveSolution::state_at(double s) const {
  for (const auto& seg : segments) {
    if (s < seg.s_end) return seg.state_at(std::max(s, seg.s_begin));
  }
  return segments.back().end_state();
}

// ---------------------------------------------------------------------------
// Carriers

namespace {

bool enters_plateau(const EosSpec& eos, const State& st) {
  if (!eos.has_plateau()) return false;
  const auto& L = eos.landmarks();
  double t = st.tau(), a = *L.taut1, b = *L.taut2;
  double band = 1e-12 * b;
  if (t > a + band && t < b - band) return st.u != 0.0;
  if (std::abs(t - b) <= band) return st.u < 0;
  if (std::abs(t - a) <= band) return st.u > 0;
  return false;
}

Segment truncate_segment(const Segment& seg, double s) {
  Segment out = seg;
  if (s >= seg.s_end) return out;
  out.s_end = s;
  if (seg.kind == SegmentKind::SmoothArc) {
    State end = seg.state_at(s);
    out.samples.clear();
    for (const auto& p : seg.samples) {
      if (p.s < s) out.samples.push_back(p);
    }
    out.samples.push_back({s, end});
  }
  return out;
}

std::vector<Segment> truncate(const std::vector<Segment>& segs, double s) {
  std::vector<Segment> out;
  for (const auto& seg : segs) {
    if (seg.s_begin >= s && !out.empty()) break;
    out.push_back(truncate_segment(seg, s));
    if (seg.s_end >= s) break;
  }
  return out;
}

}  // namespace

Carrier run_carrier(const EosSpec& eos, const SelfSimilarPoint& start, StartRegime regime, double rho_ref,
                    const IntegrationControls& ctl) {
  Carrier c;
  SelfSimilarPoint p = start;
  StartRegime reg = regime;
  for (int leg = 0; leg < 8; ++leg) {
    if (reg != StartRegime::SonicStart && enters_plateau(eos, p.state)) {
      Segment seg = plateau_segment(eos, p.state.u, p.state.rho, p.s);
      // Inflow always crosses in closed form; only outflow is cut at the horizon.
      if (p.state.u > 0 && seg.s_end >= ctl.s_max) {
        seg.s_end = ctl.s_max;
        c.segments.push_back(seg);
        c.terminal = EventKind::MaxSReached;
        return c;
      }
      c.segments.push_back(seg);
      const auto& L = eos.landmarks();
      double s = seg.s_end, u = p.state.u;
      double edge_tau = u > 0 ? *L.taut2 : *L.taut1;
      double b = u > 0 ? *L.b2 : *L.b1;
      p = {s, {u, 1.0 / edge_tau}};
      bool subsonic = s * b < 1.0 - u * s;
      if (!subsonic) {
        c.terminal = EventKind::PlateauEdge;
        return c;
      }
      reg = StartRegime::Subsonic;
      continue;
    }
    ArcResult r = integrate_until_event(eos, p, reg, rho_ref, ctl);
    c.segments.push_back(r.arc);
    if (r.event.kind == EventKind::PlateauEdge && enters_plateau(eos, r.event.at.state)) {
      p = r.event.at;
      reg = StartRegime::Subsonic;
      continue;
    }
    c.terminal = r.event.kind;
    return c;
  }
  throw StepFailure("too many plateau crossings along one carrier");
}

// ---------------------------------------------------------------------------
// Shock fits

namespace {

bool labels_compatible(const std::string& a, const std::string& b) {
  return a == b || a == "single" || b == "single";
}

}  // namespace

// Plus and minus back volumes at a branch jump of the compression family.
std::optional<std::pair<double, double>> jump_volumes(const EosSpec& eos, const AdmissibleSets& S) {
  const auto& v = S.boundary_volumes;
  if (eos.kind() == EosKind::TypeII && v.count("tau_1b") && v.count("tau_1c")) {
    return std::pair{v.at("tau_1b"), v.at("tau_1c")};
  }
  if (eos.kind() == EosKind::TypeIII && v.count("tau_1h")) {
    return std::pair{v.at("tau_1h"), *eos.landmarks().taut2};
  }
  return std::nullopt;
}

QuietFit fit_quiet_shock(const EosSpec& eos, const Carrier& carrier, const ShockFamily& family,
                         const BuildControls& bc, AdmissibleCache* cache) {
  // Both branch ends at each jump join the samples so a zero next to a jump is bracketed.
  std::vector<FamilySample> sm = family.samples;
  for (double sj : family.jumps) {
    State front = carrier.state_at(sj);
    auto jv = jump_volumes(eos, cache ? cache->get(front) : admissible_sets(eos, front));
    if (!jv) continue;
    auto at = std::find_if(sm.begin(), sm.end(), [&](const FamilySample& x) { return x.s > sj; });
    std::vector<FamilySample> ends;
    for (auto [t, label] : {std::pair{jv->first, "plus"}, std::pair{jv->second, "minus"}}) {
      FamilySample x;
      x.s = sj;
      x.front = front;
      x.has_back = true;
      x.back = {back_velocity(eos, front, t), 1.0 / t};
      x.label = label;
      ends.push_back(x);
    }
    sm.insert(at, ends.begin(), ends.end());
  }
  const bool limit_end = carrier.terminal == EventKind::SonicNegative ||
                         carrier.terminal == EventKind::SonicInterior ||
                         carrier.terminal == EventKind::PlateauEdge;
  auto member = [&](double s) {
    bool lim = limit_end && s >= carrier.s_end();
    return family_member(eos, carrier, family.kind, s, cache, lim);
  };
  for (size_t i = 0; i < sm.size(); ++i) {
    const auto& a = sm[i];
    if (a.has_back && a.back.u == 0.0) {
      return {a.s, make_shock(eos, a.s, a.front, a.back.tau(), a.label)};
    }
    if (i + 1 == sm.size()) break;
    const auto& b = sm[i + 1];
    if (!a.has_back || !b.has_back || !labels_compatible(a.label, b.label)) continue;
    if (sgn(a.back.u) == sgn(b.back.u) || b.back.u == 0.0) continue;
    double lo = a.s, hi = b.s;
    double ulo = a.back.u;
    FamilySample best = std::abs(a.back.u) < std::abs(b.back.u) ? a : b;
    for (int it = 0; it < 200 && (hi - lo) > bc.fit_tol * hi; ++it) {
      double mid = 0.5 * (lo + hi);
      FamilySample m = member(mid);
      if (!m.has_back) throw ConstructionFailed("family member lost during the quiet fit at s = " + fmt(mid), {});
      if (std::abs(m.back.u) < std::abs(best.back.u)) best = m;
      if (m.back.u == 0.0) break;
      if (sgn(m.back.u) == sgn(ulo)) {
        lo = mid;
        ulo = m.back.u;
      } else {
        hi = mid;
      }
    }
    return {best.s, make_shock(eos, best.s, best.front, best.back.tau(), best.label)};
  }
  throw NoSignChange("back velocity keeps its sign on every continuous branch");
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

struct Builder {
  const EosSpec& eos;
  const BuildControls& bc;
  double rho_ref;
  AdmissibleCache cache;
  WaveSolution sol;
  std::vector<std::string> trace;
  EventKind final_event = EventKind::MaxSReached;

  Builder(const EosSpec& e, const BuildControls& c, double rho0) : eos(e), bc(c), rho_ref(rho0), cache(e) {}

  [[noreturn]] void fail(const std::string& what) { throw ConstructionFailed(what, trace); }

  void note_carrier(const Carrier& c) {
    std::ostringstream os;
    os << "carrier [" << fmt(c.s_begin()) << ", " << fmt(c.s_end()) << "] ends with " << to_string(c.terminal);
    State e = c.segments.back().end_state();
    os << " at u = " << fmt(e.u) << ", tau = " << fmt(e.tau());
    trace.push_back(os.str());
  }

  void append(const std::vector<Segment>& segs) {
    for (const auto& s : segs) sol.segments.push_back(s);
  }

  void finish_terminal(EventKind k, const State& end, double s_end) {
    const double s_max = bc.ode.s_max;
    final_event = k;
    if (s_end >= s_max) return;
    Segment tail;
    tail.s_begin = s_end;
    tail.s_end = s_max;
    if (k == EventKind::SonicVacuum) {
      tail.kind = SegmentKind::Vacuum;
      tail.state = {end.u, 0.0};
      sol.diagnostics["s_vacuum"] = s_end;
      sol.diagnostics["xi_vacuum"] = 1.0 / s_end;
    } else if (k == EventKind::QuietState) {
      tail.kind = SegmentKind::ConstantState;
      tail.state = {0.0, end.rho};
      sol.diagnostics["s_quiet"] = s_end;
    } else {
      return;
    }
    sol.segments.push_back(tail);
  }

  void extend(const Carrier& carrier, int depth) {
    note_carrier(carrier);
    if (depth > bc.max_depth) fail("continuation depth cap reached");
    State st0 = carrier.segments.front().begin_state();
    Region region = region_of(eos, st0.tau());
    int us = sgn(st0.u);
    const DecisionRow& row = lookup_decision(eos.kind(), region, us, carrier.terminal);
    std::string tag = std::string(to_string(eos.kind())) + " / " + to_string(region) + " / u " +
                      (us > 0 ? "> 0" : "< 0") + " / " + to_string(carrier.terminal) + ": " + row.tag;
    sol.case_tags.push_back(tag);
    trace.push_back("decision: " + std::string(to_string(row.action)) + " (" + row.tag + ")");
    if (row.unresolved) {
      sol.notes.push_back("inflow sonic point within eps_u of the quiet state; compression shock below resolution");
    }
    const Segment& last = carrier.segments.back();
    switch (row.action) {
      case Action::FinishVacuum:
      case Action::FinishQuiet:
      case Action::FinishSmooth:
        append(carrier.segments);
        finish_terminal(carrier.terminal, last.end_state(), last.s_end);
        return;
      case Action::CompressionFit:
        compression(carrier, depth);
        return;
      case Action::RarefactionFit:
        rarefaction(carrier, depth);
        return;
      case Action::Impossible:
        fail("terminal configuration excluded by the case analysis: " + tag);
    }
  }

  void quiet_after_shock(double s, const ShockRecord& sh) {
    sol.shocks.push_back(sh);
    sol.diagnostics["s_s"] = s;
    finish_terminal(EventKind::QuietState, {0.0, sh.back.rho}, s);
  }

  void compression(const Carrier& carrier, int depth) {
    if (eos.kind() == EosKind::TypeII && carrier.terminal == EventKind::SonicNegative) {
      double t = carrier.segments.back().end_state().tau();
      const auto& L = eos.landmarks();
      if (t > *L.tau1_i && t < *L.tau2_i) {
        fail("inflow sonic point inside the inflection band is excluded by the case analysis");
      }
    }
    sol.diagnostics[depth == 0 ? "s_star" : "s_star_star"] = carrier.s_end();
    ShockFamily fam = shock_family(eos, carrier, FamilyKind::CompressionFit, bc.family_samples, &cache);
    try {
      QuietFit q = fit_quiet_shock(eos, carrier, fam, bc, &cache);
      append(truncate(carrier.segments, q.s));
      quiet_after_shock(q.s, q.shock);
      trace.push_back("compression shock to a quiet core at s = " + fmt(q.s));
      return;
    } catch (const NoSignChange&) {
      trace.push_back("no zero of the back velocity on a continuous branch; two-shock construction");
    }
    two_shock(carrier, fam, depth);
  }

  void two_shock(const Carrier& carrier, const ShockFamily& fam, int depth) {
    for (double sj : fam.jumps) {
      State front = carrier.state_at(sj);
      auto jv = jump_volumes(eos, cache.get(front));
      if (!jv) continue;
      auto [tp, tm] = *jv;
      double up = back_velocity(eos, front, tp);
      double um = back_velocity(eos, front, tm);
      trace.push_back("branch jump at s = " + fmt(sj) + ": u+ = " + fmt(up) + ", u- = " + fmt(um));
      if (!(up > 0 && um < 0)) continue;
      sol.diagnostics["s_jump"] = sj;
      sol.diagnostics["u_plus"] = up;
      sol.diagnostics["u_minus"] = um;
      append(truncate(carrier.segments, sj));
      sol.shocks.push_back(make_shock(eos, sj, front, tm, "minus"));
      sol.case_tags.push_back("compression shock onto the lower branch at the branch jump, continued behind it");
      StartRegime reg = eos.kind() == EosKind::TypeII ? StartRegime::SonicStart : StartRegime::Subsonic;
      Carrier next;
      try {
        next = run_carrier(eos, {sj, {um, 1.0 / tm}}, reg, rho_ref, bc.ode);
      } catch (const Error& e) {
        fail(std::string("continuation behind the first shock failed: ") + e.what());
      }
      extend(next, depth + 1);
      return;
    }
    fail("no branch jump with u+ > 0 > u- on the compression family");
  }

  void rarefaction(const Carrier& carrier, int depth) {
    sol.diagnostics[depth == 0 ? "s_star" : "s_star_" + std::to_string(depth)] = carrier.s_end();
    ShockFamily fam = shock_family(eos, carrier, FamilyKind::RarefactionWindow, bc.family_samples, &cache);
    const double s2 = *fam.window_lo;
    sol.diagnostics[depth == 0 ? "s_star_star" : "s_star_star_" + std::to_string(depth)] = s2;
    State front = carrier.state_at(s2);
    double tb = eos.kind() == EosKind::TypeII ? tangent_map(eos, TangentMap::f, front.tau())
                                              : tangent_map(eos, TangentMap::g, front.tau());
    double ub = back_velocity(eos, front, tb);
    fam.samples.front().has_back = true;
    fam.samples.front().back = {ub, 1.0 / tb};

    bool any_nonpos = false;
    for (const auto& m : fam.samples) any_nonpos = any_nonpos || (m.has_back && m.back.u <= 0);
    if (any_nonpos) {
      QuietFit q = fit_quiet_shock(eos, carrier, fam, bc, &cache);
      append(truncate(carrier.segments, q.s));
      quiet_after_shock(q.s, q.shock);
      trace.push_back("rarefaction shock to a quiet core at s = " + fmt(q.s));
      return;
    }
    append(truncate(carrier.segments, s2));
    sol.shocks.push_back(make_shock(eos, s2, front, tb, "single"));
    trace.push_back("rarefaction shock at the window edge s = " + fmt(s2) + " onto a sonic back state");
    Carrier next;
    try {
      next = run_carrier(eos, {s2, {ub, 1.0 / tb}}, StartRegime::SonicStart, rho_ref, bc.ode);
    } catch (const Error& e) {
      fail(std::string("continuation behind the rarefaction shock failed: ") + e.what());
    }
    extend(next, depth + 1);
  }

  void classify() {
    int nr = 0, nc = 0;
    for (const auto& s : sol.shocks) (s.kind == ShockKind::Rarefaction ? nr : nc)++;
    bool plateau = false;
    for (const auto& s : sol.segments) plateau = plateau || s.kind == SegmentKind::PressurePlateau;
    if (nr > 0) {
      sol.classification = final_event == EventKind::SonicVacuum ? Classification::RarefactionShockThenVacuum
                           : final_event == EventKind::QuietState
                               ? Classification::RarefactionShockThenQuiet
                               : Classification::RarefactionShockThenSmooth;
    } else if (nc == 1) {
      sol.classification = Classification::SingleCompressionShock;
    } else if (nc >= 2) {
      sol.classification = Classification::TwoCompressionShocks;
    } else if (plateau) {
      sol.classification = Classification::PlateauComposite;
    } else {
      sol.classification = final_event == EventKind::SonicVacuum  ? Classification::ContinuousVacuum
                           : final_event == EventKind::QuietState ? Classification::ContinuousQuiet
                                                                  : Classification::GlobalSmooth;
    }
  }
};

}  // namespace

WaveSolution solve(const EosSpec& eos, double u0, double rho0, const BuildControls& bc) {
  if (!(rho0 > 0) || !eos.in_domain(1.0 / rho0)) {
    throw DomainError("rho0 = " + fmt(rho0) + " is outside the equation of state domain");
  }
  if (!std::isfinite(u0)) throw DomainError("u0 must be finite");
  Builder b(eos, bc, rho0);
  b.sol.u0 = u0;
  b.sol.eos = eos;
  b.sol.controls = bc;

  // Data exactly on a landmark volume is nudged off it.
  double tau0 = 1.0 / rho0;
  for (double v : eos.landmarks().sorted_volumes()) {
    if (std::abs(tau0 - v) <= 1e-14 * v) {
      tau0 = v * (1.0 + 1e-12);
      b.sol.notes.push_back("data volume on a landmark; nudged by 1e-12 relative");
      break;
    }
  }
  double rho = 1.0 / tau0;
  b.sol.rho0 = rho0;

  if (u0 == 0.0) {
    Segment seg;
    seg.kind = SegmentKind::ConstantState;
    seg.s_begin = 0.0;
    seg.s_end = bc.ode.s_max;
    seg.state = {0.0, rho0};
    b.sol.segments.push_back(seg);
    b.sol.classification = Classification::ContinuousQuiet;
    b.sol.case_tags.push_back("stationary data, constant state everywhere");
    return b.sol;
  }

  try {
    Carrier c = run_carrier(eos, {0.0, {u0, rho}}, StartRegime::Subsonic, rho, bc.ode);
    b.extend(c, 0);
  } catch (const ConstructionFailed&) {
    throw;
  } catch (const Error& e) {
    b.trace.push_back(e.what());
    throw ConstructionFailed(std::string("construction failed: ") + e.what(), b.trace);
  }
  b.classify();
  return b.sol;
}

// ---------------------------------------------------------------------------
// Critical data

CriticalResult critical_u0(const EosSpec& eos, double rho0, double lo, double hi, double tol,
                           const BuildControls& bc, double s_classify) {
  IntegrationControls ctl = bc.ode;
  ctl.s_max = s_classify;
  auto classify = [&](double u) {
    Carrier c = run_carrier(eos, {0.0, {u, rho0}}, StartRegime::Subsonic, rho0, ctl);
    return c.terminal;
  };
  CriticalResult r;
  EventKind elo = classify(lo), ehi = classify(hi);
  r.trace.push_back({lo, elo});
  r.trace.push_back({hi, ehi});
  if (elo != EventKind::QuietState || ehi != EventKind::SonicVacuum) {
    throw BracketInvalid(std::string("bracket endpoints classify as ") + to_string(elo) + " and " +
                         to_string(ehi) + "; expected QuietState below and SonicVacuum above");
  }
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    EventKind e = classify(mid);
    r.trace.push_back({mid, e});
    ++r.iterations;
    if (e == EventKind::QuietState) {
      lo = mid;
    } else if (e == EventKind::SonicVacuum || e == EventKind::MaxSReached) {
      hi = mid;
    } else {
      throw BracketInvalid(std::string("midpoint classifies as ") + to_string(e));
    }
  }
  r.lo = lo;
  r.hi = hi;
  r.solution = solve(eos, 0.5 * (lo + hi), rho0, bc);
  return r;
}

// ---------------------------------------------------------------------------
// Search helper

std::optional<State> sonic_interior_witness(const EosSpec& eos, double tau_star, double u_star,
                                            const IntegrationControls& ctl) {
  if (!(u_star > 0) || !eos.in_domain(tau_star)) return std::nullopt;
  const double c = sound_speed_rho(eos, 1.0 / tau_star);
  const double s_star = 1.0 / (u_star + c);
  auto field = [&](double s, double u, double L, double& c2, double& D) {
    double t = std::exp(-L);
    if (!eos.in_domain(t)) return false;
    c2 = -t * t * eos.dp(t);
    double a = 1.0 - u * s;
    D = s * s * c2 - a * a;
    return c2 > 0;
  };
  ode::Rhs fu = [&](double u, const ode::Vec2& y) -> std::optional<ode::Vec2> {
    double c2, D;
    if (!(y[0] > 0) || !field(y[0], u, y[1], c2, D)) return std::nullopt;
    return ode::Vec2{D / (2.0 * c2 * u * y[0]), (1.0 - u * y[0]) / (c2 * y[0])};
  };
  ode::Rhs fs = [&](double s, const ode::Vec2& y) -> std::optional<ode::Vec2> {
    double c2, D;
    if (!field(s, y[0], y[1], c2, D) || !(D < 0)) return std::nullopt;
    return ode::Vec2{2.0 * c2 * y[0] * s / D, 2.0 * y[0] * (1.0 - y[0] * s) / D};
  };
  ode::Tolerance tol{ctl.rtol, {ctl.atol * s_star, ctl.atol}};

  // Leave the sonic point with u increasing; s must decrease monotonically.
  double x = u_star, h = 1e-4 * u_star;
  ode::Vec2 y{s_star, std::log(1.0 / tau_star)};
  auto k = fu(x, y);
  if (!k) return std::nullopt;
  int accepted = 0;
  for (int it = 0; it < ctl.max_steps; ++it) {
    if (y[0] < 0.02 * s_star) break;
    if (accepted > 5 && !((*k)[0] < 0)) return std::nullopt;  // second sonic point before s = 0
    auto o = ode::dp45_step(fu, x, y, *k, h, tol);
    if (o.rhs_failed || o.err > 1.0) {
      h *= o.rhs_failed ? 0.25 : std::max(0.2, ode::step_factor(o.err));
      if (std::abs(h) < 1e-15 * u_star) return std::nullopt;
      continue;
    }
    x += h;
    y = o.y1;
    k = o.k_end;
    h *= ode::step_factor(o.err);
    ++accepted;
  }
  if (!(y[0] < 0.02 * s_star)) return std::nullopt;

  // Finish in s down to the far field.
  double s = y[0];
  ode::Vec2 z{x, y[1]};
  auto ks = fs(s, z);
  if (!ks) return std::nullopt;
  double hs = -s / 64;
  ode::Tolerance tol_s{ctl.rtol, {ctl.atol * std::abs(x), ctl.atol}};
  for (int it = 0; it < ctl.max_steps && s > 0; ++it) {
    if (s + hs < 0) hs = -s;
    auto o = ode::dp45_step(fs, s, z, *ks, hs, tol_s);
    if (o.rhs_failed || o.err > 1.0) {
      hs *= 0.25;
      if (std::abs(hs) < 1e-300) return std::nullopt;
      continue;
    }
    s += hs;
    z = o.y1;
    ks = o.k_end;
    if (s <= 0) break;
    hs *= ode::step_factor(o.err);
  }
  if (s > 0) return std::nullopt;
  return State{z[0], std::exp(z[1])};
}

}  // namespace sphwave
