#include "sphwave/hugoniot.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "sphwave/roots.hpp"

namespace sphwave {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Root of E on [a, b] where E(a), E(b) must have opposite signs.
template <class F>
double solve_between(F&& E, double a, double b, const char* what) {
  double fa = E(a), fb = E(b);
  if (roots::sign(fa) == roots::sign(fb) && fa != 0 && fb != 0) {
    throw RootNotBracketed(std::string(what) + ": defining equation not bracketed on [" + fmt(a) + ", " +
                           fmt(b) + "]");
  }
  return roots::bisect(E, a, b, fa, fb, 1e-14);
}

double left_limit(const EosSpec& eos) { return eos.scan_lo(); }

}  // namespace

const char* to_string(ShockKind k) { return k == ShockKind::Compression ? "Compression" : "Rarefaction"; }

ShockKind shock_kind_from_string(const std::string& s) {
  if (s == "Compression") return ShockKind::Compression;
  if (s == "Rarefaction") return ShockKind::Rarefaction;
  throw DomainError("unknown shock kind: " + s);
}

double shock_speed(const EosSpec& eos, const State& front, double tau_back) {
  double c = chord_slope(eos, front.tau(), tau_back);
  if (!(c < 0)) throw InvalidChord("chord slope is not negative: " + fmt(c));
  return front.u + front.tau() * std::sqrt(-c);
}

double back_velocity(const EosSpec& eos, const State& front, double tau_back) {
  double c = chord_slope(eos, front.tau(), tau_back);
  if (!(c < 0)) throw InvalidChord("chord slope is not negative: " + fmt(c));
  return front.u + (front.tau() - tau_back) * std::sqrt(-c);
}

std::vector<BackRoot> back_state(const EosSpec& eos, const State& front, double sigma) {
  const double t1 = front.tau();
  const double du = sigma - front.u;
  if (!(du > 0)) throw NoRoot("shock speed must exceed the front velocity");
  const double j2 = du * du / (t1 * t1);
  const double p1 = eos.p(t1);
  const double edge = eos.tau_domain().lo;
  auto chord = [&](double x) {
    // Tangent fallback only when the gap is small against the distance to the domain edge.
    if (std::abs(x - t1) <= 1e-6 * (std::min(x, t1) - edge)) return eos.dp(0.5 * (x + t1));
    return (eos.p(x) - p1) / (x - t1);
  };
  auto Phi = [&](double x) { return -chord(x) - j2; };
  auto T = [&](double x) { return chord(x) - eos.dp(x); };

  const double dlo = edge;
  const double lo = std::min(eos.scan_lo(), dlo + (t1 - dlo) * 1e-3);
  const double hi = std::max(eos.scan_hi(), t1 * 1e3);
  std::vector<double> bp = roots::geomspace(lo - dlo, hi - dlo, 257);
  for (double& x : bp) x += dlo;
  bp.push_back(t1);
  for (double v : eos.landmarks().sorted_volumes()) {
    if (v > lo && v < hi) bp.push_back(v);
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  // Split at critical points of the chord so that Phi is monotone on each piece.
  std::vector<double> tz;
  {
    double xa = bp[0], fa = T(xa);
    for (size_t i = 1; i < bp.size(); ++i) {
      double xb = bp[i], fb = T(xb);
      if (fa != 0 && fb != 0 && roots::sign(fa) != roots::sign(fb)) {
        tz.push_back(roots::bisect(T, xa, xb, fa, fb, 1e-15));
      }
      xa = xb;
      fa = fb;
    }
  }
  bp.insert(bp.end(), tz.begin(), tz.end());
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  std::vector<std::pair<double, bool>> found;  // (tau, double)
  std::vector<double> ph(bp.size());
  for (size_t i = 0; i < bp.size(); ++i) ph[i] = Phi(bp[i]);
  for (size_t i = 0; i < bp.size(); ++i) {
    if (ph[i] == 0) found.push_back({bp[i], false});
    if (i + 1 < bp.size() && ph[i] != 0 && ph[i + 1] != 0 && roots::sign(ph[i]) != roots::sign(ph[i + 1])) {
      found.push_back({roots::bisect(Phi, bp[i], bp[i + 1], ph[i], ph[i + 1], 1e-15), false});
    }
  }
  // Tangential (double) roots at chord critical points.
  for (double x : tz) {
    if (std::abs(Phi(x)) <= 1e-12 * j2) found.push_back({x, true});
  }
  std::sort(found.begin(), found.end());
  std::vector<std::pair<double, bool>> uniq;
  for (auto& r : found) {
    if (!uniq.empty() && std::abs(r.first - uniq.back().first) <= 1e-13 * r.first) {
      uniq.back().second = uniq.back().second || r.second;
      continue;
    }
    uniq.push_back(r);
  }
  if (uniq.empty()) throw NoRoot("no back state for sigma = " + fmt(sigma));
  for (size_t i = 0; i + 1 < uniq.size(); ++i) {
    if (std::abs(uniq[i + 1].first - uniq[i].first) <= 1e-8 * uniq[i].first) {
      uniq[i].second = uniq[i + 1].second = true;
    }
  }

  std::vector<BackRoot> out;
  for (size_t i = 0; i < uniq.size(); ++i) {
    double t2 = uniq[i].first;
    double c = chord(t2);
    BackRoot r;
    r.state = State{front.u + (t1 - t2) * std::sqrt(std::max(0.0, -c)), 1.0 / t2};
    r.double_root = uniq[i].second;
    if (uniq.size() == 1) {
      r.label = "single";
    } else if (i == 0) {
      r.label = "plus";
    } else if (i + 1 == uniq.size()) {
      r.label = "minus";
    } else {
      r.label = "middle";
    }
    out.push_back(r);
  }
  return out;
}

EntropyResult entropy_E(const EosSpec& eos, const State& front, double tau_back, int grid) {
  const double t1 = front.tau(), t2 = tau_back;
  if (t1 == t2) return {true, 0.0};
  const double c2 = chord_slope(eos, t1, t2);
  if (!(c2 < 0)) return {false, -1.0};
  const double A = -c2;
  const Side side1 = t2 < t1 ? Side::Below : Side::Above;  // from tau1 toward tau2
  const Side side2 = t1 > t2 ? Side::Above : Side::Below;  // from tau2 toward tau1
  auto val = [&](double w) {
    double tau = t2 + w * (t1 - t2);
    return (A - std::abs(chord_slope(eos, t1, tau))) / (w * A);
  };
  double end1 = (A - std::abs(eos.dp(t1, side1))) / A;
  double end2 = (std::abs(eos.dp(t2, side2)) - A) / A;
  double best = std::min(end1, end2);
  int arg = -1;
  std::vector<double> v(grid + 1);
  for (int k = 1; k < grid; ++k) {
    v[k] = val(double(k) / grid);
    if (v[k] < best) {
      best = v[k];
      arg = k;
    }
  }
  if (arg > 0) {
    // Golden-section refinement around the interior grid minimizer.
    double a = double(arg - 1) / grid, b = double(arg + 1) / grid;
    a = std::max(a, 1e-9);
    b = std::min(b, 1.0 - 1e-9);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = val(x1), f2 = val(x2);
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - g * (b - a);
        f1 = val(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + g * (b - a);
        f2 = val(x2);
      }
    }
    best = std::min({best, f1, f2});
  }
  return {best >= -kEntropyEps, best};
}

bool AdmissibleSets::admits(double tau_back, double rel_band) const {
  for (const auto& i : compression) {
    if (i.contains(tau_back, rel_band)) return true;
  }
  for (const auto& i : rarefaction) {
    if (i.contains(tau_back, rel_band)) return true;
  }
  return false;
}

AdmissibleSets admissible_sets(const EosSpec& eos, const State& front) {
  AdmissibleSets S;
  S.front = front;
  const double t = front.tau();
  const double lo = left_limit(eos);
  const auto& L = eos.landmarks();
  switch (eos.kind()) {
    case EosKind::TypeI:
      S.compression.push_back({lo, t});
      break;
    case EosKind::TypeII: {
      const double t1i = *L.tau1_i, t2i = *L.tau2_i, th1 = *L.tauhat1, t3 = *L.tau3;
      if (t <= t1i || t > t3) {
        S.compression.push_back({lo, t});
      } else if (t <= t2i) {
        double dp1 = eos.dp(t);
        double a = solve_between([&](double x) { return chord_slope(eos, x, t) - dp1; }, lo, t1i, "tau_1a");
        S.boundary_volumes["tau_1a"] = a;
        S.compression.push_back({lo, a});
      } else {
        double c = tangent_map(eos, TangentMap::psi, t);
        double cc = chord_slope(eos, c, t);
        double b = solve_between([&](double x) { return chord_slope(eos, x, t) - cc; }, lo, t1i, "tau_1b");
        S.boundary_volumes["tau_1b"] = b;
        S.boundary_volumes["tau_1c"] = c;
        S.compression.push_back({lo, b});
        S.compression.push_back({c, t});
      }
      if (t > th1 && t <= t1i) {
        double f = tangent_map(eos, TangentMap::f, t);
        double dp1 = eos.dp(t);
        double d = solve_between([&](double x) { return chord_slope(eos, t, x) - dp1; }, t1i, f, "tau_1d");
        S.boundary_volumes["tau_1d"] = d;
        S.boundary_volumes["tau_1f"] = f;
        S.rarefaction.push_back({d, f});
      } else if (t > t1i && t < t2i) {
        double g = tangent_map(eos, TangentMap::f, t);
        S.boundary_volumes["tau_1g"] = g;
        S.rarefaction.push_back({t, g});
      }
      break;
    }
    case EosKind::TypeIII: {
      const double a1 = *L.taut1, a2 = *L.taut2;
      if (t <= a2) {
        S.compression.push_back({lo, std::min(a1, t)});
      } else {
        double k = tangent_map(eos, TangentMap::kappa, t);
        double hh = solve_between([&](double x) { return chord_slope(eos, x, t) - k; }, lo, a1, "tau_1h");
        S.boundary_volumes["tau_1h"] = hh;
        S.compression.push_back({lo, hh});
        S.compression.push_back({a2, t});
      }
      if (t >= a1 && t < a2) {
        double g = tangent_map(eos, TangentMap::g, t);
        S.boundary_volumes["tau_1i"] = g;
        S.rarefaction.push_back({a2, g});
      }
      break;
    }
  }
  return S;
}

AdmissibleSets AdmissibleCache::get(const State& front) {
  double t = front.tau();
  std::uint64_t key;
  std::memcpy(&key, &t, sizeof key);
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = map_.find(key);
    if (it != map_.end()) {
      AdmissibleSets s = it->second;
      s.front = front;
      return s;
    }
  }
  AdmissibleSets s = admissible_sets(eos_, front);
  std::lock_guard<std::mutex> lk(mu_);
  if (map_.size() > 4096) map_.clear();
  map_.emplace(key, s);
  return s;
}

ShockRecord make_shock(const EosSpec& eos, double s, const State& front, double tau_back,
                       const std::string& label) {
  ShockRecord r;
  r.s = s;
  r.sigma = 1.0 / s;
  r.front = front;
  r.back = State{back_velocity(eos, front, tau_back), 1.0 / tau_back};
  r.kind = tau_back < front.tau() ? ShockKind::Compression : ShockKind::Rarefaction;
  EntropyResult e = entropy_E(eos, front, tau_back);
  r.entropy_margin = e.margin;
  r.boundary_admissible = std::abs(e.margin) < kEntropyEps;
  r.branch_label = label;
  return r;
}

State Carrier::state_at(double s) const {
  for (const auto& seg : segments) {
    if (s <= seg.s_end) return seg.state_at(std::max(s, seg.s_begin));
  }
  return segments.back().end_state();
}

std::pair<double, double> family_gap(const EosSpec& eos, FamilyKind kind, double s, const State& front) {
  const double t = front.tau();
  const auto& L = eos.landmarks();
  double slope = kNaN;
  if (kind == FamilyKind::CompressionFit) {
    if (eos.kind() == EosKind::TypeII && t > *L.tau2_i && t < *L.tau3) {
      slope = eos.dp(tangent_map(eos, TangentMap::psi, t));
    } else if (eos.kind() == EosKind::TypeIII && t > *L.taut2) {
      slope = tangent_map(eos, TangentMap::kappa, t);
    }
  } else {
    if (eos.kind() == EosKind::TypeII && t >= *L.tauhat1 && t < *L.tau2_i) {
      slope = eos.dp(tangent_map(eos, TangentMap::f, t));
    } else if (eos.kind() == EosKind::TypeIII) {
      // Plateau states carry rounding at the edges; snap within a relative band.
      double band = 1e-12 * *L.taut2;
      if (t >= *L.taut1 - band && t <= *L.taut2 + band) {
        double tc = std::clamp(t, *L.taut1, *L.taut2);
        slope = eos.dp(tangent_map(eos, TangentMap::g, tc), Side::Above);
      }
    }
  }
  if (std::isnan(slope)) return {kNaN, kNaN};
  double xi = front.u + t * std::sqrt(-slope);
  return {xi, 1.0 / s - xi};
}

FamilySample family_member(const EosSpec& eos, const Carrier& carrier, FamilyKind kind, double s,
                           AdmissibleCache* cache, bool endpoint_limit) {
  FamilySample m;
  m.s = s;
  m.front = carrier.state_at(s);
  std::tie(m.xi_hat, m.gap) = family_gap(eos, kind, s, m.front);
  if (kind == FamilyKind::CompressionFit) {
    m.label = std::isnan(m.gap) ? "single" : (m.gap >= 0 ? "plus" : "minus");
  } else {
    m.label = "single";
  }
  if (endpoint_limit) {
    m.has_back = true;
    m.back = m.front;
    return m;
  }
  const double sigma = 1.0 / s;
  if (!(sigma > m.front.u)) return m;
  std::vector<BackRoot> rs;
  try {
    rs = back_state(eos, m.front, sigma);
  } catch (const NoRoot&) {
    return m;
  }
  AdmissibleSets sets = cache ? cache->get(m.front) : admissible_sets(eos, m.front);
  const double t1 = m.front.tau();
  std::vector<const BackRoot*> ok;
  for (const auto& r : rs) {
    double t2 = r.state.tau();
    if (kind == FamilyKind::CompressionFit) {
      if (!(t2 < t1)) continue;
      bool in = false;
      for (const auto& i : sets.compression) in = in || i.contains(t2);
      if (in) ok.push_back(&r);
    } else {
      if (!(t2 > t1)) continue;
      bool in = false;
      for (const auto& i : sets.rarefaction) in = in || i.contains(t2);
      if (in) ok.push_back(&r);
    }
  }
  if (ok.empty()) return m;
  const BackRoot* pick = ok.front();
  if (ok.size() > 1 && kind == FamilyKind::CompressionFit && !std::isnan(m.gap) && m.gap < 0) {
    pick = ok.back();
  }
  m.has_back = true;
  m.back = pick->state;
  return m;
}

namespace {

bool endpoint_is_limit(EventKind k) {
  return k == EventKind::SonicNegative || k == EventKind::SonicInterior || k == EventKind::PlateauEdge;
}

}  // namespace

ShockFamily shock_family(const EosSpec& eos, const Carrier& carrier, FamilyKind kind, int n_samples,
                         AdmissibleCache* cache) {
  ShockFamily fam;
  fam.kind = kind;
  const double sb = carrier.s_begin(), se = carrier.s_end();
  const bool limit_end = endpoint_is_limit(carrier.terminal);
  const int n = std::max(n_samples, 3);

  if (kind == FamilyKind::CompressionFit) {
    for (int k = 1; k <= n; ++k) {
      double s = k == n ? se : sb + (se - sb) * double(k) / n;
      fam.samples.push_back(family_member(eos, carrier, kind, s, cache, k == n && limit_end));
    }
    for (size_t i = 0; i + 1 < fam.samples.size(); ++i) {
      const auto& a = fam.samples[i];
      const auto& b = fam.samples[i + 1];
      if ((a.label == "plus" && b.label == "minus") || (a.label == "minus" && b.label == "plus")) {
        auto F = [&](double s) { return family_gap(eos, kind, s, carrier.state_at(s)).second; };
        fam.jumps.push_back(roots::bisect(F, a.s, b.s, a.gap, b.gap, 1e-14));
      }
    }
    bool any = false;
    for (const auto& m : fam.samples) any = any || m.has_back;
    if (!any) throw EmptyFamily("no admissible compression shock along the carrier");
    return fam;
  }

  // Rarefaction window: the gap function is defined on a final stretch of the carrier.
  auto defined = [&](double s) { return !std::isnan(family_gap(eos, kind, s, carrier.state_at(s)).second); };
  if (!defined(se)) throw WindowEmpty("window function undefined at the carrier end");
  double s_lo = sb;
  {
    const int m = 256;
    double prev = se;
    for (int k = m - 1; k >= 0; --k) {
      double s = sb + (se - sb) * double(k) / m;
      if (s <= 0 || !defined(s)) {
        // Transition between s and prev.
        double a = s, b = prev;
        for (int it = 0; it < 200 && (b - a) > 1e-15 * std::max(1.0, b); ++it) {
          double mid = 0.5 * (a + b);
          if (mid > 0 && defined(mid)) b = mid; else a = mid;
        }
        s_lo = b;
        break;
      }
      prev = s;
      if (k == 0) s_lo = sb;
    }
  }
  auto G = [&](double s) { return family_gap(eos, kind, s, carrier.state_at(s)).second; };
  std::vector<double> grid(n), gv(n);
  for (int k = 0; k < n; ++k) {
    grid[k] = s_lo + (se - s_lo) * double(k) / (n - 1);
    if (grid[k] <= 0) grid[k] = s_lo + (se - s_lo) * 1e-9;
    gv[k] = G(grid[k]);
  }
  int top = -1;
  for (int k = n - 1; k >= 0; --k) {
    if (gv[k] > 0) {
      top = k;
      break;
    }
  }
  if (top < 0 || top == n - 1) throw WindowEmpty("window function has no sign change on the carrier");
  double s2 = roots::bisect(G, grid[top], grid[top + 1], gv[top], gv[top + 1], 1e-14);
  fam.window_lo = s2;
  fam.window_hi = se;
  for (int k = 0; k < n; ++k) {
    double s = s2 + (se - s2) * double(k) / (n - 1);
    if (k == n - 1) s = se;
    fam.samples.push_back(family_member(eos, carrier, kind, s, cache, k == n - 1 && limit_end));
  }
  return fam;
}

}  // namespace sphwave
