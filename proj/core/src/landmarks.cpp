#include <algorithm>
#include <cmath>
#include <sstream>

#include "sphwave/eos.hpp"
#include "sphwave/roots.hpp"

namespace sphwave {

namespace {

constexpr double kRootTol = 1e-13;
constexpr int kScanPoints = 4001;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// First sign change of f above lo, bracketed by geometric expansion of the distance.
template <class F>
double first_root_above(F&& f, double lo, double hi, const char* what) {
  double fa = f(lo);
  double prev = lo;
  double d = 1e-10 * std::max(1.0, std::abs(lo));
  while (true) {
    double x = std::min(lo + d, hi);
    double fb = f(x);
    if (roots::sign(fb) != roots::sign(fa) || fb == 0) {
      return roots::bisect(f, prev, x, fa, fb, kRootTol);
    }
    if (x >= hi) break;
    prev = x;
    fa = fb;
    d *= 1.25;
  }
  throw LandmarkNotFound(std::string(what) + ": no sign change above " + fmt(lo));
}

double inner_match(const EosSpec& eos, double tau2_i, double target_dp) {
  // b > tau2_i with p'(b) = target_dp; p' increases on (tau2_i, inf).
  auto g = [&](double b) { return eos.dp(b) - target_dp; };
  if (!(g(tau2_i) < 0)) return tau2_i;
  return first_root_above(g, tau2_i, eos.scan_hi(), "double tangent inner match");
}

}  // namespace

EosLandmarks compute_landmarks(const EosSpec& eos) {
  EosLandmarks L;
  switch (eos.kind()) {
    case EosKind::TypeI:
      return L;
    case EosKind::TypeII: {
      auto grid = roots::geomspace(eos.scan_lo(), eos.scan_hi(), kScanPoints);
      auto d2 = [&](double t) { return eos.eval(t).d2p; };
      auto infl = roots::all_roots(d2, grid, 1e-12);
      if (infl.size() != 2) {
        throw LandmarkNotFound("expected two inflection points, found " + std::to_string(infl.size()));
      }
      double t1 = infl[0], t2 = infl[1];
      L.tau1_i = t1;
      L.tau2_i = t2;
      double dp_min = eos.dp(t2);
      // a_lo < t1 with p'(a_lo) = p'(t2).
      auto gl = [&](double a) { return eos.dp(a) - dp_min; };
      if (!(gl(eos.scan_lo()) < 0)) throw LandmarkNotFound("p' never falls to p'(tau2_i) left of tau1_i");
      double a_lo = roots::bisect(gl, eos.scan_lo(), t1, kRootTol);
      auto R = [&](double a) {
        double b = inner_match(eos, t2, eos.dp(a));
        return chord_slope(eos, a, b) - eos.dp(a);
      };
      double Ra = R(a_lo);
      double Rb = R(t1);
      if (!(Ra > 0 && Rb < 0)) throw LandmarkNotFound("double tangent residual not bracketed");
      double a = roots::bisect(R, a_lo, t1, Ra, Rb, kRootTol);
      L.tauhat1 = a;
      L.tauhat2 = inner_match(eos, t2, eos.dp(a));
      // tau3 > t2 with chord(t1, tau3) = p'(t1).
      double dp1 = eos.dp(t1);
      auto E = [&](double x) { return chord_slope(eos, t1, x) - dp1; };
      L.tau3 = first_root_above(E, t2, eos.scan_hi(), "tau3");
      return L;
    }
    case EosKind::TypeIII: {
      const auto& m = std::get<MaxwellPlateau>(eos.law());
      double a = m.taut1, b = m.taut2;
      L.taut1 = a;
      L.taut2 = b;
      auto T = [&](double x) { return chord_slope(eos, a, x) - eos.dp(x, Side::Above); };
      L.tau_c = first_root_above(T, b, eos.scan_hi(), "tau_c");
      L.b1 = a * std::sqrt(-eos.dp(a, Side::Below));
      L.b2 = b * std::sqrt(-eos.dp(b, Side::Above));
      return L;
    }
  }
  return L;
}

double tangent_map(const EosSpec& eos, TangentMap which, double tau1) {
  const auto& L = eos.landmarks();
  auto need = [&](bool ok, const char* what) {
    if (!ok) throw DomainError(std::string(what) + ": tau1 = " + fmt(tau1) + " outside the map domain");
  };
  switch (which) {
    case TangentMap::f: {
      need(eos.kind() == EosKind::TypeII, "f");
      // Domain extended down to tauhat1 where f(tauhat1) = tauhat2.
      need(tau1 >= *L.tauhat1 && tau1 < *L.tau2_i, "f");
      auto T = [&](double x) { return chord_slope(eos, tau1, x) - eos.dp(x); };
      if (!(T(*L.tau2_i) > 0)) throw RootNotBracketed("f: tangency not bracketed");
      return first_root_above(T, *L.tau2_i, eos.scan_hi(), "f");
    }
    case TangentMap::g: {
      need(eos.kind() == EosKind::TypeIII, "g");
      need(tau1 >= *L.taut1 && tau1 <= *L.taut2, "g");
      if (tau1 == *L.taut2) return *L.taut2;
      auto T = [&](double x) { return chord_slope(eos, tau1, x) - eos.dp(x, Side::Above); };
      return first_root_above(T, *L.taut2, eos.scan_hi(), "g");
    }
    case TangentMap::psi: {
      need(eos.kind() == EosKind::TypeII, "psi");
      need(tau1 > *L.tau2_i && tau1 < *L.tau3, "psi");
      auto T = [&](double x) { return chord_slope(eos, x, tau1) - eos.dp(x); };
      double lo = *L.tau1_i, hi = *L.tau2_i;
      double flo = T(lo), fhi = T(hi);
      if (!(flo < 0 && fhi > 0)) throw RootNotBracketed("psi: tangency not bracketed");
      return roots::bisect(T, lo, hi, flo, fhi, kRootTol);
    }
    case TangentMap::kappa: {
      need(eos.kind() == EosKind::TypeIII, "kappa");
      need(tau1 > *L.taut2, "kappa");
      return chord_slope(eos, *L.taut2, tau1);
    }
  }
  throw DomainError("unknown tangent map");
}

}  // namespace sphwave
