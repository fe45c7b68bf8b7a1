#include "sphwave/eos.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "sphwave/roots.hpp"

namespace sphwave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kChordSplit = 1e-6;  // relative width below which chords use the midpoint tangent
constexpr int kScanPoints = 4001;

PressureEval eval_power(const PowerLaw& l, double tau) {
  double p = l.K * std::pow(tau, -l.alpha);
  return {p, -l.alpha * p / tau, l.alpha * (l.alpha + 1.0) * p / (tau * tau)};
}

PressureEval eval_vdw(const VanDerWaals& l, double tau) {
  double d = tau - 1.0;
  double q = l.A * std::pow(d, -l.gamma);
  double t2 = 1.0 / (tau * tau);
  return {q - t2, -l.gamma * q / d + 2.0 * t2 / tau,
          l.gamma * (l.gamma + 1.0) * q / (d * d) - 6.0 * t2 * t2};
}

PressureEval eval_table(const TabulatedLaw& l, double tau) {
  const auto& x = l.tau;
  const auto& y = l.p;
  size_t n = x.size();
  if (tau < x.front()) {
    double a = l.alpha_lo;
    double p = y.front() * std::pow(tau / x.front(), -a);
    return {p, -a * p / tau, a * (a + 1.0) * p / (tau * tau)};
  }
  if (tau > x.back()) {
    double a = l.alpha_hi;
    double p = y.back() * std::pow(tau / x.back(), -a);
    return {p, -a * p / tau, a * (a + 1.0) * p / (tau * tau)};
  }
  size_t i = std::upper_bound(x.begin(), x.end(), tau) - x.begin();
  i = std::clamp<size_t>(i, 1, n - 1) - 1;
  double h = x[i + 1] - x[i];
  double a = (x[i + 1] - tau) / h;
  double b = (tau - x[i]) / h;
  const auto& m = l.m;
  double p = a * y[i] + b * y[i + 1] + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
  double dp = (y[i + 1] - y[i]) / h - (3 * a * a - 1) / 6.0 * h * m[i] + (3 * b * b - 1) / 6.0 * h * m[i + 1];
  double d2p = a * m[i] + b * m[i + 1];
  return {p, dp, d2p};
}

// Clamped spline second derivatives; end slopes from one-sided 3-point stencils.
std::vector<double> clamped_spline(const std::vector<double>& x, const std::vector<double>& y,
                                   double& slope_lo, double& slope_hi) {
  size_t n = x.size();
  double h0 = x[1] - x[0], h1 = x[2] - x[1];
  slope_lo = -(2 * h0 + h1) / (h0 * (h0 + h1)) * y[0] + (h0 + h1) / (h0 * h1) * y[1] -
             h0 / (h1 * (h0 + h1)) * y[2];
  double ha = x[n - 1] - x[n - 2], hb = x[n - 2] - x[n - 3];
  slope_hi = ha / (hb * (ha + hb)) * y[n - 3] - (ha + hb) / (ha * hb) * y[n - 2] +
             (2 * ha + hb) / (ha * (ha + hb)) * y[n - 1];

  std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0), rhs(n, 0.0);
  diag[0] = 2 * h0;
  sup[0] = h0;
  rhs[0] = 6 * ((y[1] - y[0]) / h0 - slope_lo);
  for (size_t i = 1; i + 1 < n; ++i) {
    double hl = x[i] - x[i - 1], hr = x[i + 1] - x[i];
    sub[i] = hl;
    diag[i] = 2 * (hl + hr);
    sup[i] = hr;
    rhs[i] = 6 * ((y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl);
  }
  sub[n - 1] = ha;
  diag[n - 1] = 2 * ha;
  rhs[n - 1] = 6 * (slope_hi - (y[n - 1] - y[n - 2]) / ha);

  // Thomas algorithm.
  for (size_t i = 1; i < n; ++i) {
    double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> m(n);
  m[n - 1] = rhs[n - 1] / diag[n - 1];
  for (size_t i = n - 1; i-- > 0;) m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
  return m;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

TabulatedLaw TabulatedLaw::from_points(std::vector<double> tau, std::vector<double> p,
                                       std::string source) {
  if (tau.size() != p.size() || tau.size() < 4) {
    throw ValidationError("tabulated law needs at least 4 (tau, p) rows");
  }
  for (size_t i = 0; i < tau.size(); ++i) {
    if (!(tau[i] > 0) || !std::isfinite(tau[i]) || !std::isfinite(p[i]) || !(p[i] > 0)) {
      throw ValidationError("tabulated law needs positive finite tau and p");
    }
    if (i > 0 && !(tau[i] > tau[i - 1])) {
      throw ValidationError("tabulated tau must be strictly increasing");
    }
    if (i > 0 && !(p[i] < p[i - 1])) {
      throw ValidationError("tabulated p must be strictly decreasing");
    }
  }
  TabulatedLaw l;
  double s_lo = 0, s_hi = 0;
  l.m = clamped_spline(tau, p, s_lo, s_hi);
  l.alpha_lo = -tau.front() * s_lo / p.front();
  l.alpha_hi = -tau.back() * s_hi / p.back();
  if (!(l.alpha_lo > 0) || !(l.alpha_hi > 0)) {
    throw ValidationError("tabulated law end slopes must be negative");
  }
  l.tau = std::move(tau);
  l.p = std::move(p);
  l.source = std::move(source);
  return l;
}

TabulatedLaw TabulatedLaw::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open table file: " + path);
  std::vector<double> tau, p;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a, b;
    if (!(ls >> a)) continue;  // blank or header line
    if (!(ls >> b)) throw ConfigError("malformed table row in " + path + ": " + line);
    tau.push_back(a);
    p.push_back(b);
  }
  return from_points(std::move(tau), std::move(p), path);
}

std::vector<double> EosLandmarks::sorted_volumes() const {
  std::vector<double> v;
  for (const auto* o : {&tau1_i, &tau2_i, &tauhat1, &tauhat2, &tau3, &taut1, &taut2, &tau_c}) {
    if (o->has_value()) v.push_back(**o);
  }
  std::sort(v.begin(), v.end());
  return v;
}

struct EosSpec::Impl {
  EosKind kind;
  PressureLaw law;
  double nu;
  std::string name;
  TauDomain domain;
  double scan_lo, scan_hi;
  bool plateau = false;
  double taut1 = 0, taut2 = 0, p_plateau = 0;
  EosLandmarks landmarks;
};

EosKind EosSpec::kind() const { return impl_->kind; }
const PressureLaw& EosSpec::law() const { return impl_->law; }
double EosSpec::nu() const { return impl_->nu; }
const std::string& EosSpec::name() const { return impl_->name; }
TauDomain EosSpec::tau_domain() const { return impl_->domain; }
double EosSpec::scan_lo() const { return impl_->scan_lo; }
double EosSpec::scan_hi() const { return impl_->scan_hi; }
bool EosSpec::has_plateau() const { return impl_->plateau; }
const EosLandmarks& EosSpec::landmarks() const { return impl_->landmarks; }

bool EosSpec::in_domain(double tau) const {
  return std::isfinite(tau) && tau > impl_->domain.lo && tau < impl_->domain.hi;
}

PressureEval EosSpec::eval_smooth(double tau) const {
  if (!in_domain(tau)) throw DomainError("tau outside domain: " + fmt(tau));
  return std::visit(
      [&](const auto& l) -> PressureEval {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, PowerLaw>) return eval_power(l, tau);
        if constexpr (std::is_same_v<L, VanDerWaals>) return eval_vdw(l, tau);
        if constexpr (std::is_same_v<L, MaxwellPlateau>) return eval_vdw(l.base, tau);
        if constexpr (std::is_same_v<L, TabulatedLaw>) return eval_table(l, tau);
      },
      impl_->law);
}

PressureEval EosSpec::eval(double tau, Side side) const {
  if (impl_->plateau) {
    const auto& I = *impl_;
    bool below = tau < I.taut1 || (tau == I.taut1 && side == Side::Below);
    bool above = tau > I.taut2 || (tau == I.taut2 && side == Side::Above);
    if (!below && !above) {
      if (!in_domain(tau)) throw DomainError("tau outside domain: " + fmt(tau));
      return {I.p_plateau, 0.0, 0.0};
    }
  }
  return eval_smooth(tau);
}

double EosSpec::p(double tau) const { return eval(tau).p; }
double EosSpec::dp(double tau, Side side) const { return eval(tau, side).dp; }

PressureEval eval(const EosSpec& eos, double tau, Side side) { return eos.eval(tau, side); }

double sound_speed_rho(const EosSpec& eos, double rho, Side side) {
  if (!(rho > 0)) throw DomainError("density must be positive: " + fmt(rho));
  double tau = 1.0 / rho;
  double c2 = -tau * tau * eos.dp(tau, side);
  if (c2 < 0) throw DomainError("dp/drho negative at rho = " + fmt(rho));
  return std::sqrt(c2);
}

double chord_slope(const EosSpec& eos, double tau_a, double tau_b) {
  double w = std::abs(tau_a - tau_b);
  if (w <= kChordSplit * std::max(std::abs(tau_a), std::abs(tau_b))) {
    return eos.dp(0.5 * (tau_a + tau_b));
  }
  return (eos.p(tau_b) - eos.p(tau_a)) / (tau_b - tau_a);
}

namespace {

// Tau at which the base law first re-attains level p_level beyond taut1.
double plateau_right_edge(const VanDerWaals& base, double taut1, double hi) {
  double level = eval_vdw(base, taut1).p;
  auto g = [&](double t) { return eval_vdw(base, t).p - level; };
  auto grid = roots::geomspace(taut1 * (1 + 1e-9), hi, kScanPoints);
  auto r = roots::all_roots(g, grid, 1e-15);
  if (r.empty()) throw ValidationError("plateau level is never re-attained to the right of taut1");
  return r.back();
}

void validate_params(EosKind kind, const PressureLaw& law, double nu) {
  if (!(nu > 0) || !std::isfinite(nu)) throw ValidationError("nu must be positive");
  std::visit(
      [&](const auto& l) {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, PowerLaw>) {
          if (!(l.K > 0) || !(l.alpha > 0)) throw ValidationError("power law needs K > 0, alpha > 0");
        }
        if constexpr (std::is_same_v<L, VanDerWaals>) {
          if (!(l.A > 0) || !(l.gamma > 1) || !(l.gamma <= 5.0 / 3.0 + 1e-15)) {
            throw ValidationError("van der Waals law needs A > 0 and 1 < gamma <= 5/3");
          }
        }
        if constexpr (std::is_same_v<L, MaxwellPlateau>) {
          if (kind != EosKind::TypeIII) throw ValidationError("plateau law requires kind III");
          if (!(l.base.A > 0) || !(l.base.gamma > 1) || !(l.base.gamma <= 5.0 / 3.0 + 1e-15)) {
            throw ValidationError("plateau base law needs A > 0 and 1 < gamma <= 5/3");
          }
          if (!(l.taut1 > 1) || (l.taut2 > 0 && !(l.taut2 > l.taut1))) {
            throw ValidationError("plateau edges must satisfy 1 < taut1 < taut2");
          }
        }
      },
      law);
  if (kind == EosKind::TypeIII && !std::holds_alternative<MaxwellPlateau>(law)) {
    throw ValidationError("kind III requires a plateau law");
  }
}

void validate_shape(const EosSpec& eos) {
  auto grid = roots::geomspace(eos.scan_lo(), eos.scan_hi(), kScanPoints);
  std::vector<int> signs;
  for (double t : grid) {
    if (eos.has_plateau() && t >= *eos.landmarks().taut1 && t <= *eos.landmarks().taut2) continue;
    PressureEval e = eos.eval(t);
    if (!(e.dp < 0)) throw ValidationError("p is not strictly decreasing at tau = " + fmt(t));
    int s = roots::sign(e.d2p);
    if (s != 0 && (signs.empty() || signs.back() != s)) signs.push_back(s);
  }
  switch (eos.kind()) {
    case EosKind::TypeI:
    case EosKind::TypeIII:
      if (signs != std::vector<int>{1}) throw ValidationError("p'' must be positive everywhere for this kind");
      break;
    case EosKind::TypeII:
      if (signs != std::vector<int>{1, -1, 1}) {
        throw ValidationError("kind II requires p'' to change sign exactly twice (+, -, +)");
      }
      break;
  }
}

// dp/drho / rho^nu monotone decreasing toward the vacuum limit.
void validate_a1(const EosSpec& eos) {
  double tau_ref = std::max(1.0, 2.0 * eos.tau_domain().lo);
  for (double v : eos.landmarks().sorted_volumes()) tau_ref = std::max(tau_ref, 2.0 * v);
  double rho_ref = 1.0 / tau_ref;
  const double rho_min = 1e-8;
  if (rho_ref <= rho_min * 10) throw ValidationError("vacuum monotonicity check range is empty");
  auto grid = roots::geomspace(rho_min, rho_ref, 201);
  std::reverse(grid.begin(), grid.end());  // decreasing rho
  double threshold = std::sqrt(rho_ref * rho_min);
  double prev = kInf;
  for (double rho : grid) {
    double tau = 1.0 / rho;
    double c2 = -tau * tau * eos.eval_smooth(tau).dp;
    double r = c2 / std::pow(rho, eos.nu());
    if (rho <= threshold && !(r < prev)) {
      throw ValidationError("dp/drho / rho^nu is not decreasing near vacuum (rho = " +
                            fmt(rho) + ")");
    }
    prev = r;
  }
}

void validate_landmarks(const EosSpec& eos) {
  const auto& L = eos.landmarks();
  if (eos.kind() == EosKind::TypeII) {
    if (!(*L.tauhat1 < *L.tau1_i && *L.tau1_i < *L.tau2_i && *L.tau2_i < *L.tauhat2)) {
      throw ValidationError("landmark ordering tauhat1 < tau1_i < tau2_i < tauhat2 violated");
    }
    if (!(*L.tau3 > *L.tau2_i)) throw ValidationError("tau3 must exceed tau2_i");
  }
  if (eos.kind() == EosKind::TypeIII) {
    double dp1 = eos.dp(*L.taut1, Side::Below);
    double dpc = eos.dp(*L.tau_c);
    if (!(dp1 < dpc)) throw ValidationError("p'(taut1-) must be below p'(tau_c)");
    if (!(*L.b1 > *L.b2 && *L.b2 > 0) || !std::isfinite(*L.b1)) {
      throw ValidationError("plateau edge speeds must satisfy b1 > b2 > 0");
    }
  }
}

}  // namespace

EosSpec EosSpec::make(EosKind kind, PressureLaw law, double nu, std::string name) {
  validate_params(kind, law, nu);
  auto impl = std::make_shared<Impl>();
  impl->kind = kind;
  impl->nu = nu;
  impl->name = std::move(name);
  std::visit(
      [&](auto& l) {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, PowerLaw>) {
          impl->domain = {0.0, kInf};
          impl->scan_lo = 1e-6;
          impl->scan_hi = 1e6;
        }
        if constexpr (std::is_same_v<L, VanDerWaals> || std::is_same_v<L, MaxwellPlateau>) {
          impl->domain = {1.0, kInf};
          impl->scan_lo = 1.0 + 1e-6;
          impl->scan_hi = 1e6;
        }
        if constexpr (std::is_same_v<L, TabulatedLaw>) {
          impl->domain = {0.0, kInf};
          impl->scan_lo = l.tau.front() * 1e-3;
          impl->scan_hi = l.tau.back() * 1e3;
        }
        if constexpr (std::is_same_v<L, MaxwellPlateau>) {
          // taut2 is the level crossing of the base law; a given value must agree.
          double t2 = plateau_right_edge(l.base, l.taut1, impl->scan_hi);
          if (l.taut2 > 0 && std::abs(l.taut2 - t2) > 1e-8 * t2) {
            throw ValidationError("p is discontinuous across the plateau: taut2 should be " + fmt(t2));
          }
          l.taut2 = t2;
          impl->plateau = true;
          impl->taut1 = l.taut1;
          impl->taut2 = t2;
          impl->p_plateau = eval_vdw(l.base, l.taut1).p;
        }
      },
      law);
  impl->law = std::move(law);

  EosSpec eos;
  eos.impl_ = impl;
  if (impl->plateau) {
    impl->landmarks.taut1 = impl->taut1;
    impl->landmarks.taut2 = impl->taut2;
  }
  validate_shape(eos);
  try {
    impl->landmarks = compute_landmarks(eos);
  } catch (const Error& e) {
    throw ValidationError(std::string("landmarks: ") + e.what());
  }
  validate_landmarks(eos);
  validate_a1(eos);
  return eos;
}

const char* to_string(EosKind kind) {
  switch (kind) {
    case EosKind::TypeI: return "I";
    case EosKind::TypeII: return "II";
    case EosKind::TypeIII: return "III";
  }
  return "?";
}

EosKind eos_kind_from_string(const std::string& s) {
  if (s == "I" || s == "1" || s == "TypeI") return EosKind::TypeI;
  if (s == "II" || s == "2" || s == "TypeII") return EosKind::TypeII;
  if (s == "III" || s == "3" || s == "TypeIII") return EosKind::TypeIII;
  throw ConfigError("unknown EOS kind: " + s);
}

namespace builtin {

EosSpec convex_power() {
  return EosSpec::make(EosKind::TypeI, PowerLaw{1.0, 2.0}, 0.5, "convex_power");
}

EosSpec inflected_vdw() {
  return EosSpec::make(EosKind::TypeII, VanDerWaals{0.3216, 1.4}, 0.2, "inflected_vdw");
}

EosSpec plateau_vdw() {
  MaxwellPlateau m;
  m.base = VanDerWaals{0.30, 1.4};
  m.taut1 = 2.875898489085182;
  return EosSpec::make(EosKind::TypeIII, m, 0.2, "plateau_vdw");
}

}  // namespace builtin

}  // namespace sphwave
