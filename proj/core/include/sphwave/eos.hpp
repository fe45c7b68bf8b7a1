#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sphwave/errors.hpp"

namespace sphwave {

enum class EosKind { TypeI, TypeII, TypeIII };

// Which one-sided limit to take at a plateau edge.
enum class Side { Below, Above };

struct PressureEval {
  double p;
  double dp;   // dp/dtau
  double d2p;  // d2p/dtau2
};

// p = K * tau^(-alpha)
struct PowerLaw {
  double K = 1.0;
  double alpha = 2.0;
};

// p = A / (tau - 1)^gamma - 1 / tau^2, tau in (1, inf)
struct VanDerWaals {
  double A = 1.0;
  double gamma = 1.4;
};

// Van der Waals base law with the constant p(taut1) on [taut1, taut2].
struct MaxwellPlateau {
  VanDerWaals base;
  double taut1 = 0.0;
  double taut2 = 0.0;
};

// Clamped C2 cubic spline through (tau_i, p_i) with power-law tails that
// match value and slope at both table ends.
struct TabulatedLaw {
  std::vector<double> tau;
  std::vector<double> p;
  std::vector<double> m;  // spline second derivatives at the nodes
  double alpha_lo = 0.0;  // tail exponents
  double alpha_hi = 0.0;
  std::string source;  // file the table came from, informational only

  static TabulatedLaw from_points(std::vector<double> tau, std::vector<double> p,
                                  std::string source = "");
  static TabulatedLaw from_csv(const std::string& path);
};

using PressureLaw = std::variant<PowerLaw, VanDerWaals, MaxwellPlateau, TabulatedLaw>;

struct TauDomain {
  double lo;  // open lower bound
  double hi;  // open upper bound (infinity allowed)
};

struct EosLandmarks {
  std::optional<double> tau1_i, tau2_i;
  std::optional<double> tauhat1, tauhat2;
  std::optional<double> tau3;
  std::optional<double> taut1, taut2;
  std::optional<double> tau_c;
  std::optional<double> b1, b2;

  // All present landmark volumes, sorted ascending.
  std::vector<double> sorted_volumes() const;
};

class EosSpec {
 public:
  // Builds and validates; throws ValidationError on any structural violation.
  static EosSpec make(EosKind kind, PressureLaw law, double nu, std::string name = "");

  EosKind kind() const;
  const PressureLaw& law() const;
  double nu() const;
  const std::string& name() const;
  TauDomain tau_domain() const;
  bool in_domain(double tau) const;

  // Finite tau range used by grid scans.
  double scan_lo() const;
  double scan_hi() const;

  bool has_plateau() const;
  const EosLandmarks& landmarks() const;

  // Pressure and derivatives. Throws DomainError outside the domain.
  PressureEval eval(double tau, Side side = Side::Below) const;
  // Smooth base law without the plateau; equals eval() for laws without one.
  PressureEval eval_smooth(double tau) const;
  double p(double tau) const;
  double dp(double tau, Side side = Side::Below) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

PressureEval eval(const EosSpec& eos, double tau, Side side = Side::Below);

// sqrt(dp/drho) with dp/drho = -tau^2 dp/dtau.
double sound_speed_rho(const EosSpec& eos, double rho, Side side = Side::Below);

// Secant slope (p_b - p_a)/(tau_b - tau_a); tangent slope at the midpoint when
// the two volumes nearly coincide.
double chord_slope(const EosSpec& eos, double tau_a, double tau_b);

EosLandmarks compute_landmarks(const EosSpec& eos);

enum class TangentMap { f, g, psi, kappa };

// f, g, psi: tangency volume x with chord(tau1, x) = p'(x) on the map's side.
// kappa: chord slope from taut2 to tau1.
double tangent_map(const EosSpec& eos, TangentMap which, double tau1);

const char* to_string(EosKind kind);
EosKind eos_kind_from_string(const std::string& s);

namespace builtin {
// p = rho^2
EosSpec convex_power();
// Slightly supercritical van der Waals with two inflections.
EosSpec inflected_vdw();
// Subcritical van der Waals with a Maxwell plateau.
EosSpec plateau_vdw();
}  // namespace builtin

}  // namespace sphwave
