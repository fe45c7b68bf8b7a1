#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sphwave/builder.hpp"

namespace sphwave {

struct CheckRecord {
  std::string name;
  double max_residual = 0.0;
  double at_s = 0.0;  // location of the worst residual
  bool pass = true;
  double tolerance = 0.0;
  std::vector<std::string> findings;
};

struct AuditReport {
  std::vector<CheckRecord> checks;
  bool pass() const;
  nlohmann::json to_json() const;
};

struct AuditTolerances {
  double rh = 1e-8;
  double entropy = -1e-9;       // lowest accepted margin
  int entropy_grid = 4000;
  double ode = 1e-6;            // sine of the angle between the sampled tangent and the field
  double far_field = 1e-8;
  double boundary_flux = 1e-4;  // |u rho| at the horizon relative to |u0| rho0
  double junction = 1e-8;       // relative state mismatch at junctions
  double quiet_u = 1e-8;        // |u| of a terminal quiet state relative to |u0|
};

// Jump residuals sigma[rho] - [rho u] and sigma[rho u] - [rho u^2 + p] over the local flux scale.
CheckRecord audit_rh(const WaveSolution& sol, const AuditTolerances& tol = {});

// Chord entropy margin on a finer grid; rarefaction shocks on a convex law always fail.
CheckRecord audit_entropy(const WaveSolution& sol, const AuditTolerances& tol = {});

// Direction-field residual of every arc, closed form of every plateau, equilibrium of constant states.
CheckRecord audit_ode(const WaveSolution& sol, const AuditTolerances& tol = {});

// Far-field data at s = 0 and the centre condition rho u = 0 at the end.
CheckRecord audit_boundary(const WaveSolution& sol, const AuditTolerances& tol = {});

// Tiling of (0, s_max], continuity at smooth junctions, one shock per discontinuity.
CheckRecord audit_structure(const WaveSolution& sol, const AuditTolerances& tol = {});

AuditReport audit_all(const WaveSolution& sol, const AuditTolerances& tol = {});

struct OracleRoot {
  double lo = 0.0;  // grid cell holding the sign change
  double hi = 0.0;
  double tau() const { return 0.5 * (lo + hi); }
};

// Sign changes of tau1^2 (-chord(tau1, tau)) - (sigma - u1)^2 on a grid_n-point geometric grid.
std::vector<OracleRoot> oracle_back_state(const EosSpec& eos, const State& front, double sigma, int grid_n);

// Geometric grid in tau - domain.lo used by the oracle.
std::vector<double> oracle_grid(const EosSpec& eos, double tau1, int grid_n);

}  // namespace sphwave
