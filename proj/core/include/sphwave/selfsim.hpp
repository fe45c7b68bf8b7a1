#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sphwave/eos.hpp"
#include "sphwave/ode.hpp"

namespace sphwave {

struct State {
  double u = 0.0;
  double rho = 0.0;
  double tau() const { return 1.0 / rho; }
};

struct SelfSimilarPoint {
  double s = 0.0;  // t/x
  State state;
};

enum class EventKind {
  SonicVacuum,     // u = 1/s with rho below the vacuum threshold
  QuietState,      // u = h = 0
  SonicInterior,   // 0 < u = h < 1/s
  SonicNegative,   // u = h < 0
  SupersonicEdge,  // u = 1/s + c from the supersonic side
  PlateauEdge,     // tau reached a plateau edge
  MaxSReached
};

const char* to_string(EventKind k);

struct TerminalEvent {
  EventKind kind = EventKind::MaxSReached;
  SelfSimilarPoint at;
};

enum class SegmentKind { SmoothArc, ConstantState, PressurePlateau, Vacuum };

const char* to_string(SegmentKind k);
SegmentKind segment_kind_from_string(const std::string& s);

struct PlateauParams {
  double u = 0.0;
  double rho_start = 0.0;
  double s_start = 0.0;
};

// rho(s) = rho_start * ((1 - u s) / (1 - u s_start))^2
double plateau_rho(const PlateauParams& p, double s);

enum class Param { S, U };

// Dense output of an arc; in U pieces the solution vector is (s, ln rho) over u,
// in S pieces it is (u, ln rho) over s.
struct DensePiece {
  Param param = Param::S;
  ode::DenseStep step;
  double theta_end = 1.0;  // fraction of the step that belongs to the arc
  double s0 = 0.0, s1 = 0.0;
};

struct DenseTrajectory {
  std::vector<DensePiece> pieces;
  std::optional<State> state_at(double s) const;
};

struct Segment {
  SegmentKind kind = SegmentKind::SmoothArc;
  double s_begin = 0.0;
  double s_end = 0.0;
  std::vector<SelfSimilarPoint> samples;  // SmoothArc only
  State state;                            // ConstantState and Vacuum
  PlateauParams plateau;                  // PressurePlateau only
  std::shared_ptr<const DenseTrajectory> dense;  // builder-side interpolant, not serialized

  State state_at(double s) const;
  State begin_state() const { return state_at(s_begin); }
  State end_state() const { return state_at(s_end); }
};

struct IntegrationControls {
  double rtol = 1e-12;
  double atol = 1e-14;          // scaled by the state magnitudes at the start
  double eps_sonic = 1e-10;     // relative sonic degeneracy
  double eps_event = 1e-12;     // event location tolerance in s
  double eps_u = 1e-6;          // band on u*s used to classify sonic stops
  double rho_vac_rel = 1e-12;   // vacuum threshold relative to the reference density
  double s_max = 1e3;
  double delta_switch = 0.05;   // |D|/N below which the u-parametrization takes over
  int max_steps = 200000;
  int dense_subsamples = 2;
};

enum class StartRegime {
  Subsonic,    // u < h
  Supersonic,  // post-shock state with D > 0
  SonicStart   // D = 0; leaves through the u-parametrization
};

struct ArcResult {
  Segment arc;
  TerminalEvent event;
};

// Sonic function 1/s - c(rho).
double h(const EosSpec& eos, double rho, double s);

// Denominator D = s^2 c^2 - (1 - u s)^2 and its normalization N = s^2 c^2 + (1 - u s)^2.
struct Denominator {
  double c2, D, N;
};
Denominator denominator(const EosSpec& eos, double s, const State& st);

// du/ds, drho/ds. Throws SonicSingularity when |D| <= eps_sonic * N.
std::pair<double, double> rhs_s(const EosSpec& eos, double s, const State& st,
                                double eps_sonic = 1e-10);

// ds/du, drho/du. Throws DegenerateParametrization when u, s or c vanish.
std::pair<double, double> rhs_u(const EosSpec& eos, double u, double s, double rho);

// dD/du along the u-parametrized field at a sonic point.
double sonic_dD_du(const EosSpec& eos, double s, const State& st);

ArcResult integrate_until_event(const EosSpec& eos, const SelfSimilarPoint& start,
                                StartRegime regime, double rho_ref,
                                const IntegrationControls& controls);

// Closed-form traversal of the plateau until the edge in the direction of u.
// Throws NoExit if that edge is not reached while u s < 1.
Segment plateau_segment(const EosSpec& eos, double u, double rho_start, double s_start);

}  // namespace sphwave
