#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sphwave/eos.hpp"
#include "sphwave/hugoniot.hpp"
#include "sphwave/selfsim.hpp"

namespace sphwave {

enum class Classification {
  ContinuousVacuum,
  ContinuousQuiet,
  GlobalSmooth,
  RarefactionShockThenVacuum,
  RarefactionShockThenQuiet,
  RarefactionShockThenSmooth,
  SingleCompressionShock,
  TwoCompressionShocks,
  PlateauComposite
};

const char* to_string(Classification c);
Classification classification_from_string(const std::string& s);

struct BuildControls {
  IntegrationControls ode;
  int family_samples = 65;
  double fit_tol = 1e-12;  // relative bisection width in s for shock fits
  int max_depth = 4;
};

struct WaveSolution {
  double u0 = 0.0;
  double rho0 = 0.0;
  EosSpec eos;
  std::vector<Segment> segments;
  std::vector<ShockRecord> shocks;
  Classification classification = Classification::ContinuousQuiet;
  std::vector<std::string> case_tags;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> notes;
  BuildControls controls;

  // State on the side of larger s at a junction.
  State state_at(double s) const;
  double s_max() const { return segments.empty() ? 0.0 : segments.back().s_end; }
};

WaveSolution solve(const EosSpec& eos, double u0, double rho0, const BuildControls& controls = {});

// Region of the data volume among the landmarks of its kind.
enum class Region { Convex, BelowHat1, Hat1ToI1, InflBand, I2To3, Above3, Liquid, Plateau, Vapor };
const char* to_string(Region r);
Region region_of(const EosSpec& eos, double tau);

enum class Action { FinishVacuum, FinishQuiet, FinishSmooth, RarefactionFit, CompressionFit, Impossible };
const char* to_string(Action a);

struct DecisionRow {
  EosKind kind;
  std::vector<Region> regions;  // empty matches every region
  int u_sign;                   // +1 or -1
  EventKind terminal;
  Action action;
  const char* tag;
  bool unresolved = false;  // quiet end accepted only because of the eps_u band
};

const std::vector<DecisionRow>& decision_table();
const DecisionRow& lookup_decision(EosKind kind, Region region, int u_sign, EventKind terminal);

// Runs arcs and plateau crossings from a start point until a non-plateau terminal event.
Carrier run_carrier(const EosSpec& eos, const SelfSimilarPoint& start, StartRegime regime, double rho_ref,
                    const IntegrationControls& controls);

std::optional<std::pair<double, double>> jump_volumes(const EosSpec& eos, const AdmissibleSets& S);

struct QuietFit {
  double s = 0.0;
  ShockRecord shock;
};

// Zero of the back velocity on a continuous branch. Throws NoSignChange.
QuietFit fit_quiet_shock(const EosSpec& eos, const Carrier& carrier, const ShockFamily& family,
                         const BuildControls& controls, AdmissibleCache* cache = nullptr);

struct CriticalStep {
  double u0 = 0.0;
  EventKind event = EventKind::MaxSReached;
};

struct CriticalResult {
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
  std::vector<CriticalStep> trace;
  WaveSolution solution;
};

// Bisection on u0 between a quiet (lo) and a vacuum (hi) classification.
// Throws BracketInvalid if the endpoints do not classify that way.
CriticalResult critical_u0(const EosSpec& eos, double rho0, double lo, double hi, double tol,
                           const BuildControls& controls = {}, double s_classify = 1e9);

// Data (u0, rho0) whose subsonic arc ends at the sonic point (u_star, 1/tau_star):
// the u-parametrized curve is traced back from that point to s = 0.
std::optional<State> sonic_interior_witness(const EosSpec& eos, double tau_star, double u_star,
                                            const IntegrationControls& controls = {});

}  // namespace sphwave
