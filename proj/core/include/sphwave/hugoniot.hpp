#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sphwave/eos.hpp"
#include "sphwave/selfsim.hpp"

namespace sphwave {

enum class ShockKind { Compression, Rarefaction };
const char* to_string(ShockKind k);
ShockKind shock_kind_from_string(const std::string& s);

struct ShockRecord {
  double s = 0.0;
  double sigma = 0.0;
  State front;
  State back;
  ShockKind kind = ShockKind::Compression;
  double entropy_margin = 0.0;
  std::string branch_label = "single";
  bool boundary_admissible = false;
};

constexpr double kEntropyEps = 1e-10;

// sigma = u1 + tau1 sqrt(-chord(tau1, tau_back)). Throws InvalidChord if chord >= 0.
double shock_speed(const EosSpec& eos, const State& front, double tau_back);

// u2 = u1 + (tau1 - tau2) sqrt(-chord)
double back_velocity(const EosSpec& eos, const State& front, double tau_back);

struct BackRoot {
  State state;
  std::string label;  // single, plus, middle, minus by position
  bool double_root = false;
};

// All roots of tau1^2 (-chord(tau1, tau2)) = (sigma - u1)^2, ordered by tau2.
// Throws NoRoot when there are none.
std::vector<BackRoot> back_state(const EosSpec& eos, const State& front, double sigma);

struct EntropyResult {
  bool admissible = false;
  double margin = 0.0;
};

// Chord-form entropy test. The margin is the minimum over intermediate volumes of
// (|chord(tau1,tau2)| - |chord(tau1,tau)|) / (w |chord(tau1,tau2)|), where
// w = |tau - tau2| / |tau1 - tau2|, with the one-sided limits at both ends.
EntropyResult entropy_E(const EosSpec& eos, const State& front, double tau_back, int grid = 400);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x, double rel_band = 1e-9) const {
    double band = rel_band * std::max(std::abs(lo), std::abs(hi));
    return x >= lo - band && x <= hi + band;
  }
};

struct AdmissibleSets {
  State front;
  std::vector<Interval> compression;
  std::vector<Interval> rarefaction;
  std::map<std::string, double> boundary_volumes;

  bool admits(double tau_back, double rel_band = 1e-9) const;
};

AdmissibleSets admissible_sets(const EosSpec& eos, const State& front);

// Thread-safe memo of admissible_sets keyed by the bits of tau_front.
class AdmissibleCache {
 public:
  explicit AdmissibleCache(const EosSpec& eos) : eos_(eos) {}
  AdmissibleSets get(const State& front);

 private:
  EosSpec eos_;
  std::mutex mu_;
  std::unordered_map<std::uint64_t, AdmissibleSets> map_;
};

// Builds a ShockRecord; the back velocity follows from the jump relations.
ShockRecord make_shock(const EosSpec& eos, double s, const State& front, double tau_back,
                       const std::string& label);

// Ordered contiguous segments used as the front-state source of a shock family.
struct Carrier {
  std::vector<Segment> segments;
  EventKind terminal = EventKind::MaxSReached;

  double s_begin() const { return segments.front().s_begin; }
  double s_end() const { return segments.back().s_end; }
  State state_at(double s) const;
};

enum class FamilyKind { CompressionFit, RarefactionWindow };

struct FamilySample {
  double s = 0.0;
  State front;
  double xi_hat = 0.0;  // NaN where the gap function is undefined
  double gap = 0.0;     // F(s) for compression, window function for rarefaction; NaN if undefined
  bool has_back = false;
  State back;
  std::string label;  // plus / minus where the gap decides, single otherwise
};

struct ShockFamily {
  FamilyKind kind = FamilyKind::CompressionFit;
  std::vector<FamilySample> samples;
  std::vector<double> jumps;  // located F = 0 crossings
  std::optional<double> window_lo, window_hi;
};

// Family member at a single s. endpoint_limit uses the zero-strength limit at the carrier end.
FamilySample family_member(const EosSpec& eos, const Carrier& carrier, FamilyKind kind, double s,
                           AdmissibleCache* cache = nullptr, bool endpoint_limit = false);

// Compression: xi_hat and F; rarefaction: the window gap with the tangent map.
// Both NaN where undefined.
std::pair<double, double> family_gap(const EosSpec& eos, FamilyKind kind, double s, const State& front);

// Samples a family along the carrier; the rarefaction window is located first.
ShockFamily shock_family(const EosSpec& eos, const Carrier& carrier, FamilyKind kind,
                         int n_samples = 65, AdmissibleCache* cache = nullptr);

}  // namespace sphwave
