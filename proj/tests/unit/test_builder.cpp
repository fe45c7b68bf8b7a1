#include <cmath>

#include <gtest/gtest.h>

#include "sphwave/builder.hpp"
#include "sphwave/errors.hpp"

using namespace sphwave;

namespace {

struct Frozen {
  const char* name;
  EosSpec eos;
  double u0, rho0;
  Classification cls;
  std::vector<double> shock_s;
};

std::vector<Frozen> frozen_cases() {
  auto a = builtin::convex_power(), b = builtin::inflected_vdw(), c = builtin::plateau_vdw();
  return {
      {"convex_inflow", a, -1.0, 1.0, Classification::SingleCompressionShock, {0.479808121693}},
      {"convex_slow_outflow", a, 1.0, 1.0, Classification::ContinuousQuiet, {}},
      {"convex_fast_outflow", a, 3.0, 1.0, Classification::ContinuousVacuum, {}},
      {"inflected_inflow", b, -1.0, 1.0 / 9, Classification::SingleCompressionShock, {0.883232581784}},
      {"inflected_outflow", b, 0.5, 1.0 / 3, Classification::ContinuousQuiet, {}},
      {"inflected_window", b, 0.0130966066499, 1 / 4.04797793012, Classification::RarefactionShockThenQuiet,
       {12.8353371864}},
      {"plateau_vapor_inflow", c, -0.332, 1.0 / 300, Classification::TwoCompressionShocks,
       {7.45135416559, 38.7108182923}},
  };
}

}  // namespace

TEST(Builder, FrozenClassifications) {
  for (const auto& f : frozen_cases()) {
    SCOPED_TRACE(f.name);
    auto sol = solve(f.eos, f.u0, f.rho0);
    EXPECT_EQ(sol.classification, f.cls) << to_string(sol.classification);
    ASSERT_EQ(sol.shocks.size(), f.shock_s.size());
    for (size_t i = 0; i < f.shock_s.size(); ++i) EXPECT_NEAR(sol.shocks[i].s, f.shock_s[i], 1e-8 * f.shock_s[i]);
    EXPECT_DOUBLE_EQ(sol.s_max(), sol.controls.ode.s_max);
    // Far field is the data.
    auto st = sol.state_at(0.0);
    EXPECT_DOUBLE_EQ(st.u, f.u0);
    EXPECT_DOUBLE_EQ(st.rho, f.rho0);
  }
}

TEST(Builder, QuietCoreAfterCompression) {
  auto sol = solve(builtin::convex_power(), -1.0, 1.0);
  ASSERT_EQ(sol.shocks.size(), 1u);
  EXPECT_NEAR(sol.shocks[0].back.u, 0.0, 1e-8);
  EXPECT_EQ(sol.segments.back().kind, SegmentKind::ConstantState);
  EXPECT_NEAR(sol.diagnostics.at("s_s"), 0.479808121693, 1e-9);
}

TEST(Builder, DecisionTableLookup) {
  const auto& row = lookup_decision(EosKind::TypeI, Region::Convex, +1, EventKind::SonicVacuum);
  EXPECT_EQ(row.action, Action::FinishVacuum);
  const auto& in = lookup_decision(EosKind::TypeI, Region::Convex, -1, EventKind::SonicNegative);
  EXPECT_EQ(in.action, Action::CompressionFit);
  const auto& band = lookup_decision(EosKind::TypeI, Region::Convex, -1, EventKind::QuietState);
  EXPECT_TRUE(band.unresolved);
}

TEST(Builder, Regions) {
  auto b = builtin::inflected_vdw();
  EXPECT_EQ(region_of(b, 2.0), Region::BelowHat1);
  EXPECT_EQ(region_of(b, 9.0), Region::I2To3);
  auto c = builtin::plateau_vdw();
  EXPECT_EQ(region_of(c, 5.0), Region::Plateau);
  EXPECT_EQ(region_of(c, 300.0), Region::Vapor);
}

TEST(Builder, CriticalBisectionFrozen) {
  auto r = critical_u0(builtin::convex_power(), 1.0, 0.01, 3.0, 1e-6);
  EXPECT_LE(r.hi - r.lo, 1e-6);
  EXPECT_LE(r.iterations, 22);
  EXPECT_NEAR(r.lo, 1.18992146730423, 1e-12);
  EXPECT_NEAR(r.hi, 1.18992218017578, 1e-12);
}

TEST(Builder, CriticalRejectsBadBracket) {
  EXPECT_THROW(critical_u0(builtin::convex_power(), 1.0, 2.0, 3.0, 1e-6), BracketInvalid);
}

TEST(Builder, ClassificationNamesRoundTrip) {
  for (auto c : {Classification::ContinuousVacuum, Classification::ContinuousQuiet, Classification::GlobalSmooth,
                 Classification::RarefactionShockThenVacuum, Classification::RarefactionShockThenQuiet,
                 Classification::RarefactionShockThenSmooth, Classification::SingleCompressionShock,
                 Classification::TwoCompressionShocks, Classification::PlateauComposite}) {
    EXPECT_EQ(classification_from_string(to_string(c)), c);
  }
}
