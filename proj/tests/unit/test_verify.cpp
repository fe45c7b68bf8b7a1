#include <cmath>

#include <gtest/gtest.h>

#include "sphwave/builder.hpp"
#include "sphwave/verify.hpp"

using namespace sphwave;

TEST(Verify, CleanSolutionsPass) {
  for (auto [e, u0, rho0] : {std::tuple{builtin::convex_power(), -1.0, 1.0}, {builtin::convex_power(), 3.0, 1.0},
                            {builtin::inflected_vdw(), -1.0, 1.0 / 9}, {builtin::plateau_vdw(), -0.332, 1.0 / 300}}) {
    auto rep = audit_all(solve(e, u0, rho0));
    EXPECT_TRUE(rep.pass()) << rep.to_json().dump(2);
  }
}

TEST(Verify, BrokenJumpFailsRankineHugoniot) {
  auto sol = solve(builtin::convex_power(), -1.0, 1.0);
  ASSERT_EQ(sol.shocks.size(), 1u);
  sol.shocks[0].back.rho *= 1.01;
  auto rec = audit_rh(sol);
  EXPECT_FALSE(rec.pass);
  EXPECT_GT(rec.max_residual, 1e-4);
}

TEST(Verify, ConvexRarefactionFailsEntropy) {
  auto e = builtin::convex_power();
  auto sol = solve(e, -1.0, 1.0);
  auto& sh = sol.shocks[0];
  sh = make_shock(e, sh.s, sh.front, 1.5 * sh.front.tau(), "single");
  ASSERT_EQ(sh.kind, ShockKind::Rarefaction);
  EXPECT_FALSE(audit_entropy(sol).pass);
}

TEST(Verify, ShiftedArcFailsOde) {
  auto sol = solve(builtin::convex_power(), 1.0, 1.0);
  auto& arc = sol.segments.front();
  ASSERT_EQ(arc.kind, SegmentKind::SmoothArc);
  for (size_t i = 0; i < arc.samples.size(); ++i) arc.samples[i].state.u *= 1.0 + 0.05 * i / arc.samples.size();
  EXPECT_FALSE(audit_ode(sol).pass);
}

TEST(Verify, OracleBracketsBackState) {
  auto e = builtin::inflected_vdw();
  State f{0.05, 1.0 / 9};
  for (double tb : {2.0, 3.0, 8.8}) {
    double sg = shock_speed(e, f, tb);
    auto roots = oracle_back_state(e, f, sg, 100000);
    bool hit = false;
    for (const auto& r : roots) hit |= r.lo <= tb && tb <= r.hi;
    EXPECT_TRUE(hit) << "tau_back = " << tb;
    for (const auto& r : back_state(e, f, sg)) {
      bool found = false;
      for (const auto& o : roots) found |= std::abs(o.tau() - r.state.tau()) <= (o.hi - o.lo) + 1e-9;
      EXPECT_TRUE(found) << "library root " << r.state.tau();
    }
  }
}

TEST(Verify, ReportJsonShape) {
  auto rep = audit_all(solve(builtin::convex_power(), -1.0, 1.0));
  auto j = rep.to_json();
  EXPECT_EQ(j.at("verdict"), "pass");
  EXPECT_EQ(j.at("schema_version"), 1);
  EXPECT_EQ(j.at("checks").size(), rep.checks.size());
  EXPECT_EQ(rep.checks.size(), 5u);
}
