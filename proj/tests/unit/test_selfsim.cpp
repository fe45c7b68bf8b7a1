#include <cmath>

#include <gtest/gtest.h>

#include "sphwave/eos.hpp"
#include "sphwave/ode.hpp"
#include "sphwave/selfsim.hpp"

using namespace sphwave;

TEST(Ode, DormandPrinceExponential) {
  ode::Rhs f = [](double, const ode::Vec2& y) -> std::optional<ode::Vec2> { return ode::Vec2{y[0], -2 * y[1]}; };
  ode::Vec2 y{1.0, 1.0};
  ode::Tolerance tol;
  auto out = ode::dp45_step(f, 0.0, y, *f(0.0, y), 0.1, tol);
  ASSERT_FALSE(out.rhs_failed);
  EXPECT_NEAR(out.y1[0], std::exp(0.1), 1e-7);
  EXPECT_NEAR(out.y1[1], std::exp(-0.2), 1e-7);
  // Dense output at the midpoint.
  EXPECT_NEAR(out.dense.at(0.05)[0], std::exp(0.05), 1e-7);
  EXPECT_DOUBLE_EQ(ode::step_factor(0.0), 5.0);
}

TEST(Selfsim, DenominatorFrozen) {
  auto e = builtin::convex_power();
  // c^2 = 2 at rho = 1; D = s^2 c^2 - (1 - u s)^2.
  auto d = denominator(e, 2.0, State{0.3, 1.0});
  EXPECT_DOUBLE_EQ(d.c2, 2.0);
  EXPECT_NEAR(d.D, 7.84, 1e-14);
  EXPECT_NEAR(d.N, 8.16, 1e-14);
  auto [du, drho] = rhs_s(e, 2.0, State{0.3, 1.0});
  EXPECT_NEAR(du, 0.30612244897959184, 1e-15);
  EXPECT_NEAR(drho, 0.030612244897959183, 1e-15);
}

TEST(Selfsim, ParametrizationsAgree) {
  auto e = builtin::inflected_vdw();
  State st{0.4, 0.2};
  double s = 0.7;
  auto [du_ds, drho_ds] = rhs_s(e, s, st);
  auto [ds_du, drho_du] = rhs_u(e, st.u, s, st.rho);
  EXPECT_NEAR(du_ds * ds_du, 1.0, 1e-13);
  EXPECT_NEAR(drho_du / ds_du, drho_ds, 1e-13 * std::abs(drho_ds));
}

TEST(Selfsim, PlateauClosedForm) {
  PlateauParams p{-0.2, 0.1, 3.0};
  EXPECT_DOUBLE_EQ(plateau_rho(p, 3.0), 0.1);
  double r = (1 + 0.2 * 5.0) / (1 + 0.2 * 3.0);
  EXPECT_NEAR(plateau_rho(p, 5.0), 0.1 * r * r, 1e-15);
}

TEST(Selfsim, PlateauSegmentReachesEdge) {
  auto e = builtin::plateau_vdw();
  const auto& L = e.landmarks();
  double rho_vapor_edge = 1.0 / *L.taut2;
  // Inflow compresses from the vapor edge to the liquid edge.
  Segment seg = plateau_segment(e, -0.1, rho_vapor_edge, 2.0);
  EXPECT_EQ(seg.kind, SegmentKind::PressurePlateau);
  EXPECT_NEAR(seg.end_state().tau(), *L.taut1, 1e-10 * *L.taut1);
  EXPECT_NEAR(seg.end_state().u, -0.1, 1e-15);
}

TEST(Selfsim, ConvexOutflowEndsQuiet) {
  auto e = builtin::convex_power();
  IntegrationControls c;
  auto res = integrate_until_event(e, SelfSimilarPoint{0.0, State{1.0, 1.0}}, StartRegime::Subsonic, 1.0, c);
  EXPECT_EQ(res.event.kind, EventKind::QuietState);
  EXPECT_NEAR(res.event.at.s, 3.299048467, 1e-8);
  EXPECT_NEAR(res.event.at.state.u, 0.0, 1e-8);
  // u decreases along the arc.
  const auto& sm = res.arc.samples;
  for (size_t i = 1; i < sm.size(); ++i) EXPECT_LE(sm[i].state.u, sm[i - 1].state.u + 1e-15);
}

TEST(Selfsim, ConvexFastOutflowReachesVacuum) {
  auto e = builtin::convex_power();
  auto res = integrate_until_event(e, SelfSimilarPoint{0.0, State{3.0, 1.0}}, StartRegime::Subsonic, 1.0, {});
  EXPECT_EQ(res.event.kind, EventKind::SonicVacuum);
  EXPECT_NEAR(res.event.at.s, 0.410071977179, 1e-9);
}
