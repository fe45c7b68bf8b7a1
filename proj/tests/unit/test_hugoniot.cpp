#include <cmath>

#include <gtest/gtest.h>

#include "sphwave/eos.hpp"
#include "sphwave/hugoniot.hpp"

using namespace sphwave;

TEST(Hugoniot, ConvexBackStateClosedForm) {
  // p = tau^-2, front (0, 1): sigma^2 = (1 - 1/t^2) / (1 - t) = (1 + t) / t^2.
  auto e = builtin::convex_power();
  State f{0.0, 1.0};
  EXPECT_NEAR(shock_speed(e, f, 0.5), std::sqrt(6.0), 1e-14);
  EXPECT_NEAR(back_velocity(e, f, 0.5), std::sqrt(6.0) / 2, 1e-14);
  auto roots = back_state(e, f, std::sqrt(6.0));
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_EQ(roots[0].label, "single");
  EXPECT_NEAR(roots[0].state.tau(), 0.5, 1e-13);
  EXPECT_NEAR(roots[0].state.u, 1.22474487139159, 1e-13);
}

TEST(Hugoniot, MassAndMomentumBalance) {
  auto e = builtin::inflected_vdw();
  State f{0.1, 1.0 / 9};
  for (double tb : {2.0, 3.5, 8.8}) {
    double sg = shock_speed(e, f, tb);
    State b{back_velocity(e, f, tb), 1.0 / tb};
    double m = f.rho * (f.u - sg);
    EXPECT_NEAR(b.rho * (b.u - sg), m, 1e-13);
    EXPECT_NEAR(e.p(f.tau()) + m * f.u - (e.p(tb) + m * b.u), 0.0, 1e-13);
  }
}

TEST(Hugoniot, InflectedAdmissibleSetsFrozen) {
  auto e = builtin::inflected_vdw();
  auto S = admissible_sets(e, State{0.0, 1.0 / 9});
  ASSERT_EQ(S.compression.size(), 2u);
  EXPECT_NEAR(S.compression[0].hi, 3.816647441115, 1e-9);
  EXPECT_NEAR(S.compression[1].lo, 8.64518632222632, 1e-9);
  EXPECT_NEAR(S.boundary_volumes.at("tau_1b"), 3.816647441115, 1e-9);
  EXPECT_NEAR(S.boundary_volumes.at("tau_1c"), 8.64518632222632, 1e-9);
  EXPECT_TRUE(S.admits(3.0));
  EXPECT_FALSE(S.admits(6.0));
  EXPECT_TRUE(S.admits(8.8));
}

TEST(Hugoniot, EntropyCondition) {
  auto e = builtin::convex_power();
  State f{0.0, 1.0};
  EXPECT_TRUE(entropy_E(e, f, 0.5).admissible);
  // Convex law: every rarefaction shock is inadmissible.
  EXPECT_FALSE(entropy_E(e, f, 2.0).admissible);
  auto sh = make_shock(e, 1.0, f, 0.5, "single");
  EXPECT_EQ(sh.kind, ShockKind::Compression);
  EXPECT_GT(sh.entropy_margin, 0.0);
  auto rs = make_shock(e, 1.0, f, 2.0, "single");
  EXPECT_EQ(rs.kind, ShockKind::Rarefaction);
}

TEST(Hugoniot, ShockKindNamesRoundTrip) {
  for (auto k : {ShockKind::Compression, ShockKind::Rarefaction}) EXPECT_EQ(shock_kind_from_string(to_string(k)), k);
}
