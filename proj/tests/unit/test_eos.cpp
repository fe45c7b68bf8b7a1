#include <cmath>

#include <gtest/gtest.h>

#include "sphwave/eos.hpp"
#include "sphwave/errors.hpp"

using namespace sphwave;

namespace {

// Central difference of p and dp, to check the analytic derivatives.
void expect_derivatives(const EosSpec& e, double tau) {
  const double h = 1e-5 * tau;
  double dp_fd = (e.p(tau + h) - e.p(tau - h)) / (2 * h);
  double d2p_fd = (e.eval(tau + h).dp - e.eval(tau - h).dp) / (2 * h);
  auto v = e.eval(tau);
  EXPECT_NEAR(v.dp, dp_fd, 1e-7 * std::max(1.0, std::abs(v.dp))) << "tau = " << tau;
  EXPECT_NEAR(v.d2p, d2p_fd, 1e-6 * std::max(1.0, std::abs(v.d2p))) << "tau = " << tau;
}

}  // namespace

TEST(Eos, PowerLawClosedForm) {
  auto e = builtin::convex_power();
  EXPECT_EQ(e.kind(), EosKind::TypeI);
  auto v = e.eval(2.0);
  EXPECT_DOUBLE_EQ(v.p, 0.25);
  EXPECT_DOUBLE_EQ(v.dp, -0.25);
  EXPECT_DOUBLE_EQ(v.d2p, 0.375);
  EXPECT_DOUBLE_EQ(sound_speed_rho(e, 1.0), std::sqrt(2.0));
}

TEST(Eos, VanDerWaalsDerivatives) {
  auto e = builtin::inflected_vdw();
  for (double t : {1.2, 2.0, 4.0, 6.5, 9.0, 20.0, 80.0}) expect_derivatives(e, t);
  // Frozen: A (tau-1)^-gamma - tau^-2 at tau = 2 with A = 0.3216.
  EXPECT_NEAR(e.p(2.0), 0.0716, 1e-15);
}

TEST(Eos, InflectedLandmarksFrozen) {
  auto e = builtin::inflected_vdw();
  const auto& L = e.landmarks();
  ASSERT_TRUE(L.tau1_i && L.tau2_i && L.tauhat1 && L.tauhat2 && L.tau3);
  EXPECT_NEAR(*L.tau1_i, 5.22726064524559, 1e-10);
  EXPECT_NEAR(*L.tau2_i, 8.76116635985866, 1e-10);
  EXPECT_NEAR(*L.tauhat1, 4.58905024496531, 1e-10);
  EXPECT_NEAR(*L.tauhat2, 11.9278416297796, 1e-10);
  EXPECT_NEAR(*L.tau3, 36.1340331563572, 1e-9);
  // Inflection points are zeros of p''.
  EXPECT_NEAR(e.eval(*L.tau1_i).d2p, 0.0, 1e-12);
  EXPECT_NEAR(e.eval(*L.tau2_i).d2p, 0.0, 1e-12);
  EXPECT_LT(*L.tauhat1, *L.tau1_i);
  EXPECT_LT(*L.tau2_i, *L.tauhat2);
  EXPECT_LT(*L.tauhat2, *L.tau3);
}

TEST(Eos, PlateauEqualArea) {
  auto e = builtin::plateau_vdw();
  const auto& L = e.landmarks();
  ASSERT_TRUE(L.taut1 && L.taut2 && L.tau_c);
  EXPECT_NEAR(*L.taut2, 12.4020913278915, 1e-9);
  EXPECT_NEAR(*L.tau_c, 26.4788853653204, 1e-9);
  const VanDerWaals base{0.30, 1.4};
  auto pv = [&](double t) { return base.A * std::pow(t - 1, -base.gamma) - 1 / (t * t); };
  double t1 = *L.taut1, t2 = *L.taut2, pp = e.p(0.5 * (t1 + t2));
  EXPECT_NEAR(pv(t1), pp, 1e-12);
  EXPECT_NEAR(pv(t2), pp, 1e-12);
  // Closed-form integral of the base law over the plateau.
  auto prim = [&](double t) { return base.A * std::pow(t - 1, 1 - base.gamma) / (1 - base.gamma) + 1 / t; };
  EXPECT_NEAR(prim(t2) - prim(t1), pp * (t2 - t1), 1e-11);
  EXPECT_EQ(e.dp(0.5 * (t1 + t2)), 0.0);
  EXPECT_LT(e.dp(t1, Side::Below), 0.0);
  EXPECT_LT(e.dp(t2, Side::Above), 0.0);
}

TEST(Eos, ValidationRejectsBadData) {
  EXPECT_THROW(EosSpec::make(EosKind::TypeI, PowerLaw{1.0, 2.0}, -1.0), ValidationError);
  EXPECT_THROW(EosSpec::make(EosKind::TypeI, VanDerWaals{0.3216, 1.4}, 0.2), ValidationError);
  EXPECT_THROW(EosSpec::make(EosKind::TypeII, PowerLaw{1.0, 2.0}, 0.5), Error);
}

TEST(Eos, TableMatchesNodes) {
  std::vector<double> tau, p;
  for (int i = 0; i < 40; ++i) {
    double t = 0.5 * std::pow(1.15, i);
    tau.push_back(t);
    p.push_back(1 / (t * t));
  }
  auto law = TabulatedLaw::from_points(tau, p, "inline");
  auto e = EosSpec::make(EosKind::TypeI, law, 0.5, "table");
  for (size_t i = 0; i < tau.size(); ++i) EXPECT_NEAR(e.p(tau[i]), p[i], 1e-14 * p[i]);
  // Between nodes the spline tracks the power law closely.
  EXPECT_NEAR(e.p(3.3), 1 / (3.3 * 3.3), 3e-4 / (3.3 * 3.3));
}

TEST(Eos, KindNamesRoundTrip) {
  for (auto k : {EosKind::TypeI, EosKind::TypeII, EosKind::TypeIII}) {
    EXPECT_EQ(eos_kind_from_string(to_string(k)), k);
  }
}
