#include "kdvh/spectral.hpp"

#include "../oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace kdvh;

TEST(Spectral, InitStateChecksTails) {
  const auto p = InitialProfile::sech2();
  const auto s = init_state(p, 0.1, 1, 60.0, 1 << 14);
  EXPECT_EQ(s.u.size(), 1 << 14);
  EXPECT_EQ(s.t, 0.0);
  EXPECT_THROW(init_state(p, 0.1, 1, 3.0, 256), DomainTooSmall);
  EXPECT_THROW(init_state(p, 0.1, 4, 60.0, 256), UnsupportedFlow);
  EXPECT_THROW(init_state(p, 0.1, 1, 60.0, 1000), DomainError);
}

TEST(Spectral, ZeroStaysZero) {
  for (int m = 1; m <= 3; ++m) {
    const auto s = init_state(Field::Zero(256), FlowParams(m, 0.1), 10.0);
    EvolveOptions opts;
    opts.dt = 1e-3;
    const auto out = evolve(s, 0.05, opts);
    EXPECT_EQ(out.u.abs().maxCoeff(), 0.0);
    EXPECT_DOUBLE_EQ(out.t, 0.05);
  }
}

TEST(Spectral, SampleAtNodesAndMidpoints) {
  const auto s = init_state(InitialProfile::sech2(), 0.1, 1, 30.0, 1024);
  const SpectralSampler at(s);
  for (int i : {0, 100, 512, 700}) EXPECT_NEAR(at(s.x()[i]), s.u[i], 1e-13);
  for (double x : {-2.0 + 0.5 * s.dx(), 0.3 * s.dx(), 1.7}) EXPECT_NEAR(at(x), oracle::hump(x), 1e-12);
  EXPECT_THROW(at(30.0), DomainError);
  EXPECT_THROW(at(-31.0), DomainError);
}

TEST(Spectral, SolitonTransport) {
  const double eps = 0.5, kappa = 1.0, Lx = 40.0;
  const int N = 1 << 12;
  FourierGrid g(Lx, N);
  const Field u0 = g.x().unaryExpr([&](double x) { return oracle::soliton(x, 0.0, eps, kappa); });
  const auto s = init_state(u0, FlowParams(1, eps), Lx);
  EvolveStats st;
  const auto out = evolve(s, 1.0, {}, &st);
  const Field exact = g.x().unaryExpr([&](double x) { return oracle::soliton(x, 1.0, eps, kappa); });
  EXPECT_LE((out.u - exact).abs().maxCoeff(), 1e-6);
  EXPECT_DOUBLE_EQ(out.t, 1.0);
  EXPECT_GT(st.steps, 0);
}

TEST(Spectral, FourthOrderInTime) {
  const double eps = 0.5, kappa = 1.0, Lx = 40.0;
  FourierGrid g(Lx, 1024);
  const Field u0 = g.x().unaryExpr([&](double x) { return oracle::soliton(x, 0.0, eps, kappa); });
  const auto s = init_state(u0, FlowParams(1, eps), Lx);
  auto run = [&](double dt) {
    EvolveOptions o;
    o.dt = dt;
    o.sentinel_tol = 1.0;  // coarse steps stir the top band; only the rate matters
    return evolve(s, 0.5, o).u;
  };
  const Field a = run(0.01), b = run(0.005), c = run(0.0025);
  const double rate = std::log2((a - b).abs().maxCoeff() / (b - c).abs().maxCoeff());
  EXPECT_GT(rate, 3.6) << rate;
  EXPECT_LT(rate, 4.6);
}

TEST(Spectral, ConservationDriftForAllFlows) {
  const auto p = InitialProfile::sech2();
  struct Case {
    int m;
    double eps, t, Lx;
    int N;
  };
  for (const Case c : {Case{1, 0.1, 0.15, 30.0, 4096}, Case{2, 0.2, 0.006, 20.0, 2048},
                       Case{3, 0.2, 0.00025, 20.0, 1024}}) {
    const auto s = init_state(p, c.eps, c.m, c.Lx, c.N);
    EvolveStats st;
    evolve(s, c.t, {}, &st);
    EXPECT_LE(st.mass_drift / c.t, 1e-10) << "m=" << c.m;
    EXPECT_LE(st.h0_drift / c.t, 1e-8) << "m=" << c.m;
    EXPECT_LE(st.tail_ratio, 1e-10);
  }
}

TEST(Spectral, LandsExactlyOnTarget) {
  const auto s = init_state(InitialProfile::sech2(), 0.1, 1, 30.0, 2048);
  EvolveOptions o;
  o.dt = 0.003;
  o.record_dt = true;
  EvolveStats st;
  const auto out = evolve(s, 0.01, o, &st);
  EXPECT_EQ(out.t, 0.01);
  ASSERT_EQ(st.dt_history.size(), 4u);
  EXPECT_NEAR(st.dt_history.back(), 0.001, 1e-15);
  EXPECT_THROW(evolve(out, 0.005), DomainError);
}

TEST(Spectral, HugeStepIsUnstable) {
  const auto s = init_state(InitialProfile::sech2(), 0.1, 2, 30.0, 2048);
  EvolveOptions o;
  o.dt = 1e-2;
  o.sentinel_tol = 1.0;
  // Unstable modes start at round-off level; twenty steps let them explode.
  EXPECT_THROW(evolve(s, 0.2, o), Instability);
}

TEST(Spectral, UnderResolvedRunTripsSentinel) {
  const auto s = init_state(InitialProfile::sech2(), 0.02, 1, 30.0, 512);
  EXPECT_THROW(evolve(s, 0.2), ResolutionLoss);
}

TEST(Spectral, AutomaticStepShrinksForHigherFlows) {
  FourierGrid g(30.0, 4096);
  const auto p = InitialProfile::sech2();
  const double dt1 = auto_time_step(init_state(p, 0.1, 1, 30.0, 4096), g, {});
  const double dt2 = auto_time_step(init_state(p, 0.1, 2, 30.0, 4096), g, {});
  const double dt3 = auto_time_step(init_state(p, 0.1, 3, 30.0, 4096), g, {});
  EXPECT_NEAR(dt1, 0.5 * g.dx() / 6.0, 1e-15);
  EXPECT_LT(dt2, dt1);
  EXPECT_LT(dt3, dt2);
}

TEST(Spectral, TailRatioOfSmoothDataIsTiny) {
  EXPECT_LT(spectral_tail_ratio(init_state(InitialProfile::sech2(), 0.1, 1, 30.0, 2048)), 1e-14);
}
