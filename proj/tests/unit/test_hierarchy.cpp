#include "kdvh/hierarchy.hpp"

#include "../oracles.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>

using namespace kdvh;

TEST(Hierarchy, Coefficients) {
  EXPECT_EQ(coefficient(1), 6.0);
  EXPECT_EQ(coefficient(2), -30.0);
  EXPECT_EQ(coefficient(3), 140.0);
  for (int m = 1; m <= 7; ++m) EXPECT_DOUBLE_EQ(coefficient(m), oracle::flow_coefficient(m));
  for (int m = 1; m <= 6; ++m) {
    EXPECT_NEAR(coefficient(m + 1) / coefficient(m), -2.0 * (2 * m + 3) / (m + 1), 1e-14);
  }
  EXPECT_THROW(coefficient(0), DomainError);
}

TEST(Hierarchy, FlowParamsValidation) {
  EXPECT_THROW(FlowParams(1, 0.0), DomainError);
  EXPECT_THROW(FlowParams(0, 0.1), DomainError);
  EXPECT_NO_THROW(FlowParams(5, 0.1));
  EXPECT_THROW(require_evolvable(4), UnsupportedFlow);
  EXPECT_NO_THROW(require_evolvable(3));
}

namespace {

// Smooth periodic test field on [-pi, pi).
Field test_field(const FourierGrid& g) {
  return 0.3 * g.x().sin() + 0.2 * (2.0 * g.x()).cos() - 0.1 * (3.0 * g.x()).sin();
}

}  // namespace

TEST(Hierarchy, RhsVanishesOnConstants) {
  const FourierGrid g(M_PI, 64);
  for (int m = 1; m <= 3; ++m) {
    EXPECT_LE(rhs(Field::Zero(64), 0.3, m, g).abs().maxCoeff(), 1e-14);
    EXPECT_LE(rhs(Field::Constant(64, -0.7), 0.3, m, g).abs().maxCoeff(), 1e-12);
  }
  EXPECT_THROW(rhs(Field::Zero(64), 0.3, 4, g), UnsupportedFlow);
}

TEST(Hierarchy, RhsInConservationForm) {
  const FourierGrid g(M_PI, 128);
  const Field u = test_field(g);
  for (int m = 1; m <= 3; ++m) {
    const Field r = rhs(u, 0.4, m, g);
    EXPECT_LE(std::abs(r.sum() * g.dx()), 1e-12 * r.abs().maxCoeff()) << "m=" << m;
  }
}

TEST(Hierarchy, FluxPlusDispersionReproducesRhs) {
  // The flux has modes up to 12; a small grid keeps high-order spectral
  // differentiation from amplifying round-off in the empty band.
  const FourierGrid g(M_PI, 32);
  const Field u = test_field(g);
  const double eps = 0.4;
  for (int m = 1; m <= 3; ++m) {
    std::array<Field, 5> d;
    for (int j = 0; j < 2 * m - 1; ++j) d[j] = g.derivative(u, j);
    const Field G = explicit_flux(std::span<const Field>(d.data(), 2 * m - 1), eps, m);
    const Field disp =
        (m % 2 ? -1.0 : 1.0) * std::pow(eps, 2 * m) * g.derivative(u, 2 * m + 1);
    const Field expected = g.derivative(G, 1) + disp;
    EXPECT_LE((rhs(u, eps, m, g) - expected).abs().maxCoeff(), 1e-11) << "m=" << m;
  }
}

TEST(Hierarchy, RhsOfSolitonIsMinusSpeedTimesSlope) {
  // A traveling wave u(x - ct) has u_t = -c u_x.
  const double eps = 0.5, kappa = 1.0, c = 4.0 * eps * eps * kappa * kappa;
  const FourierGrid g(40.0, 2048);
  const Field u = g.x().unaryExpr([&](double x) { return oracle::soliton(x, 0.0, eps, kappa); });
  const Field expected = -c * g.derivative(u, 1);
  EXPECT_LE((rhs(u, eps, 1, g) - expected).abs().maxCoeff(), 1e-8);
}

TEST(Hierarchy, DispersionSymbol) {
  const Field k = Field::LinSpaced(5, 0.0, 4.0);
  for (int m = 1; m <= 3; ++m) {
    const auto s = leading_dispersion_symbol(k, 0.3, m);
    for (int i = 0; i < 5; ++i) {
      EXPECT_NEAR(s[i].real(), 0.0, 0.0);
      EXPECT_NEAR(s[i].imag(), std::pow(0.3, 2 * m) * std::pow(k[i], 2 * m + 1), 1e-12);
    }
  }
}

TEST(Hierarchy, ConservedOfHump) {
  const FourierGrid g(60.0, 8192);
  const Field u = g.x().unaryExpr([](double x) { return oracle::hump(x); });
  const Conserved c = conserved(u, g.dx());
  EXPECT_NEAR(c.mass, -2.0, 1e-12);
  EXPECT_NEAR(c.h0, 2.0 / 3.0, 1e-12);
  const Conserved z = conserved(Field::Zero(16), 0.1);
  EXPECT_EQ(z.mass, 0.0);
  EXPECT_EQ(z.h0, 0.0);
}
