#include "kdvh/painleve.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace kdvh;

namespace {

// Fields are shared between tests; each solve takes a fraction of a second.
const PainleveField& field_at(double T) {
  static std::map<double, PainleveField> cache;
  static PainleveContinuation path;
  auto it = cache.find(T);
  if (it == cache.end()) it = cache.emplace(T, path.solve(T)).first;
  return it->second;
}

Field central_difference(const Field& f, double h) {
  Field d = Field::Zero(f.size());
  for (Eigen::Index i = 2; i + 2 < f.size(); ++i) {
    d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
  }
  return d;
}

}  // namespace

TEST(Painleve, AsymptoticValues) {
  EXPECT_NEAR(asymptotic_value(1000.0, 0.0), -std::cbrt(6000.0), 1e-12);
  EXPECT_NEAR(asymptotic_value(1000.0, 0.0), -18.17121, 1e-5);
  EXPECT_NEAR(asymptotic_value(-1000.0, 0.0), 18.17121, 1e-5);
  EXPECT_NEAR(asymptotic_value(1000.0, 1.0), -18.28127, 1e-5);
  EXPECT_THROW(asymptotic_value(0.0, 0.0), DomainError);
  EXPECT_THROW(asymptotic_slope(0.0, 1.0), DomainError);
}

TEST(Painleve, AsymptoticSlopeIsDerivativeOfValue) {
  for (double X : {-50.0, -7.0, 9.0, 60.0}) {
    for (double T : {-1.0, 0.0, 1.5}) {
      const double h = 1e-4;
      const double fd = (asymptotic_value(X + h, T) - asymptotic_value(X - h, T)) / (2 * h);
      EXPECT_NEAR(asymptotic_slope(X, T), fd, 1e-8);
    }
  }
}

TEST(Painleve, OdeResidualAtLadderTimes) {
  for (double T : {-1.0, 0.0, 1.0}) {
    const auto& f = field_at(T);
    const Field r = ode_residual(f);
    EXPECT_LE(r.segment(2, r.size() - 4).abs().maxCoeff(), 1e-10) << "T=" << T;
    EXPECT_LE(f.newton_residual, 1e-10);
    EXPECT_EQ(f.size(), PainleveOptions{}.N);
    EXPECT_TRUE(f.U.allFinite());
  }
}

TEST(Painleve, DefinitionalIdentitiesHoldPointwise) {
  const auto& f = field_at(1.0);
  EXPECT_LE((f.U_T - (-f.U * f.U_X - f.U_XXX / 12.0)).abs().maxCoeff(), 1e-12);
  EXPECT_LE((f.Q_T - (-0.5 * f.U.square() - f.U_XX / 12.0)).abs().maxCoeff(), 1e-12);
  EXPECT_LE((f.Q - q_field(f)).abs().maxCoeff(), 1e-12);
}

TEST(Painleve, BoundaryMatchWithinBudget) {
  for (double T : {-1.0, 0.0, 1.0}) {
    const auto& f = field_at(T);
    EXPECT_LE(f.boundary_deviation, 1.0 / (0.5 * f.L)) << "T=" << T;
  }
}

TEST(Painleve, BoundaryDeviationShrinksWithDomain) {
  // Calibration of the C/L budget: doubling L at fixed spacing should reduce
  // the far-field deviation at X = L/2 at least by a factor of two.
  PainleveOptions big;
  big.L = 240.0;
  big.N = 2 * (big.N - 1) + 1;
  const auto f2 = solve_p12(1.0, big);
  const auto& f1 = field_at(1.0);
  EXPECT_LT(f2.boundary_deviation, 0.5 * f1.boundary_deviation);
}

TEST(Painleve, QDerivativeIsU) {
  // A fourth-order difference of Q converges to U at fourth order.
  auto error = [](const PainleveField& f) {
    const Field dq = central_difference(f.Q, f.h());
    double worst = 0.0;
    for (int i = 2; i + 2 < f.size(); ++i) {
      if (std::abs(f.X[i]) <= 0.8 * f.L) worst = std::max(worst, std::abs(dq[i] - f.U[i]));
    }
    return worst;
  };
  PainleveOptions coarse;
  coarse.N = (coarse.N - 1) / 2 + 1;
  for (double T : {-1.0, 0.0, 1.0}) {
    const double e_fine = error(field_at(T));
    const double e_coarse = error(solve_p12(T, coarse));
    EXPECT_GE(std::log2(e_coarse / e_fine), 3.5) << "T=" << T << " " << e_coarse << " " << e_fine;
  }
}

TEST(Painleve, TimeDerivativeMatchesTDifference) {
  const double T = 0.0, delta = 1e-3;
  PainleveContinuation path;
  const auto f = path.solve(T);
  const auto fp = path.solve(T + delta);
  const auto fm = path.solve(T - delta);
  double worst = 0.0;
  for (int i = 0; i < f.size(); ++i) {
    if (std::abs(f.X[i]) > 0.8 * f.L) continue;
    worst = std::max(worst, std::abs((fp.U[i] - fm.U[i]) / (2.0 * delta) - f.U_T[i]));
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(Painleve, InteriorInsensitiveToDomainSize) {
  PainleveOptions big;
  big.L = 240.0;
  big.N = 2 * (big.N - 1) + 1;
  const auto f2 = solve_p12(0.0, big);
  const auto& f1 = field_at(0.0);
  double worst = 0.0;
  for (int i = 0; i < f1.size(); ++i) {
    if (std::abs(f1.X[i]) > 0.5 * f1.L) continue;
    worst = std::max(worst, std::abs(f1.U[i] - f2.interpolate(f2.U, f1.X[i])));
  }
  EXPECT_LE(worst, 1e-7);
}

TEST(Painleve, LargeXFollowsAsymptotics) {
  const auto& f = field_at(0.0);
  for (double X : {-50.0, -30.0, 30.0, 50.0}) {
    EXPECT_NEAR(f.interpolate(f.U, X), asymptotic_value(X, 0.0), 0.1 / std::abs(X) + 1e-3);
  }
}

TEST(Painleve, QTailGrowsLikeIntegralOfU) {
  // Q_X = U with U ~ -(6X)^(1/3) gives Q ~ -(3/4) 6^(1/3) |X|^(4/3) at both ends.
  const auto& f = field_at(0.0);
  for (double X : {-50.0, 50.0}) {
    const double expected = -0.75 * std::cbrt(6.0) * std::pow(std::abs(X), 4.0 / 3.0);
    EXPECT_NEAR(f.interpolate(f.Q, X) / expected, 1.0, 0.02) << "X=" << X;
  }
}

TEST(Painleve, SmallGridRejected) {
  PainleveOptions tiny;
  tiny.L = 5.0;
  EXPECT_THROW(solve_p12(0.0, tiny), DomainError);
}

TEST(Painleve, ContinuationFromDifferentPathsAgrees) {
  PainleveContinuation path;
  const auto direct = path.solve(1.0);
  PainleveContinuation other;
  other.solve(-1.0);
  const auto via = other.solve(1.0);
  EXPECT_LE((direct.U - via.U).abs().maxCoeff(), 1e-9);
}

TEST(Painleve, InterpolationIsExactOnNodes) {
  const auto& f = field_at(0.0);
  for (int i : {3, 1500, 3000, 4999}) EXPECT_NEAR(f.interpolate(f.U, f.X[i]), f.U[i], 1e-13);
}
