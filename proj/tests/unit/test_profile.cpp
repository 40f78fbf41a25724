#include "kdvh/profile.hpp"

#include "../oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace kdvh;

TEST(Profile, Sech2ValuesAtMinimum) {
  const auto p = InitialProfile::sech2();
  EXPECT_DOUBLE_EQ(eval_profile(p, 0.0, 0), -1.0);
  EXPECT_NEAR(eval_profile(p, 0.0, 1), 0.0, 1e-15);
  EXPECT_NEAR(eval_profile(p, 0.0, 2), 2.0, 1e-14);
  EXPECT_THROW(eval_profile(p, 0.0, 5), DomainError);
}

TEST(Profile, ClosedFormDerivativesMatchFiniteDifferences) {
  for (const auto& p : {InitialProfile::sech2(), InitialProfile::gaussian()}) {
    for (double x : {-2.3, -0.7, 0.1, 0.9, 1.8}) {
      for (int order = 1; order <= 4; ++order) {
        auto f = [&](double y) { return p(y, order - 1); };
        EXPECT_NEAR(p(x, order), oracle::central_derivative(f, x, 1e-3, 1), 1e-9)
            << p.name() << " x=" << x << " order=" << order;
      }
    }
  }
}

TEST(Profile, ByName) {
  EXPECT_EQ(InitialProfile::by_name("gaussian").name(), "gaussian");
  EXPECT_THROW(InitialProfile::by_name("box"), ConfigError);
}

TEST(Profile, InvertBranchExamples) {
  const auto p = InitialProfile::sech2();
  EXPECT_NEAR(invert_branch(p, Branch::Left, -oracle::sech2(1.0)), -1.0, 1e-12);
  EXPECT_NEAR(invert_branch(p, Branch::Right, -oracle::sech2(1.0)), 1.0, 1e-12);
  EXPECT_NEAR(invert_branch(p, Branch::Left, -2.0 / 3.0), -std::atanh(1.0 / std::sqrt(3.0)), 1e-12);
  EXPECT_NEAR(invert_branch(p, Branch::Left, -1.0 + 2e-8), 0.0, 2e-4);
  EXPECT_THROW(invert_branch(p, Branch::Left, -1.0), DomainError);
  EXPECT_THROW(invert_branch(p, Branch::Left, 0.0), DomainError);
  EXPECT_THROW(invert_branch(p, Branch::Left, 0.3), DomainError);
}

TEST(Profile, RoundTripOn200Values) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0 + 1e-6, -1e-6);
  for (const auto& p : {InitialProfile::sech2(), InitialProfile::gaussian()}) {
    for (int i = 0; i < 200; ++i) {
      const double u = dist(rng);
      const double xl = invert_branch(p, Branch::Left, u);
      const double xr = invert_branch(p, Branch::Right, u);
      EXPECT_NEAR(p(xl), u, 1e-11);
      EXPECT_NEAR(p(xr), u, 1e-11);
      EXPECT_LE(xl, p.x_min());
      EXPECT_GE(xr, p.x_min());
    }
  }
}

TEST(Profile, BranchDerivativesAtBreakupValue) {
  const auto p = InitialProfile::sech2();
  const auto d = branch_derivatives(p, Branch::Left, -2.0 / 3.0, 3);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_NEAR(d[0], -3.0 * std::sqrt(3.0) / 4.0, 1e-12);
  EXPECT_NEAR(d[1], 0.0, 1e-12);
  EXPECT_NEAR(d[2], -729.0 / (48.0 * std::sqrt(3.0)), 1e-10);
}

TEST(Profile, BranchDerivativesMatchClosedFormInverse) {
  // f_L(u) = -artanh(sqrt(1 + u)) for the sech^2 hump, differentiated exactly.
  const auto p = InitialProfile::sech2();
  for (double u : {-0.9, -0.6, -0.3, -0.05}) {
    const auto d = branch_derivatives(p, Branch::Left, u, 4);
    for (int j = 1; j <= 4; ++j) {
      const double fd = oracle::hump_inverse_left_derivative(u, j);
      const double rel = j < 4 ? 1e-6 : 1e-4;
      EXPECT_NEAR(d[j - 1], fd, rel * std::max(1.0, std::abs(fd))) << "u=" << u << " j=" << j;
    }
  }
}

TEST(Profile, BranchDerivativesMatchDifferencesOfInversion) {
  for (const auto& p : {InitialProfile::sech2(), InitialProfile::gaussian()}) {
    for (auto side : {Branch::Left, Branch::Right}) {
      auto f = [&](double u) { return invert_branch(p, side, u); };
      for (double u : {-0.8, -0.5, -0.2}) {
        const auto d = branch_derivatives(p, side, u, 4);
        for (int j = 1; j <= 4; ++j) {
          const double fd = oracle::richardson_derivative(f, u, 1e-2, j);
          const double rel = j < 4 ? 1e-6 : 1e-4;
          EXPECT_NEAR(d[j - 1], fd, rel * std::max(1.0, std::abs(fd)))
              << p.name() << ' ' << to_string(side) << " u=" << u << " j=" << j;
        }
      }
    }
  }
}

TEST(Profile, BranchDerivativesSingularNearMinimum) {
  // Quartic minimum -1/(1 + x^4): u0' = 4x^3/(1 + x^4)^2 drops below 1e-10
  // while 1 + u is still representable.
  const InitialProfile flat("flat", [](double x, int order) {
    const double q = 1.0 + x * x * x * x;
    switch (order) {
      case 0: return -1.0 / q;
      case 1: return 4.0 * x * x * x / (q * q);
      case 2: return (12.0 * x * x * q - 32.0 * std::pow(x, 6)) / (q * q * q);
      default: return std::numeric_limits<double>::quiet_NaN();
    }
  }, 0.0);
  InversionOptions opts;
  opts.clamp = 1e-16;
  EXPECT_THROW(branch_derivatives(flat, Branch::Left, -1.0 + 4e-15, 2, opts), SingularDerivative);
  EXPECT_NO_THROW(branch_derivatives(flat, Branch::Left, -0.5, 2, opts));
}

TEST(Profile, BuiltinsPassAssumptions) {
  for (const auto& p : {InitialProfile::sech2(), InitialProfile::gaussian()}) {
    const auto r = validate_assumptions(p);
    EXPECT_TRUE(r.all_passed()) << p.name();
    EXPECT_FALSE(r.checks.empty());
  }
}

TEST(Profile, ShallowMinimumFailsNormalization) {
  const InitialProfile shallow("shallow", [](double x, int order) {
    return 0.9 * InitialProfile::sech2()(x, order);
  }, 0.0);
  const auto r = validate_assumptions(shallow);
  EXPECT_FALSE(r.all_passed());
  ASSERT_NE(r.find("normalized_minimum"), nullptr);
  EXPECT_FALSE(r.find("normalized_minimum")->passed);
  EXPECT_TRUE(r.find("negative")->passed);
}

TEST(Profile, PositiveBumpFailsSign) {
  const InitialProfile bump("bump", [](double x, int order) {
    return -InitialProfile::sech2()(x, order);
  }, 0.0);
  EXPECT_FALSE(validate_assumptions(bump).find("negative")->passed);
}
