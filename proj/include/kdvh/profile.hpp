#pragma once

#include "kdvh/common.hpp"

#include <functional>
#include <string>
#include <vector>

namespace kdvh {

enum class Branch { Left, Right };

const char* to_string(Branch side);

/// Negative single-hump initial datum u0 together with closed-form
/// derivatives up to order 4.
///
/// The derivative map takes (x, order) with order in 0..4. Instances are
/// immutable; copies share nothing mutable and can be used from any thread.
class InitialProfile {
 public:
  using DerivativeMap = std::function<double(double x, int order)>;

  struct Metadata {
    double decay_exponent = 1.0;  // s in |u0(x)| <= C |x|^(-3-s)
    double decay_constant = 1.0;  // C in the same bound
    double theta = 0.25;          // sector half-angle (not verified)
    double sigma = 0.5;           // strip half-width (not verified)
  };

  InitialProfile(std::string name, DerivativeMap derivatives, double x_min,
                 Metadata meta);
  InitialProfile(std::string name, DerivativeMap derivatives, double x_min)
      : InitialProfile(std::move(name), std::move(derivatives), x_min, Metadata{}) {}

  /// u0(x) = -sech^2(x), minimum at 0.
  static InitialProfile sech2();
  /// u0(x) = -exp(-x^2), minimum at 0.
  static InitialProfile gaussian();
  /// Built-in lookup used by the CLI ("sech2", "gaussian").
  static InitialProfile by_name(const std::string& name);

  double operator()(double x, int order = 0) const { return derivatives_(x, order); }

  const std::string& name() const noexcept { return name_; }
  double x_min() const noexcept { return x_min_; }
  const Metadata& metadata() const noexcept { return meta_; }

 private:
  std::string name_;
  DerivativeMap derivatives_;
  double x_min_;
  Metadata meta_;
};

struct InversionOptions {
  double clamp = 1e-8;        // admissible u-range is (-1 + clamp, -clamp)
  double bisect_width = 1e-3; // bracket width at which Newton takes over
  double residual_tol = 1e-12;
  int max_iterations = 200;
};

double eval_profile(const InitialProfile& p, double x, int order);

/// x on the requested monotone branch with u0(x) = u.
double invert_branch(const InitialProfile& p, Branch side, double u,
                     const InversionOptions& opts = {});

/// f^(j)(u) for j = 1..max_order, f the branch inverse, via the
/// inverse-function derivative recurrences.
std::vector<double> branch_derivatives(const InitialProfile& p, Branch side,
                                       double u, int max_order,
                                       const InversionOptions& opts = {});

struct AssumptionCheck {
  std::string name;
  bool passed = false;
  double margin = 0.0;  // worst slack; negative when the check fails
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  bool all_passed() const;
  const AssumptionCheck* find(const std::string& name) const;
};

struct ValidationGrid {
  double half_width = 20.0;  // near grid: [x_M - half_width, x_M + half_width]
  double step = 1e-2;
  double far_start = 20.0;   // far grid: |x| in [far_start, 4 far_start]
  int far_samples = 400;
};

AssumptionReport validate_assumptions(const InitialProfile& p,
                                      const ValidationGrid& grid = {});

}  // namespace kdvh
