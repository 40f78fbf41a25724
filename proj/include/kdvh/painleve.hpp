#pragma once

#include "kdvh/common.hpp"

#include <map>
#include <mutex>

namespace kdvh {

/// Two-term far-field behaviour of the pole-free P_I^2 solution,
///   U ~ -/+ (6|X|)^(1/3) -/+ (6^(2/3)/3) T |X|^(-1/3),  X -> +/- infinity.
double asymptotic_value(double X, double T);
/// d/dX of asymptotic_value.
double asymptotic_slope(double X, double T);

struct PainleveOptions {
  double L = 120.0;
  int N = 7201;
  int fd_accuracy = 12;        // order of the finite-difference stencils
  double dT = 0.25;            // continuation step
  double start_T = -3.0;       // path origin; needs start_T < 0
  double newton_tol = 1e-12;   // target residual
  double accept_residual = 1e-10;
  int max_iterations = 50;
  double boundary_constant = 1.0;  // |U - asymptotics| <= C / (L/2) at X = +/- L/2
};

/// Solution of X = T U - [U^3/6 + (U_X^2 + 2 U U_XX)/24 + U_XXXX/240] on
/// [-L, L] together with the derived fields of the universality expansion.
struct PainleveField {
  double T = 0.0;
  double L = 0.0;
  Field X;
  Field U, U_X, U_XX, U_XXX, U_XXXX;
  Field U_T, U_XT, U_XXT;  // through U_T = -U U_X - U_XXX/12
  Field Q, Q_T;            // Q_X = U, Q_T = -U^2/2 - U_XX/12
  double newton_residual = 0.0;
  int newton_iterations = 0;
  double boundary_deviation = 0.0;  // max |U - asymptotics| at X = +/- L/2

  int size() const { return static_cast<int>(X.size()); }
  double h() const { return 2.0 * L / (size() - 1); }
  /// Four-point Lagrange interpolation of a grid field at X.
  double interpolate(const Field& f, double at) const;
};

/// Pointwise ODE residual X - T U + U^3/6 + (U_X^2 + 2 U U_XX)/24 + U_XXXX/240.
Field ode_residual(const PainleveField& f);

/// Q = U_X U_XXX/240 - U_XX^2/480 + X U - (T/2) U^2 + U^4/24 + U U_X^2/24.
Field q_field(const PainleveField& f);

/// Solves at T by continuation from opts.start_T in steps of at most opts.dT.
PainleveField solve_p12(double T, const PainleveOptions& opts = {});

/// Continuation path shared between several T values on one grid. Solutions
/// already reached are reused as starting points. Safe to call concurrently;
/// solves are serialized.
class PainleveContinuation {
 public:
  explicit PainleveContinuation(PainleveOptions opts = {});
  PainleveField solve(double T);
  const PainleveOptions& options() const { return opts_; }

 private:
  PainleveOptions opts_;
  std::mutex mutex_;
  std::map<double, Field> reached_;
};

}  // namespace kdvh
