#pragma once

#include "kdvh/common.hpp"
#include "kdvh/profile.hpp"

namespace kdvh {

/// A point of the dispersionless solution: u = u0(xi) is carried along the
/// characteristic x = xi + C_m u0(xi)^m t.
struct CharacteristicSolution {
  double xi = 0.0;
  double u = 0.0;
  double x = 0.0;
  double t = 0.0;
};

/// Generic breakup data of the dispersionless flow.
struct CatastrophePoint {
  int m = 1;
  double u_c = 0.0;
  double x_c = 0.0;
  double t_c = 0.0;
  double xi_star = 0.0;
  double k = 0.0;   // -F'''(u_c)
  double F4 = 0.0;  // F''''(u_c)
  double residual_F = 0.0;
  double residual_F1 = 0.0;
  double residual_F2 = 0.0;
};

/// d^order/du^order of F(u; x, t) = -x + C_m u^m t + f_L(u).
double F_eval(double u, double x, double t, const InitialProfile& p, int m, int order);

/// Same as F_eval but with the increasing-branch inverse f_R in place of f_L.
double F_eval(double u, double x, double t, const InitialProfile& p, int m, int order,
              Branch side);

/// Single-valued dispersionless solution at (x, t); both branches.
/// Throws PastBreakup once the characteristic map folds over the bracket.
CharacteristicSolution solve_u(double x, double t, const InitialProfile& p, int m);

/// x position of the hump minimum at time t: x_M + C_m (-1)^m t.
double minimum_trajectory(const InitialProfile& p, int m, double t);

struct CatastropheOptions {
  int scan_points = 20001;
  double edge_level = 1e-6;  // |u0| at the far edge of the scan window
  double residual_tol = 1e-10;
  double degeneracy_tol = 1e-8;
};

/// Breakup point via maximization of phi(xi) = -C_m u0^(m-1) u0' on the
/// decreasing branch, t_c = 1 / (m max phi).
CatastrophePoint catastrophe(const InitialProfile& p, int m, const CatastropheOptions& opts = {});

/// Newton refinement of the three-equation system F = F' = F'' = 0 in (u, x, t),
/// started from a given point. Used to cross-validate catastrophe().
CatastrophePoint refine_catastrophe(const InitialProfile& p, const CatastrophePoint& start);

}  // namespace kdvh
