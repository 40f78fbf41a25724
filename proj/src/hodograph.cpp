#include "kdvh/hodograph.hpp"

#include "kdvh/hierarchy.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kdvh {

namespace {

// d^j/du^j u^m
double monomial_derivative(double u, int m, int j) {
  if (j > m) return 0.0;
  double c = 1.0;
  for (int i = 0; i < j; ++i) c *= (m - i);
  return c * std::pow(u, m - j);
}

}  // namespace

double F_eval(double u, double x, double t, const InitialProfile& p, int m, int order,
              Branch side) {
  if (order < 0 || order > 4) throw DomainError("F derivative order must be in 0..4");
  const double cm = coefficient(m);
  const double mono = cm * t * monomial_derivative(u, m, order);
  if (order == 0) return -x + mono + invert_branch(p, side, u);
  return mono + branch_derivatives(p, side, u, order)[order - 1];
}

double F_eval(double u, double x, double t, const InitialProfile& p, int m, int order) {
  return F_eval(u, x, t, p, m, order, Branch::Left);
}

double minimum_trajectory(const InitialProfile& p, int m, double t) {
  return p.x_min() + coefficient(m) * (m % 2 == 0 ? 1.0 : -1.0) * t;
}

CharacteristicSolution solve_u(double x, double t, const InitialProfile& p, int m) {
  if (t < 0.0) throw DomainError("solve_u requires t >= 0");
  const double cm = coefficient(m);
  if (t == 0.0) return {x, p(x), x, 0.0};

  // Speeds C_m u^m are negative with |C_m u^m| <= |C_m|, so the foot lies in
  // [x, x + |C_m| t].
  auto G = [&](double xi) { return xi + cm * std::pow(p(xi), m) * t - x; };
  auto dG = [&](double xi) {
    return 1.0 + m * cm * std::pow(p(xi), m - 1) * p(xi, 1) * t;
  };
  double lo = x;
  double hi = x + std::abs(cm) * t;

  constexpr int kSamples = 257;
  for (int i = 0; i < kSamples; ++i) {
    const double xi = lo + (hi - lo) * i / (kSamples - 1);
    if (dG(xi) <= 0.0) {
      std::ostringstream msg;
      msg << "characteristic map folds near xi = " << xi << " at t = " << t
          << "; the dispersionless solution is multivalued";
      throw PastBreakup(msg.str());
    }
  }

  double glo = G(lo);
  double ghi = G(hi);
  if (glo > 0.0 || ghi < 0.0) {
    // Widen slightly for round-off at the ends.
    lo -= 1e-12 * (1.0 + std::abs(lo));
    hi += 1e-12 * (1.0 + std::abs(hi));
    glo = G(lo);
    ghi = G(hi);
    if (glo > 0.0 || ghi < 0.0) throw NoConvergence("could not bracket the characteristic foot");
  }
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (G(mid) <= 0.0 ? lo : hi) = mid;
  }
  double xi = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double g = G(xi);
    if (g == 0.0) break;
    (g < 0.0 ? lo : hi) = xi;
    double next = xi - g / dG(xi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - xi) <= 1e-16 * (1.0 + std::abs(xi))) {
      xi = next;
      break;
    }
    xi = next;
  }
  if (std::abs(G(xi)) > 1e-12 * (1.0 + std::abs(x))) {
    throw NoConvergence("characteristic foot iteration did not converge");
  }
  return {xi, p(xi), x, t};
}

namespace {

struct Phi {
  const InitialProfile& p;
  int m;
  double cm;

  double value(double xi) const { return -cm * std::pow(p(xi), m - 1) * p(xi, 1); }

  double d1(double xi) const {
    const double u = p(xi), u1 = p(xi, 1), u2 = p(xi, 2);
    double s = std::pow(u, m - 1) * u2;
    if (m >= 2) s += (m - 1) * std::pow(u, m - 2) * u1 * u1;
    return -cm * s;
  }

  double d2(double xi) const {
    const double u = p(xi), u1 = p(xi, 1), u2 = p(xi, 2), u3 = p(xi, 3);
    double s = std::pow(u, m - 1) * u3;
    if (m >= 2) s += 3.0 * (m - 1) * std::pow(u, m - 2) * u1 * u2;
    if (m >= 3) s += (m - 1) * (m - 2) * std::pow(u, m - 3) * u1 * u1 * u1;
    return -cm * s;
  }
};

void fill_residuals(const InitialProfile& p, CatastrophePoint& cp) {
  cp.residual_F = std::abs(F_eval(cp.u_c, cp.x_c, cp.t_c, p, cp.m, 0));
  cp.residual_F1 = std::abs(F_eval(cp.u_c, cp.x_c, cp.t_c, p, cp.m, 1));
  cp.residual_F2 = std::abs(F_eval(cp.u_c, cp.x_c, cp.t_c, p, cp.m, 2));
  cp.k = -F_eval(cp.u_c, cp.x_c, cp.t_c, p, cp.m, 3);
  cp.F4 = F_eval(cp.u_c, cp.x_c, cp.t_c, p, cp.m, 4);
}

}  // namespace

CatastrophePoint catastrophe(const InitialProfile& p, int m, const CatastropheOptions& opts) {
  const double cm = coefficient(m);
  const Phi phi{p, m, cm};
  const double xm = p.x_min();

  double width = 1.0;
  while (std::abs(p(xm - width)) >= opts.edge_level) {
    width *= 2.0;
    if (width > 1e8) throw DomainError("profile does not decay on the left");
  }

  const int n = opts.scan_points;
  const double h = width / (n - 1);
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double v = phi.value(xm - width + i * h);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  if (!(best_val > 0.0)) throw DegenerateCatastrophe("no steepening on the decreasing branch");

  double lo = xm - width + std::max(0, best - 1) * h;
  double hi = xm - width + std::min(n - 1, best + 1) * h;
  double xi = xm - width + best * h;
  for (int it = 0; it < 100; ++it) {
    const double g = phi.d1(xi);
    const double gp = phi.d2(xi);
    (g > 0.0 ? lo : hi) = xi;
    double next = gp < 0.0 ? xi - g / gp : 0.5 * (lo + hi);
    if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - xi);
    xi = next;
    if (step <= 1e-15 * (1.0 + std::abs(xi))) break;
  }

  CatastrophePoint cp;
  cp.m = m;
  cp.xi_star = xi;
  cp.t_c = 1.0 / (m * phi.value(xi));
  cp.u_c = p(xi);
  cp.x_c = xi + cm * std::pow(cp.u_c, m) * cp.t_c;
  fill_residuals(p, cp);

  const double worst = std::max({cp.residual_F, cp.residual_F1, cp.residual_F2});
  if (worst > opts.residual_tol) {
    std::ostringstream msg;
    msg << "catastrophe system residual " << worst << " exceeds " << opts.residual_tol;
    throw NoConvergence(msg.str());
  }
  if (std::abs(cp.k) < opts.degeneracy_tol) {
    throw DegenerateCatastrophe("k = -F'''(u_c) vanishes; the gradient catastrophe is not generic");
  }
  return cp;
}

CatastrophePoint refine_catastrophe(const InitialProfile& p, const CatastrophePoint& start) {
  const int m = start.m;
  const double cm = coefficient(m);
  Eigen::Vector3d z(start.u_c, start.x_c, start.t_c);
  auto residual = [&](const Eigen::Vector3d& v) {
    return Eigen::Vector3d(F_eval(v[0], v[1], v[2], p, m, 0), F_eval(v[0], v[1], v[2], p, m, 1),
                           F_eval(v[0], v[1], v[2], p, m, 2));
  };
  Eigen::Vector3d r = residual(z);
  for (int it = 0; it < 50 && r.lpNorm<Eigen::Infinity>() > 1e-14; ++it) {
    const double u = z[0], t = z[2];
    Eigen::Matrix3d J;
    J << r[1], -1.0, cm * std::pow(u, m),
        r[2], 0.0, cm * m * std::pow(u, m - 1),
        F_eval(u, z[1], t, p, m, 3), 0.0, m >= 2 ? cm * m * (m - 1) * std::pow(u, m - 2) : 0.0;
    const Eigen::Vector3d dz = J.fullPivLu().solve(-r);
    z += dz;
    r = residual(z);
    if (dz.lpNorm<Eigen::Infinity>() < 1e-15) break;
  }
  CatastrophePoint cp = start;
  cp.u_c = z[0];
  cp.x_c = z[1];
  cp.t_c = z[2];
  cp.xi_star = invert_branch(p, Branch::Left, cp.u_c);
  fill_residuals(p, cp);
  return cp;
}

}  // namespace kdvh
