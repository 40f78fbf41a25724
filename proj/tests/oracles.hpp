#pragma once

// Reference computations used by the tests. They use closed forms of the
// sech^2 hump and brute-force sampling only; nothing from the library.

#include <cmath>
#include <functional>

namespace oracle {

inline double sech2(double x) {
  const double c = std::cosh(x);
  return 1.0 / (c * c);
}

// u0 = -sech^2 x and u0' = 2 sech^2 x tanh x.
inline double hump(double x) { return -sech2(x); }
inline double hump_slope(double x) { return 2.0 * sech2(x) * std::tanh(x); }

inline double gaussian(double x) { return -std::exp(-x * x); }
inline double gaussian_slope(double x) { return 2.0 * x * std::exp(-x * x); }

// (-1)^(m+1) 2^m (2m+1)!! / m!
inline double flow_coefficient(int m) {
  double dfact = 1.0;
  for (int j = 3; j <= 2 * m + 1; j += 2) dfact *= j;
  double fact = 1.0;
  for (int j = 2; j <= m; ++j) fact *= j;
  return (m % 2 ? 1.0 : -1.0) * std::pow(2.0, m) * dfact / fact;
}

struct ScanResult {
  double xi, u_c, t_c, x_c;
};

// Maximizes phi = -C_m u0^(m-1) u0' on a uniform xi grid, then refines with
// a parabola through the three best samples.
inline ScanResult breakup_scan(const std::function<double(double)>& u0,
                               const std::function<double(double)>& du0, int m, double lo,
                               double hi, int n) {
  const double Cm = flow_coefficient(m);
  auto phi = [&](double xi) { return -Cm * std::pow(u0(xi), m - 1) * du0(xi); };
  const double h = (hi - lo) / (n - 1);
  int best = 1;
  for (int i = 1; i < n - 1; ++i) {
    if (phi(lo + i * h) > phi(lo + best * h)) best = i;
  }
  const double xm = lo + (best - 1) * h, x0 = lo + best * h, xp = lo + (best + 1) * h;
  const double fm = phi(xm), f0 = phi(x0), fp = phi(xp);
  const double xi = x0 + 0.5 * h * (fm - fp) / (fm - 2.0 * f0 + fp);
  ScanResult r;
  r.xi = xi;
  r.t_c = 1.0 / (m * phi(xi));
  r.u_c = u0(xi);
  r.x_c = xi + Cm * std::pow(r.u_c, m) * r.t_c;
  return r;
}

// Left-branch inverse of the sech^2 hump: u = -sech^2 x, x < 0.
inline double hump_inverse_left(double u) { return -std::atanh(std::sqrt(1.0 + u)); }

// j-th derivative of hump_inverse_left, from f' = u^-1 (1 + u)^-1/2 / 2 and
// Leibniz' rule.
inline double hump_inverse_left_derivative(double u, int j) {
  auto dinv = [&](int n) {  // d^n u^-1
    double c = n % 2 ? -1.0 : 1.0;
    for (int i = 2; i <= n; ++i) c *= i;
    return c * std::pow(u, -1 - n);
  };
  auto dsqrt = [&](int n) {  // d^n (1 + u)^-1/2
    double c = 1.0;
    for (int i = 0; i < n; ++i) c *= -0.5 - i;
    return c * std::pow(1.0 + u, -0.5 - n);
  };
  double sum = 0.0, binom = 1.0;
  for (int i = 0; i < j; ++i) {
    sum += binom * dinv(i) * dsqrt(j - 1 - i);
    binom = binom * (j - 1 - i) / (i + 1);
  }
  return 0.5 * sum;
}

// Seven-point central differences of order 1..4 (sixth / fourth order).
inline double central_derivative(const std::function<double(double)>& f, double x, double h,
                                 int order) {
  const double f3 = f(x + 3 * h), f2 = f(x + 2 * h), f1 = f(x + h), f0 = f(x);
  const double g1 = f(x - h), g2 = f(x - 2 * h), g3 = f(x - 3 * h);
  switch (order) {
    case 1: return (f3 - 9 * f2 + 45 * f1 - 45 * g1 + 9 * g2 - g3) / (60 * h);
    case 2: return (2 * f3 - 27 * f2 + 270 * f1 - 490 * f0 + 270 * g1 - 27 * g2 + 2 * g3) /
                   (180 * h * h);
    case 3: return (-f3 + 8 * f2 - 13 * f1 + 13 * g1 - 8 * g2 + g3) / (8 * h * h * h);
    case 4: return (-f3 + 12 * f2 - 39 * f1 + 56 * f0 - 39 * g1 + 12 * g2 - g3) /
                   (6 * h * h * h * h);
  }
  return NAN;
}

// One Richardson step on central_derivative; orders 1-2 are sixth order,
// orders 3-4 fourth order before extrapolation.
inline double richardson_derivative(const std::function<double(double)>& f, double x, double h,
                                    int order) {
  const double r = order <= 2 ? 64.0 : 16.0;
  return (r * central_derivative(f, x, 0.5 * h, order) - central_derivative(f, x, h, order)) /
         (r - 1.0);
}

// Exact KdV soliton for u_t + 6 u u_x + e^2 u_xxx = 0.
inline double soliton(double x, double t, double eps, double kappa) {
  const double a = 2.0 * eps * eps * kappa * kappa;
  return a * sech2(kappa * (x - 4.0 * eps * eps * kappa * kappa * t));
}

}  // namespace oracle
