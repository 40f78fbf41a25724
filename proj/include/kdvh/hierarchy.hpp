#pragma once

#include "kdvh/common.hpp"
#include "kdvh/fourier.hpp"

#include <span>

namespace kdvh {

/// C_m = (-1)^(m+1) 2^m (2m+1)!! / m!, the dispersionless speed coefficient
/// of the m-th flow: u_t + C_m u^m u_x = 0.
double coefficient(int m);

/// Hierarchy index, its coefficient and the dispersion parameter.
struct FlowParams {
  int m = 1;
  double eps = 0.1;

  FlowParams() = default;
  FlowParams(int m_, double eps_);
  double Cm() const { return coefficient(m); }
};

/// Throws UnsupportedFlow unless m is one of the hardcoded flows 1, 2, 3.
void require_evolvable(int m);

/// u_t for the m-th flow with every non-time term moved to the right:
///   m=1: -6uu_x - e^2 u_3x
///   m=2: 30u^2u_x + e^2(20u_x u_2x + 10u u_3x) + e^4 u_5x
///   m=3: -140u^3u_x - e^2(70u_x^3 + 280u u_x u_2x + 70u^2 u_3x)
///        - e^4(70u_2x u_3x + 42u_x u_4x + 14u u_5x) - e^6 u_7x
/// Spatial derivatives are spectral on the given periodic grid.
Field rhs(const Field& u, double eps, int m, const FourierGrid& grid);

/// Flux G with rhs = d_x G + (-1)^m e^(2m) d_x^(2m+1) u, i.e. everything but the
/// leading linear dispersion written in conservation form. derivs[j] holds
/// d_x^j u for j = 0..2m-2 (at least derivs[0]).
Field explicit_flux(std::span<const Field> derivs, double eps, int m);

/// Fourier symbol of the leading dispersion (-1)^m e^(2m) d_x^(2m+1), which is
/// i e^(2m) k^(2m+1) for every m.
Eigen::ArrayXcd leading_dispersion_symbol(const Field& k, double eps, int m);

struct Conserved {
  double mass = 0.0;  // sum u dx
  double h0 = 0.0;    // sum u^2/2 dx
};

Conserved conserved(const Field& u, double dx);

}  // namespace kdvh
