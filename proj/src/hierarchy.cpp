#include "kdvh/hierarchy.hpp"

#include <cmath>
#include <string>

namespace kdvh {

double coefficient(int m) {
  if (m < 1) throw DomainError("hierarchy index m must be >= 1");
  double c = 1.0;
  for (int j = 1; j <= m; ++j) c *= 2.0 * (2.0 * j + 1.0) / j;  // 2^m (2m+1)!! / m!
  return m % 2 == 1 ? c : -c;
}

FlowParams::FlowParams(int m_, double eps_) : m(m_), eps(eps_) {
  if (m < 1) throw DomainError("hierarchy index m must be >= 1");
  if (!(eps > 0.0)) throw DomainError("dispersion parameter eps must be positive");
}

void require_evolvable(int m) {
  if (m < 1 || m > 3) {
    throw UnsupportedFlow("only the flows m = 1, 2, 3 can be evolved (got m = " +
                          std::to_string(m) + ")");
  }
}

Field rhs(const Field& u, double eps, int m, const FourierGrid& grid) {
  require_evolvable(m);
  const Spectrum uh = grid.forward(u);
  auto d = [&](int order) { return grid.inverse(grid.differentiate(uh, order)); };
  const double e2 = eps * eps;
  const Field u1 = d(1);
  const Field u2 = d(2);
  const Field u3 = d(3);
  switch (m) {
    case 1:
      return -6.0 * u * u1 - e2 * u3;
    case 2:
      return 30.0 * u.square() * u1 + e2 * (20.0 * u1 * u2 + 10.0 * u * u3) + e2 * e2 * d(5);
    default: {
      const Field u4 = d(4);
      const Field u5 = d(5);
      return -140.0 * u.cube() * u1 -
             e2 * (70.0 * u1.cube() + 280.0 * u * u1 * u2 + 70.0 * u.square() * u3) -
             e2 * e2 * (70.0 * u2 * u3 + 42.0 * u1 * u4 + 14.0 * u * u5) -
             e2 * e2 * e2 * d(7);
    }
  }
}

Field explicit_flux(std::span<const Field> derivs, double eps, int m) {
  require_evolvable(m);
  const double e2 = eps * eps;
  const Field& u = derivs[0];
  switch (m) {
    case 1:
      return -3.0 * u.square();
    case 2: {
      const Field& u1 = derivs[1];
      const Field& u2 = derivs[2];
      return 10.0 * u.cube() + e2 * (10.0 * u * u2 + 5.0 * u1.square());
    }
    default: {
      const Field& u1 = derivs[1];
      const Field& u2 = derivs[2];
      const Field& u3 = derivs[3];
      const Field& u4 = derivs[4];
      return -(35.0 * u.square().square() +
               e2 * (70.0 * u.square() * u2 + 70.0 * u * u1.square()) +
               e2 * e2 * (14.0 * u * u4 + 28.0 * u1 * u3 + 21.0 * u2.square()));
    }
  }
}

Eigen::ArrayXcd leading_dispersion_symbol(const Field& k, double eps, int m) {
  require_evolvable(m);
  const double e2m = std::pow(eps, 2 * m);
  return (e2m * k.pow(2 * m + 1)).cast<std::complex<double>>() * std::complex<double>(0.0, 1.0);
}

Conserved conserved(const Field& u, double dx) {
  return {u.sum() * dx, 0.5 * u.square().sum() * dx};
}

}  // namespace kdvh
