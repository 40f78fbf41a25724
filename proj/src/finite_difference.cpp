#include "kdvh/finite_difference.hpp"

#include <algorithm>
#include <cmath>

namespace kdvh {

Eigen::MatrixXd fornberg_weights(double z, const std::vector<double>& nodes, int max_order) {
  const int n = static_cast<int>(nodes.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(max_order + 1, n);
  double c1 = 1.0;
  double c4 = nodes[0] - z;
  c(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c(k, i) = c1 * (k * c(k - 1, i - 1) - c5 * c(k, i - 1)) / c2;
        }
        c(0, i) = -c1 * c5 * c(0, i - 1) / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c(k, j) = (c4 * c(k, j) - k * c(k - 1, j)) / c3;
      }
      c(0, j) = c4 * c(0, j) / c3;
    }
    c1 = c2;
  }
  return c;
}

SparseMatrix derivative_matrix(int n, double h, int order, int accuracy) {
  if (order < 1 || accuracy < 2 || accuracy % 2) {
    throw DomainError("derivative order must be >= 1 and accuracy even and >= 2");
  }
  // Centered width 2 floor((order + 1)/2) - 1 + accuracy, e.g. 5 and 7 points
  // for orders 1-2 and 3-4 at fourth order.
  const int centered = 2 * ((order + 1) / 2) - 1 + accuracy;
  const int one_sided = order + accuracy;
  if (n < one_sided) throw DomainError("grid too small for the finite-difference stencil");
  const int half = centered / 2;

  // Stencil weights depend only on the offset of the row within its window,
  // so compute each distinct pattern once.
  auto weights_for = [&](int first, int width, int row) {
    std::vector<double> nodes(width);
    for (int j = 0; j < width; ++j) nodes[j] = first + j;
    Eigen::MatrixXd w = fornberg_weights(row, nodes, order);
    return Eigen::VectorXd(w.row(order).transpose() / std::pow(h, order));
  };

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * one_sided);
  const Eigen::VectorXd interior = weights_for(-half, centered, 0);
  for (int i = 0; i < n; ++i) {
    if (i >= half && i < n - half) {
      for (int j = 0; j < centered; ++j) triplets.emplace_back(i, i - half + j, interior[j]);
      continue;
    }
    const int first = i < half ? 0 : n - one_sided;
    const Eigen::VectorXd w = weights_for(first, one_sided, i);
    for (int j = 0; j < one_sided; ++j) triplets.emplace_back(i, first + j, w[j]);
  }
  SparseMatrix d(n, n);
  d.setFromTriplets(triplets.begin(), triplets.end());
  return d;
}

}  // namespace kdvh
