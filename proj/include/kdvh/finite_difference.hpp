#pragma once

#include "kdvh/common.hpp"

#include <Eigen/SparseCore>

#include <vector>

namespace kdvh {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Fornberg weights for the derivatives 0..max_order at z from arbitrary
/// nodes. Row d of the result holds the weights for the d-th derivative.
Eigen::MatrixXd fornberg_weights(double z, const std::vector<double>& nodes, int max_order);

/// Derivative operator of the given order on a uniform grid of n points with
/// spacing h, accurate to O(h^accuracy) (accuracy even). Interior rows are
/// centered; rows near the ends use the nearest one-sided window of
/// order + accuracy points.
SparseMatrix derivative_matrix(int n, double h, int order, int accuracy = 4);

}  // namespace kdvh
