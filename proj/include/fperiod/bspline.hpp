#pragma once

#include <Eigen/Dense>

namespace fperiod {

// B-spline design matrix on the grid: num_basis splines of the given order
// (order = degree + 1) on equispaced clamped knots over [grid(0), grid(end)].
// Rows index grid points, columns index basis functions.
Eigen::MatrixXd bspline_design(const Eigen::VectorXd& grid, int num_basis, int order);

// Least-squares fit of each row of `values` in the spline space, evaluated
// back on the same grid.
Eigen::MatrixXd bspline_smooth(const Eigen::MatrixXd& values, const Eigen::VectorXd& grid,
                               int num_basis, int order);

}  // namespace fperiod
