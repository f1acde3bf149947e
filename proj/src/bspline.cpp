#include "fperiod/bspline.hpp"

#include <stdexcept>
#include <vector>

namespace fperiod {

namespace {

// Cox-de Boor evaluation of all basis functions at x for a clamped knot
// vector.  knots has num_basis + order entries.
void eval_row(const std::vector<double>& knots, int order, double x, Eigen::RowVectorXd& row) {
    const int nb = static_cast<int>(knots.size()) - order;
    row.setZero();
    // order-1 (piecewise constant) seed
    std::vector<double> b(nb + order - 1, 0.0);
    for (int i = 0; i + 1 < static_cast<int>(knots.size()); ++i) {
        const bool last_span = knots[i] < knots[i + 1] && knots[i + 1] == knots.back();
        if ((x >= knots[i] && x < knots[i + 1]) || (last_span && x == knots.back()))
            b[i] = 1.0;
    }
    for (int k = 2; k <= order; ++k) {
        for (int i = 0; i + k < static_cast<int>(knots.size()); ++i) {
            double v = 0.0;
            const double den1 = knots[i + k - 1] - knots[i];
            const double den2 = knots[i + k] - knots[i + 1];
            if (den1 > 0) v += (x - knots[i]) / den1 * b[i];
            if (den2 > 0) v += (knots[i + k] - x) / den2 * b[i + 1];
            b[i] = v;
        }
    }
    for (int i = 0; i < nb; ++i) row[i] = b[i];
}

}  // namespace

Eigen::MatrixXd bspline_design(const Eigen::VectorXd& grid, int num_basis, int order) {
    if (order < 1 || num_basis < order)
        throw std::invalid_argument("bspline: need num_basis >= order >= 1");
    if (grid.size() < num_basis)
        throw std::invalid_argument("bspline: fewer grid points than basis functions");
    const double a = grid[0], b = grid[grid.size() - 1];
    const int interior = num_basis - order;
    std::vector<double> knots;
    knots.reserve(num_basis + order);
    for (int i = 0; i < order; ++i) knots.push_back(a);
    for (int i = 1; i <= interior; ++i)
        knots.push_back(a + (b - a) * i / (interior + 1));
    for (int i = 0; i < order; ++i) knots.push_back(b);

    Eigen::MatrixXd design(grid.size(), num_basis);
    Eigen::RowVectorXd row(num_basis);
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
        eval_row(knots, order, grid[g], row);
        design.row(g) = row;
    }
    return design;
}

Eigen::MatrixXd bspline_smooth(const Eigen::MatrixXd& values, const Eigen::VectorXd& grid,
                               int num_basis, int order) {
    if (values.cols() != grid.size())
        throw std::invalid_argument("bspline_smooth: values/grid size mismatch");
    const Eigen::MatrixXd design = bspline_design(grid, num_basis, order);
    // coefficients for all rows at once: solve design * C' = values'
    const Eigen::MatrixXd coef =
        design.colPivHouseholderQr().solve(values.transpose());
    return (design * coef).transpose();
}

}  // namespace fperiod
