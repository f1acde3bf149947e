#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace fperiod {

// A sample of N curves evaluated on a shared grid in [0,1].  The grid and
// its trapezoid quadrature weights realize the L2 inner product, so every
// operator downstream is a plain matrix in grid coordinates.
struct FunctionalSample {
    Eigen::MatrixXd values;   // N x G, row t = curve t on the grid
    Eigen::VectorXd grid;     // G strictly increasing points in [0,1]
    Eigen::VectorXd weights;  // G positive quadrature weights

    Eigen::Index n_curves() const { return values.rows(); }
    Eigen::Index n_grid() const { return values.cols(); }
};

// Scores of curves projected on a finite basis; rows index time.
struct MultivariateSeries {
    Eigen::MatrixXd scores;  // N x p
    std::string basis_id;

    Eigen::Index n_obs() const { return scores.rows(); }
    Eigen::Index dim() const { return scores.cols(); }
};

// Period bookkeeping: N = d*n, q = (d-1)/2 for odd d, r = (d-2)/2 for even d.
struct PeriodSpec {
    int d = 0;
    long n = 0;
    bool even = false;

    long sample_size() const { return static_cast<long>(d) * n; }
    // number of strictly interior seasonal frequencies
    int n_seasonal() const { return even ? (d - 2) / 2 : (d - 1) / 2; }
};

PeriodSpec make_period(int d, long N);

// Per-group means hat w_k = Ybar_k - Ybar and the grand mean.
struct GroupMeans {
    Eigen::MatrixXd wk_means;   // d x G, row k = hat w_{k+1}
    Eigen::VectorXd grand_mean; // G
};

struct FpcaResult {
    Eigen::VectorXd eigenvalues;        // descending, clamped at 0
    Eigen::MatrixXd eigencurves;        // p x G, orthonormal in the quadrature metric
    Eigen::VectorXd explained_fraction; // cumulative fraction of total variance
};

FunctionalSample make_sample(const Eigen::MatrixXd& values, const Eigen::VectorXd& grid);

double inner_product(const FunctionalSample& metric,
                     const Eigen::VectorXd& f, const Eigen::VectorXd& g);

// scores[t][j] = <Y_t, v_j>; basis rows are curves on the sample grid.
MultivariateSeries project(const FunctionalSample& sample, const Eigen::MatrixXd& basis,
                           const std::string& basis_id = "user");

// Principal components of the grand-mean-centered sample.
FpcaResult fpca(const FunctionalSample& sample);

// Principal components of a given covariance kernel (G x G, raw coordinates).
FpcaResult fpca_from_cov(const Eigen::MatrixXd& kernel, const FunctionalSample& metric);

GroupMeans weekday_means(const FunctionalSample& sample, const PeriodSpec& period);

}  // namespace fperiod
