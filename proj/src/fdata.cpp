#include "fperiod/fdata.hpp"

#include <cmath>
#include <stdexcept>

namespace fperiod {

PeriodSpec make_period(int d, long N) {
    if (d <= 1) throw std::invalid_argument("period d must exceed 1");
    if (N <= 0 || N % d != 0)
        throw std::invalid_argument("N not multiple of d (N=" + std::to_string(N) +
                                    ", d=" + std::to_string(d) + ")");
    PeriodSpec p;
    p.d = d;
    p.n = N / d;
    p.even = (d % 2 == 0);
    return p;
}

FunctionalSample make_sample(const Eigen::MatrixXd& values, const Eigen::VectorXd& grid) {
    const Eigen::Index N = values.rows(), G = values.cols();
    if (N < 2) throw std::invalid_argument("need at least 2 curves, got " + std::to_string(N));
    if (G < 2 || grid.size() != G)
        throw std::invalid_argument("grid length must match columns and be >= 2");
    for (Eigen::Index g = 1; g < G; ++g)
        if (!(grid[g] > grid[g - 1]))
            throw std::invalid_argument("grid not increasing at index " + std::to_string(g));
    for (Eigen::Index t = 0; t < N; ++t)
        for (Eigen::Index g = 0; g < G; ++g)
            if (!std::isfinite(values(t, g)))
                throw std::invalid_argument("non-finite value at row " + std::to_string(t) +
                                            ", column " + std::to_string(g));

    FunctionalSample s;
    s.values = values;
    s.grid = grid;
    s.weights = Eigen::VectorXd::Zero(G);
    for (Eigen::Index g = 0; g + 1 < G; ++g) {
        const double h = 0.5 * (grid[g + 1] - grid[g]);
        s.weights[g] += h;
        s.weights[g + 1] += h;
    }
    return s;
}

double inner_product(const FunctionalSample& metric,
                     const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
    if (f.size() != metric.n_grid() || g.size() != metric.n_grid())
        throw std::invalid_argument("inner_product: length mismatch with sample grid");
    return (f.array() * g.array() * metric.weights.array()).sum();
}

MultivariateSeries project(const FunctionalSample& sample, const Eigen::MatrixXd& basis,
                           const std::string& basis_id) {
    if (basis.cols() != sample.n_grid())
        throw std::invalid_argument("project: basis curves not on the sample grid");
    const Eigen::Index p = basis.rows();
    if (p < 1) throw std::invalid_argument("project: empty basis");

    const Eigen::MatrixXd wb = basis * sample.weights.asDiagonal();  // p x G
    const Eigen::MatrixXd gram = wb * basis.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram);
    const double cond = svd.singularValues()(0) /
                        svd.singularValues()(svd.singularValues().size() - 1);
    if (!(cond < 1e12)) throw std::invalid_argument("project: singular basis Gram matrix");

    MultivariateSeries out;
    out.scores = sample.values * wb.transpose();  // N x p
    out.basis_id = basis_id;
    return out;
}

namespace {

FpcaResult eig_in_metric(const Eigen::MatrixXd& kernel, const FunctionalSample& metric) {
    // Symmetric problem in weighted coordinates W^{1/2} K W^{1/2}; eigencurves
    // mapped back with W^{-1/2} stay orthonormal under the quadrature metric.
    const Eigen::VectorXd ws = metric.weights.array().sqrt();
    const Eigen::MatrixXd m =
        ws.asDiagonal() * ((kernel + kernel.transpose()) / 2.0) * ws.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("fpca: eigensolver failure");

    const Eigen::Index G = kernel.rows();
    FpcaResult r;
    r.eigenvalues = es.eigenvalues().reverse();
    r.eigencurves = Eigen::MatrixXd(G, G);
    for (Eigen::Index j = 0; j < G; ++j)
        r.eigencurves.row(j) = (es.eigenvectors().col(G - 1 - j).array() / ws.array()).transpose();

    const double lmax = std::max(r.eigenvalues[0], 0.0);
    for (Eigen::Index j = 0; j < G; ++j) {
        if (r.eigenvalues[j] < -1e-10 * std::max(lmax, 1.0) && r.eigenvalues[j] < -1e-10)
            throw std::runtime_error("fpca: covariance estimate not PSD");
        if (r.eigenvalues[j] < 0) r.eigenvalues[j] = 0;
    }
    const double total = r.eigenvalues.sum();
    r.explained_fraction = Eigen::VectorXd(G);
    double cum = 0;
    for (Eigen::Index j = 0; j < G; ++j) {
        cum += r.eigenvalues[j];
        r.explained_fraction[j] = total > 0 ? cum / total : 1.0;
    }
    return r;
}

}  // namespace

FpcaResult fpca(const FunctionalSample& sample) {
    const Eigen::Index N = sample.n_curves();
    const Eigen::RowVectorXd mean = sample.values.colwise().mean();
    const Eigen::MatrixXd centered = sample.values.rowwise() - mean;
    const Eigen::MatrixXd kernel = centered.transpose() * centered / static_cast<double>(N);
    return eig_in_metric(kernel, sample);
}

FpcaResult fpca_from_cov(const Eigen::MatrixXd& kernel, const FunctionalSample& metric) {
    if (kernel.rows() != metric.n_grid() || kernel.cols() != metric.n_grid())
        throw std::invalid_argument("fpca_from_cov: kernel size mismatch");
    return eig_in_metric(kernel, metric);
}

GroupMeans weekday_means(const FunctionalSample& sample, const PeriodSpec& period) {
    const Eigen::Index N = sample.n_curves();
    if (N != period.sample_size())
        throw std::invalid_argument("N not multiple of d (N=" + std::to_string(N) +
                                    ", d=" + std::to_string(period.d) + ")");
    GroupMeans gm;
    gm.grand_mean = sample.values.colwise().mean().transpose();
    gm.wk_means = Eigen::MatrixXd::Zero(period.d, sample.n_grid());
    for (Eigen::Index t = 0; t < N; ++t)
        gm.wk_means.row(t % period.d) += sample.values.row(t);
    gm.wk_means /= static_cast<double>(period.n);
    gm.wk_means.rowwise() -= gm.grand_mean.transpose();
    return gm;
}

}  // namespace fperiod
