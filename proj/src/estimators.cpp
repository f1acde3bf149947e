#include "fperiod/estimators.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace fperiod {

double KernelSpec::weight(double x) const {
    const double a = std::abs(x);
    if (a > 1.0) return 0.0;
    switch (kind) {
        case Kind::bartlett: return 1.0 - a;
        case Kind::flat_top: return a <= 0.5 ? 1.0 : 2.0 * (1.0 - a);
        case Kind::truncated: return 1.0;
    }
    return 0.0;
}

KernelSpec KernelSpec::parse(const std::string& name, long bandwidth) {
    KernelSpec k;
    if (name == "bartlett") k.kind = Kind::bartlett;
    else if (name == "flat-top") k.kind = Kind::flat_top;
    else if (name == "truncated") k.kind = Kind::truncated;
    else throw std::invalid_argument("unknown kernel '" + name + "'");
    if (bandwidth < 1) throw std::invalid_argument("bandwidth must be >= 1");
    k.bandwidth = bandwidth;
    return k;
}

double HypoExpSpec::total() const {
    double s = 0;
    for (double r : rates) s += r;
    return s;
}

Eigen::MatrixXd residuals(const FunctionalSample& sample, const GroupMeans& means) {
    const Eigen::Index N = sample.n_curves();
    const int d = static_cast<int>(means.wk_means.rows());
    Eigen::MatrixXd r = sample.values.rowwise() - means.grand_mean.transpose();
    for (Eigen::Index t = 0; t < N; ++t) r.row(t) -= means.wk_means.row(t % d);
    return r;
}

namespace {

Eigen::MatrixXd autocov_kernel(const Eigen::MatrixXd& resid, long h) {
    const Eigen::Index N = resid.rows();
    const long a = std::labs(h);
    if (a >= N) throw std::invalid_argument("autocov: |h| >= N");
    // C_h = (1/N) sum_{t=1}^{N-h} r_{t+h} (x) r_t ; C_{-h} = C_h'
    const Eigen::MatrixXd k = resid.bottomRows(N - a).transpose() * resid.topRows(N - a) /
                              static_cast<double>(N);
    return h >= 0 ? k : Eigen::MatrixXd(k.transpose());
}

}  // namespace

AutocovOperator autocov(const FunctionalSample& sample, const GroupMeans& means, long h) {
    return AutocovOperator{h, autocov_kernel(residuals(sample, means), h)};
}

namespace ref {

AutocovOperator autocov_serial(const FunctionalSample& sample, const GroupMeans& means, long h) {
    const Eigen::MatrixXd resid = residuals(sample, means);
    const Eigen::Index N = resid.rows(), G = resid.cols();
    const long a = std::labs(h);
    if (a >= N) throw std::invalid_argument("autocov: |h| >= N");
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(G, G);
    for (Eigen::Index t = 0; t + a < N; ++t)
        k += resid.row(t + a).transpose() * resid.row(t);
    k /= static_cast<double>(N);
    return AutocovOperator{h, h >= 0 ? k : Eigen::MatrixXd(k.transpose())};
}

}  // namespace ref

namespace {

// Assemble the lag-window sum at one frequency from precomputed C_h, h >= 0.
Eigen::MatrixXcd lag_window_sum(const std::vector<Eigen::MatrixXd>& covs, double theta,
                                const KernelSpec& kernel) {
    const std::complex<double> i(0.0, 1.0);
    Eigen::MatrixXcd f = covs[0].cast<std::complex<double>>();
    for (std::size_t h = 1; h < covs.size(); ++h) {
        const double w = kernel.weight(static_cast<double>(h) / kernel.bandwidth);
        if (w == 0.0) continue;
        const auto rot = std::exp(-i * (static_cast<double>(h) * theta));
        f += w * (rot * covs[h] + std::conj(rot) * covs[h].transpose());
    }
    return f;
}

SpectralDensity finalize_hermitian(Eigen::MatrixXcd m, double theta) {
    m = ((m + m.adjoint()) / 2.0).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("spectral_density: eigensolver failure");
    SpectralDensity sd;
    sd.theta = theta;
    sd.matrix = std::move(m);
    sd.eigenvalues = es.eigenvalues().reverse();
    const double lmax = std::max(sd.eigenvalues[0], 0.0);
    for (Eigen::Index j = 0; j < sd.eigenvalues.size(); ++j) {
        if (sd.eigenvalues[j] < -1e-8 * std::max(lmax, 1e-300))
            throw std::runtime_error("spectral density estimate has a negative eigenvalue " +
                                     std::to_string(sd.eigenvalues[j]));
        if (sd.eigenvalues[j] < 0) sd.eigenvalues[j] = 0;
    }
    return sd;
}

std::vector<Eigen::MatrixXd> weighted_covs(const FunctionalSample& sample,
                                           const GroupMeans& means, const KernelSpec& kernel) {
    const Eigen::Index N = sample.n_curves();
    if (kernel.bandwidth >= N) throw std::invalid_argument("bandwidth must be < N");
    const Eigen::MatrixXd resid = residuals(sample, means);
    const Eigen::VectorXd ws = sample.weights.array().sqrt();
    const long nlags = std::min<long>(kernel.bandwidth, N - 1);
    std::vector<Eigen::MatrixXd> covs(nlags + 1);
    // lags are independent of each other
#pragma omp parallel for schedule(dynamic)
    for (long h = 0; h <= nlags; ++h)
        covs[h] = ws.asDiagonal() * autocov_kernel(resid, h) * ws.asDiagonal();
    return covs;
}

std::vector<Eigen::MatrixXd> score_covs(const MultivariateSeries& series,
                                        const Eigen::MatrixXd& score_means,
                                        const KernelSpec& kernel) {
    const Eigen::Index N = series.n_obs();
    if (kernel.bandwidth >= N) throw std::invalid_argument("bandwidth must be < N");
    const int d = static_cast<int>(score_means.rows());
    Eigen::MatrixXd resid = series.scores.rowwise() - series.scores.colwise().mean();
    for (Eigen::Index t = 0; t < N; ++t) resid.row(t) -= score_means.row(t % d);
    const long nlags = std::min<long>(kernel.bandwidth, N - 1);
    std::vector<Eigen::MatrixXd> covs(nlags + 1);
    for (long h = 0; h <= nlags; ++h) covs[h] = autocov_kernel(resid, h);
    return covs;
}

}  // namespace

SpectralDensity spectral_density(const FunctionalSample& sample, const GroupMeans& means,
                                 double theta, const KernelSpec& kernel) {
    return finalize_hermitian(lag_window_sum(weighted_covs(sample, means, kernel), theta, kernel),
                              theta);
}

std::vector<SpectralDensity> spectral_density_multi(const FunctionalSample& sample,
                                                    const GroupMeans& means,
                                                    const std::vector<double>& thetas,
                                                    const KernelSpec& kernel) {
    const auto covs = weighted_covs(sample, means, kernel);
    std::vector<SpectralDensity> out;
    out.reserve(thetas.size());
    for (double th : thetas) out.push_back(finalize_hermitian(lag_window_sum(covs, th, kernel), th));
    return out;
}

SpectralDensity projected_spectral(const MultivariateSeries& series,
                                   const Eigen::MatrixXd& score_means, double theta,
                                   const KernelSpec& kernel) {
    return finalize_hermitian(lag_window_sum(score_covs(series, score_means, kernel), theta, kernel),
                              theta);
}

std::vector<SpectralDensity> projected_spectral_multi(const MultivariateSeries& series,
                                                      const Eigen::MatrixXd& score_means,
                                                      const std::vector<double>& thetas,
                                                      const KernelSpec& kernel) {
    const auto covs = score_covs(series, score_means, kernel);
    std::vector<SpectralDensity> out;
    out.reserve(thetas.size());
    for (double th : thetas) out.push_back(finalize_hermitian(lag_window_sum(covs, th, kernel), th));
    return out;
}

InvSqrtResult inv_sqrt(const Eigen::MatrixXcd& matrix, double floor_rel) {
    if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() >
        1e-8 * std::max(1.0, matrix.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("inv_sqrt: matrix not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((matrix + matrix.adjoint()) / 2.0);
    if (es.info() != Eigen::Success) throw std::runtime_error("inv_sqrt: eigensolver failure");
    const Eigen::VectorXd ev = es.eigenvalues();
    const double lmax = ev.maxCoeff();
    if (!(lmax > 0)) throw std::invalid_argument("inv_sqrt: matrix has no positive eigenvalue");
    const double floor = floor_rel * lmax;
    InvSqrtResult r;
    Eigen::VectorXd inv(ev.size());
    for (Eigen::Index j = 0; j < ev.size(); ++j) {
        double l = ev[j];
        if (l < floor) {
            l = floor;
            ++r.floored_modes;
        }
        inv[j] = 1.0 / std::sqrt(l);
    }
    r.matrix = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
    return r;
}

HypoExpSpec truncate_rates(const Eigen::VectorXd& eigenvalues, double trace_total,
                           double epsilon) {
    if (eigenvalues.size() == 0 || eigenvalues.maxCoeff() <= 0)
        throw std::invalid_argument("truncate_rates: all eigenvalues are zero");
    const double eps = epsilon < 0 ? 1e-6 * trace_total : epsilon;
    HypoExpSpec spec;
    double kept = 0;
    for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
        spec.rates.push_back(std::max(eigenvalues[j], 0.0));
        kept += eigenvalues[j];
        if (trace_total - kept <= eps) break;
    }
    return spec;
}

}  // namespace fperiod
