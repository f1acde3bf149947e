#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fperiod/fdata.hpp"

namespace fperiod {

// Lag-h autocovariance kernel K_h(u,u') in raw grid coordinates.
struct AutocovOperator {
    long h = 0;
    Eigen::MatrixXd kernel;  // G x G
};

// Lag-window weight function: gamma(0)=1, |gamma|<=1, gamma(x)=0 for |x|>1.
struct KernelSpec {
    enum class Kind { bartlett, flat_top, truncated };
    Kind kind = Kind::bartlett;
    long bandwidth = 1;  // b_N, 1 <= b_N < N

    double weight(double x) const;
    static KernelSpec parse(const std::string& name, long bandwidth);
};

inline long default_bandwidth(long N) {
    return static_cast<long>(std::floor(std::pow(static_cast<double>(N), 1.0 / 3.0)));
}

// Hermitian spectral density estimate at one frequency with its eigenvalues.
// Functional estimates are stored in weighted coordinates (W^{1/2}-conjugated)
// so the eigenvalues are those of the operator under the quadrature metric.
struct SpectralDensity {
    double theta = 0;
    Eigen::MatrixXcd matrix;
    Eigen::VectorXd eigenvalues;  // real, descending, clamped at 0
};

// Ordered rates of HExp(l_1, l_2, ...) = sum_i l_i E_i.
struct HypoExpSpec {
    std::vector<double> rates;  // non-increasing, >= 0

    double total() const;
};

// Residuals Y_t - hat w_t - Ybar; the demeaning stays consistent under both
// hypotheses, which preserves power of the tests built on these estimates.
Eigen::MatrixXd residuals(const FunctionalSample& sample, const GroupMeans& means);

AutocovOperator autocov(const FunctionalSample& sample, const GroupMeans& means, long h);

SpectralDensity spectral_density(const FunctionalSample& sample, const GroupMeans& means,
                                 double theta, const KernelSpec& kernel);

// All requested frequencies at once; the lag covariances are shared.
std::vector<SpectralDensity> spectral_density_multi(const FunctionalSample& sample,
                                                    const GroupMeans& means,
                                                    const std::vector<double>& thetas,
                                                    const KernelSpec& kernel);

SpectralDensity projected_spectral(const MultivariateSeries& series,
                                   const Eigen::MatrixXd& score_means,  // d x p group means
                                   double theta, const KernelSpec& kernel);

std::vector<SpectralDensity> projected_spectral_multi(const MultivariateSeries& series,
                                                      const Eigen::MatrixXd& score_means,
                                                      const std::vector<double>& thetas,
                                                      const KernelSpec& kernel);

struct InvSqrtResult {
    Eigen::MatrixXcd matrix;
    int floored_modes = 0;
};

// M^{-1/2} of a Hermitian PSD matrix; eigenvalues below floor*lambda_max are
// lifted to floor*lambda_max and the count is reported.
InvSqrtResult inv_sqrt(const Eigen::MatrixXcd& matrix, double floor_rel = 1e-8);

// Shortest prefix of the eigenvalue list whose complement mass is <= epsilon.
// epsilon < 0 selects the default 1e-6 * trace_total.
HypoExpSpec truncate_rates(const Eigen::VectorXd& eigenvalues, double trace_total,
                           double epsilon = -1.0);

namespace ref {
// Serial per-lag reference for the parallel autocovariance kernel.
AutocovOperator autocov_serial(const FunctionalSample& sample, const GroupMeans& means, long h);
}

}  // namespace fperiod
