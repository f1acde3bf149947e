#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "fperiod/fdata.hpp"

namespace fperiod {

// Frequencies theta = 2*pi*j/N with the generating index j recorded, so
// membership in the fundamental set is exact by construction.
struct FrequencySet {
    std::vector<double> thetas;    // strictly increasing, in (0, pi]
    std::vector<long> indices;     // theta = 2*pi*index/N
    long sample_size = 0;
    bool has_nyquist = false;      // last entry is theta_{N/2} = pi (even d)

    std::size_t size() const { return thetas.size(); }
};

// Seasonal frequencies vartheta_k = 2*pi*k/d.  Odd d: k = 1..q.  Even d:
// k = 1..r plus the Nyquist frequency pi, flagged separately.
FrequencySet seasonal_frequencies(const PeriodSpec& period);

// Real/imaginary parts of the DFT D(theta) = N^{-1/2} sum_t Y_t e^{-i t theta}
// at each requested frequency.  Rows of R[j]/C[j] are curves (or score
// vectors) matching the input's column dimension.
struct DftBlock {
    std::vector<Eigen::VectorXd> real_part;
    std::vector<Eigen::VectorXd> imag_part;
    FrequencySet thetas;
};

DftBlock dft(const Eigen::MatrixXd& series, const FrequencySet& thetas);
DftBlock dft(const FunctionalSample& sample, const FrequencySet& thetas);
DftBlock dft(const MultivariateSeries& series, const FrequencySet& thetas);

// Gram matrix <A_i, A_j> of the stacked DFT block
//   A = [R(t_1),...,R(t_l), C(t_1),...,C(t_l)]            (odd-d form)
//   B = [R(t_1),...,R(t_l), C(t_1),...,C(t_l), R(pi)]     (even-d form)
// under the quadrature metric (functional) or the Euclidean one (nullptr).
Eigen::MatrixXd gram(const DftBlock& block, const FunctionalSample* metric);

// Whitened multivariate Gram H H' with per-frequency whitening matrices
// M_j = F_{theta_j}^{-1/2} applied to D(theta_j) before stacking.
Eigen::MatrixXd gram_whitened(const DftBlock& block,
                              const std::vector<Eigen::MatrixXcd>& inv_sqrt_per_freq);

namespace ref {
// Brute-force serial DFT, kept as the oracle for the parallel kernel.
DftBlock dft_serial(const Eigen::MatrixXd& series, const FrequencySet& thetas);
}

}  // namespace fperiod
