#include "fperiod/freq.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fperiod {

FrequencySet seasonal_frequencies(const PeriodSpec& period) {
    FrequencySet fs;
    fs.sample_size = period.sample_size();
    const int ell = period.n_seasonal();
    for (int k = 1; k <= ell; ++k) {
        fs.indices.push_back(static_cast<long>(k) * period.n);
        fs.thetas.push_back(2.0 * std::numbers::pi * k / period.d);
    }
    if (period.even) {
        fs.indices.push_back(fs.sample_size / 2);
        fs.thetas.push_back(std::numbers::pi);
        fs.has_nyquist = true;
    }
    return fs;
}

namespace {

void check_fundamental(const FrequencySet& thetas, Eigen::Index N) {
    for (double th : thetas.thetas) {
        const double j = th * static_cast<double>(N) / (2.0 * std::numbers::pi);
        const double jr = std::round(j);
        if (jr < 1 || jr > N / 2 || std::abs(j - jr) > 1e-12 * std::max(1.0, j))
            throw std::invalid_argument(
                "dft: frequency " + std::to_string(th) +
                " is not a fundamental frequency 2*pi*j/N of N=" + std::to_string(N));
    }
}

}  // namespace

namespace ref {

DftBlock dft_serial(const Eigen::MatrixXd& series, const FrequencySet& thetas) {
    const Eigen::Index N = series.rows(), G = series.cols();
    check_fundamental(thetas, N);
    DftBlock out;
    out.thetas = thetas;
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    for (double th : thetas.thetas) {
        Eigen::VectorXd re = Eigen::VectorXd::Zero(G);
        Eigen::VectorXd im = Eigen::VectorXd::Zero(G);
        for (Eigen::Index t = 0; t < N; ++t) {
            const double c = std::cos((t + 1) * th);
            const double s = std::sin((t + 1) * th);
            for (Eigen::Index g = 0; g < G; ++g) {
                re[g] += c * series(t, g);
                im[g] -= s * series(t, g);
            }
        }
        out.real_part.push_back(scale * re);
        out.imag_part.push_back(scale * im);
    }
    return out;
}

}  // namespace ref

DftBlock dft(const Eigen::MatrixXd& series, const FrequencySet& thetas) {
    const Eigen::Index N = series.rows(), G = series.cols();
    check_fundamental(thetas, N);
    DftBlock out;
    out.thetas = thetas;
    out.real_part.resize(thetas.size());
    out.imag_part.resize(thetas.size());
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    // Per-frequency work is independent; the summation order within a
    // frequency is fixed, so results do not depend on the thread count.
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t f = 0; f < static_cast<std::ptrdiff_t>(thetas.size()); ++f) {
        const double th = thetas.thetas[f];
        Eigen::VectorXd cosv(N), sinv(N);
        for (Eigen::Index t = 0; t < N; ++t) {
            cosv[t] = std::cos((t + 1) * th);
            sinv[t] = std::sin((t + 1) * th);
        }
        out.real_part[f] = scale * (series.transpose() * cosv);
        out.imag_part[f] = -scale * (series.transpose() * sinv);
    }
    return out;
}

DftBlock dft(const FunctionalSample& sample, const FrequencySet& thetas) {
    return dft(sample.values, thetas);
}

DftBlock dft(const MultivariateSeries& series, const FrequencySet& thetas) {
    return dft(series.scores, thetas);
}

namespace {

// Stack the block rows in a fixed order: all real parts, all imaginary
// parts of interior frequencies, then the Nyquist real part if present.
std::vector<const Eigen::VectorXd*> stacked_rows(const DftBlock& block) {
    const std::size_t l = block.thetas.size() - (block.thetas.has_nyquist ? 1 : 0);
    std::vector<const Eigen::VectorXd*> rows;
    for (std::size_t k = 0; k < l; ++k) rows.push_back(&block.real_part[k]);
    for (std::size_t k = 0; k < l; ++k) rows.push_back(&block.imag_part[k]);
    if (block.thetas.has_nyquist) rows.push_back(&block.real_part[l]);
    return rows;
}

}  // namespace

Eigen::MatrixXd gram(const DftBlock& block, const FunctionalSample* metric) {
    const auto rows = stacked_rows(block);
    const std::size_t m = rows.size();
    Eigen::MatrixXd g(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            const double v = metric ? inner_product(*metric, *rows[i], *rows[j])
                                    : rows[i]->dot(*rows[j]);
            g(i, j) = v;
            g(j, i) = v;
        }
    return g;
}

Eigen::MatrixXd gram_whitened(const DftBlock& block,
                              const std::vector<Eigen::MatrixXcd>& inv_sqrt_per_freq) {
    if (inv_sqrt_per_freq.size() != block.thetas.size())
        throw std::invalid_argument("gram_whitened: one whitening matrix per frequency required");
    const std::size_t nf = block.thetas.size();
    const std::size_t l = nf - (block.thetas.has_nyquist ? 1 : 0);
    const Eigen::Index p = block.real_part[0].size();

    std::vector<Eigen::VectorXcd> whitened(nf);
    for (std::size_t k = 0; k < nf; ++k) {
        Eigen::VectorXcd d(p);
        d.real() = block.real_part[k];
        d.imag() = block.imag_part[k];
        whitened[k] = inv_sqrt_per_freq[k] * d;
    }
    const std::size_t m = 2 * l + (block.thetas.has_nyquist ? 1 : 0);
    Eigen::MatrixXd h(m, p);
    for (std::size_t k = 0; k < l; ++k) {
        h.row(k) = whitened[k].real().transpose();
        h.row(l + k) = whitened[k].imag().transpose();
    }
    if (block.thetas.has_nyquist) h.row(2 * l) = whitened[nf - 1].real().transpose();
    return h * h.transpose();
}

}  // namespace fperiod
