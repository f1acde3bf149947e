#include "fperiod/nulldist.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

#include "fperiod/rng.hpp"

namespace fperiod {

void McConfig::validate_for_quantiles() const {
    if (replications < 10000)
        throw std::invalid_argument("Monte Carlo quantiles need >= 10000 replications");
}

namespace {

std::vector<double> positive_rates(const HypoExpSpec& spec) {
    std::vector<double> r;
    for (double l : spec.rates) {
        if (l < 0) throw std::invalid_argument("hypoexponential rate < 0");
        if (l > 0) r.push_back(l);
    }
    if (r.empty()) throw std::invalid_argument("hypoexponential: all rates zero");
    return r;
}

bool rates_distinct(std::vector<double> r) {
    std::sort(r.begin(), r.end());
    for (std::size_t i = 1; i < r.size(); ++i)
        if (r[i] - r[i - 1] < 1e-6 * r[i]) return false;
    return true;
}

// P = 1 - sum_i c_i e^{-x/l_i}, c_i = prod_{j!=i} l_i/(l_i-l_j).
double cdf_closed_form(const std::vector<double>& r, double x) {
    double p = 1.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        double c = 1.0;
        for (std::size_t j = 0; j < r.size(); ++j)
            if (j != i) c *= r[i] / (r[i] - r[j]);
        p -= c * std::exp(-x / r[i]);
    }
    return std::clamp(p, 0.0, 1.0);
}

// Phase-type evaluation: the sum of exponentials with means l_1..l_k is the
// absorption time of a chain with generator T, and P(X<=x)=1-e_1'exp(Tx)1.
// Stable for repeated rates, unlike the partial-fraction coefficients.
double cdf_matrix_exp(const std::vector<double>& r, double x) {
    const Eigen::Index k = static_cast<Eigen::Index>(r.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        t(i, i) = -1.0 / r[i];
        if (i + 1 < k) t(i, i + 1) = 1.0 / r[i];
    }
    const Eigen::MatrixXd e = (t * x).exp();
    const double survival = e.row(0).sum();
    return std::clamp(1.0 - survival, 0.0, 1.0);
}

}  // namespace

double hypoexp_cdf(const HypoExpSpec& spec, double x) {
    if (x <= 0) return 0.0;
    const auto r = positive_rates(spec);
    if (r.size() == 1) return 1.0 - std::exp(-x / r[0]);
    return rates_distinct(r) ? cdf_closed_form(r, x) : cdf_matrix_exp(r, x);
}

namespace {

double quantile_by_bisection(const std::function<double(double)>& cdf, double target,
                             double hi_guess) {
    double lo = 0.0, hi = hi_guess;
    while (cdf(hi) < target) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double hypoexp_quantile(const HypoExpSpec& spec, double alpha) {
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must be in (0,1)");
    const double mean = spec.total();
    return quantile_by_bisection([&](double x) { return hypoexp_cdf(spec, x); }, 1.0 - alpha,
                                 std::max(mean, 1e-12) * 2.0);
}

double mixture_cdf(const MixtureLaw& law, double x) {
    if (!law.chi_rates.empty())
        throw std::invalid_argument("mixture_cdf: chi-square part has no closed-form CDF");
    HypoExpSpec merged;
    for (const auto& s : law.specs)
        merged.rates.insert(merged.rates.end(), s.rates.begin(), s.rates.end());
    return hypoexp_cdf(merged, x);
}

namespace {

constexpr long kBlock = 4096;

double draw_mixture(const MixtureLaw& law, std::mt19937_64& rng) {
    std::exponential_distribution<double> expo(1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double s = 0;
    for (const auto& spec : law.specs)
        for (double l : spec.rates) s += l * expo(rng);
    for (double l : law.chi_rates) {
        const double z = gauss(rng);
        s += 0.5 * l * z * z;
    }
    return s;
}

std::vector<double> mixture_sample(const MixtureLaw& law, const McConfig& mc) {
    double total = 0;
    for (const auto& s : law.specs) total += s.total();
    for (double l : law.chi_rates) total += std::abs(l);
    if (!(total > 0)) throw std::invalid_argument("mixture law is degenerate (total rate 0)");

    const long R = mc.replications;
    std::vector<double> draws(R);
    const long nblocks = (R + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(dynamic)
    for (long b = 0; b < nblocks; ++b) {
        auto rng = block_rng(mc.seed, static_cast<std::uint64_t>(b));
        const long lo = b * kBlock, hi = std::min(R, lo + kBlock);
        for (long i = lo; i < hi; ++i) draws[i] = draw_mixture(law, rng);
    }
    return draws;
}

}  // namespace

namespace ref {

std::vector<double> mixture_sample_serial(const MixtureLaw& law, const McConfig& mc) {
    auto rng = block_rng(mc.seed, 0);
    std::vector<double> draws(mc.replications);
    for (double& d : draws) d = draw_mixture(law, rng);
    return draws;
}

}  // namespace ref

McQuantile quantile_from_sorted(const std::vector<double>& sorted, double alpha) {
    const long R = static_cast<long>(sorted.size());
    auto order_stat = [&](double level) {
        long k = static_cast<long>(std::ceil(level * R)) - 1;
        return sorted[std::clamp(k, 0L, R - 1)];
    };
    McQuantile q;
    q.value = order_stat(1.0 - alpha);
    const double band = std::sqrt(alpha * (1.0 - alpha) / R);
    q.std_error = (order_stat(std::min(1.0 - alpha + band, 1.0)) -
                   order_stat(std::max(1.0 - alpha - band, 0.0))) / 2.0;
    return q;
}

double tail_prob_from_sorted(const std::vector<double>& sorted, double x) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
    const long exceed = static_cast<long>(sorted.end() - it);
    return static_cast<double>(exceed + 1) / static_cast<double>(sorted.size() + 1);
}

McQuantile mixture_quantile(const MixtureLaw& law, double alpha, const McConfig& mc) {
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must be in (0,1)");
    mc.validate_for_quantiles();
    auto draws = mixture_sample(law, mc);
    std::sort(draws.begin(), draws.end());
    return quantile_from_sorted(draws, alpha);
}

double mixture_tail_prob(const MixtureLaw& law, double x, const McConfig& mc) {
    auto draws = mixture_sample(law, mc);
    std::sort(draws.begin(), draws.end());
    return tail_prob_from_sorted(draws, x);
}

double erlang_quantile(long shape, double alpha) {
    if (shape < 1) throw std::invalid_argument("Erlang shape must be >= 1");
    return gamma_quantile(static_cast<double>(shape), alpha);
}

double erlang_tail_prob(long shape, double x) {
    if (shape < 1) throw std::invalid_argument("Erlang shape must be >= 1");
    return gamma_tail_prob(static_cast<double>(shape), x);
}

double gamma_quantile(double shape, double alpha) {
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must be in (0,1)");
    return boost::math::gamma_p_inv(shape, 1.0 - alpha);
}

double gamma_tail_prob(double shape, double x) {
    if (x <= 0) return 1.0;
    return boost::math::gamma_q(shape, x);
}

std::vector<double> wishart_maxeig_sample(int p, int dof, const McConfig& mc) {
    if (p < 1 || dof < 1) throw std::invalid_argument("wishart: p and dof must be >= 1");
    mc.validate_for_quantiles();
    const long R = mc.replications;
    std::vector<double> draws(R);
    const long nblocks = (R + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(dynamic)
    for (long b = 0; b < nblocks; ++b) {
        auto rng = block_rng(mc.seed ^ 0xb1c7a5ULL, static_cast<std::uint64_t>(b));
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::MatrixXd x(p, dof);
        const long lo = b * kBlock, hi = std::min(R, lo + kBlock);
        for (long i = lo; i < hi; ++i) {
            for (int a = 0; a < p; ++a)
                for (int c = 0; c < dof; ++c) x(a, c) = gauss(rng);
            if (p == 1) {
                draws[i] = x.squaredNorm() / 2.0;
            } else {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x * x.transpose());
                draws[i] = es.eigenvalues().maxCoeff() / 2.0;
            }
        }
    }
    std::sort(draws.begin(), draws.end());
    return draws;
}

McQuantile wishart_maxeig_quantile(int p, int dof, double alpha, const McConfig& mc) {
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must be in (0,1)");
    return quantile_from_sorted(wishart_maxeig_sample(p, dof, mc), alpha);
}

MixtureLaw even_d_theta_law(const std::vector<double>& rates) {
    MixtureLaw law;
    for (double l : rates)
        if (l < 0) throw std::invalid_argument("theta law: rate < 0");
    law.chi_rates = rates;
    return law;
}

}  // namespace fperiod
