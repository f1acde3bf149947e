#include <doctest.h>

#include <numbers>
#include <random>

#include "fperiod/estimators.hpp"
#include "fperiod/sim.hpp"

using namespace fperiod;

namespace {

FunctionalSample random_sample(int N, int G, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd v(N, G);
    for (int t = 0; t < N; ++t)
        for (int g = 0; g < G; ++g) v(t, g) = gauss(rng);
    return make_sample(v, Eigen::VectorXd::LinSpaced(G, 0.0, 1.0));
}

}  // namespace

TEST_CASE("lag-window kernels") {
    CHECK(KernelSpec::parse("bartlett", 3).weight(0.0) == 1.0);
    CHECK(KernelSpec::parse("bartlett", 3).weight(0.5) == doctest::Approx(0.5));
    CHECK(KernelSpec::parse("bartlett", 3).weight(1.5) == 0.0);
    CHECK(KernelSpec::parse("flat-top", 3).weight(0.4) == 1.0);
    CHECK(KernelSpec::parse("flat-top", 3).weight(0.75) == doctest::Approx(0.5));
    CHECK(KernelSpec::parse("truncated", 3).weight(0.99) == 1.0);
    CHECK_THROWS_AS(KernelSpec::parse("boxcar", 3), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::parse("bartlett", 0), std::invalid_argument);

    CHECK(default_bandwidth(210) == 5);
    CHECK(default_bandwidth(420) == 7);
    CHECK(default_bandwidth(27) == 3);
}

TEST_CASE("autocovariance: parallel path equals the serial reference, C_-h = C_h'") {
    const auto sample = random_sample(70, 16, 4);
    const GroupMeans means = weekday_means(sample, make_period(7, 70));
    for (long h : {0L, 1L, 3L}) {
        const AutocovOperator a = autocov(sample, means, h);
        const AutocovOperator b = ref::autocov_serial(sample, means, h);
        CHECK((a.kernel - b.kernel).cwiseAbs().maxCoeff() < 1e-10);
        const AutocovOperator neg = autocov(sample, means, -h);
        CHECK((neg.kernel - a.kernel.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS_AS(autocov(sample, means, 70), std::invalid_argument);
}

TEST_CASE("scalar MA(1) spectral density oracle") {
    // x_t = e_t + a e_{t-1}: C_0 = 1+a^2, C_1 = a, so the lag-window estimate
    // converges to (1+a^2) + 2 w(1/b) a cos(theta).
    const double a = 0.6;
    const int N = 200000;
    std::mt19937_64 rng(12);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd x(N, 1);
    double prev = gauss(rng);
    for (int t = 0; t < N; ++t) {
        const double e = gauss(rng);
        x(t, 0) = e + a * prev;
        prev = e;
    }
    MultivariateSeries series{x, "scores"};
    const Eigen::MatrixXd zero_means = Eigen::MatrixXd::Zero(2, 1);
    const KernelSpec kernel = KernelSpec::parse("truncated", 2);
    for (double theta : {2.0 * std::numbers::pi / 5, std::numbers::pi}) {
        const SpectralDensity sd = projected_spectral(series, zero_means, theta, kernel);
        const double expected = (1 + a * a) + 2.0 * a * std::cos(theta);
        CHECK(sd.matrix(0, 0).real() == doctest::Approx(expected).epsilon(0.05));
        CHECK(std::abs(sd.matrix(0, 0).imag()) < 1e-12);
    }
}

TEST_CASE("functional and projected spectral estimates agree on eigenvalues") {
    // project onto a full orthonormal basis: the score spectral matrix is the
    // operator in coordinates, so the eigenvalue lists coincide.
    DgpSpec spec;
    spec.kind = DgpKind::ma5_null;
    spec.n_obs = 210;
    spec.grid_size = 32;
    spec.seed = 9;
    const FunctionalSample sample = gen(spec);
    const PeriodSpec period = make_period(7, 210);
    const GroupMeans means = weekday_means(sample, period);
    const KernelSpec kernel = KernelSpec::parse("bartlett", 5);
    const double theta = 2.0 * std::numbers::pi / 7;

    const SpectralDensity f = spectral_density(sample, means, theta, kernel);

    const Eigen::MatrixXd basis = orthonormal_basis(sample.grid, sample.weights, 9);
    const MultivariateSeries scores = project(sample, basis, "true");
    Eigen::MatrixXd score_means = Eigen::MatrixXd::Zero(period.d, 9);
    for (Eigen::Index t = 0; t < 210; ++t) score_means.row(t % 7) += scores.scores.row(t);
    score_means /= static_cast<double>(period.n);
    score_means.rowwise() -= scores.scores.colwise().mean();
    const SpectralDensity g = projected_spectral(scores, score_means, theta, kernel);

    // the sample lives in the 9-dimensional span, so the top 9 eigenvalues match
    for (int j = 0; j < 9; ++j)
        CHECK(f.eigenvalues[j] == doctest::Approx(g.eigenvalues[j]).epsilon(1e-6));
}

TEST_CASE("inv_sqrt of a known matrix, with flooring") {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 0) = 4.0;
    m(1, 1) = 1.0;
    const InvSqrtResult r = inv_sqrt(m);
    CHECK(r.floored_modes == 0);
    CHECK(r.matrix(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.matrix(1, 1).real() == doctest::Approx(1.0).epsilon(1e-12));

    m(1, 1) = 0.0;  // rank deficient: the zero mode is lifted to 1e-8 * 4
    const InvSqrtResult f = inv_sqrt(m);
    CHECK(f.floored_modes == 1);
    CHECK(f.matrix(1, 1).real() == doctest::Approx(1.0 / std::sqrt(4e-8)).epsilon(1e-9));

    Eigen::MatrixXcd bad(2, 2);
    bad << 1.0, 2.0, 3.0, 1.0;
    CHECK_THROWS_AS(inv_sqrt(bad), std::invalid_argument);
}

TEST_CASE("rate truncation keeps the shortest prefix capturing the trace") {
    Eigen::VectorXd ev(4);
    ev << 1.0, 0.5, 0.25, 1e-12;
    const HypoExpSpec def = truncate_rates(ev, ev.sum());
    CHECK(def.rates.size() == 3);  // default epsilon 1e-6 * trace drops the 1e-12 mode

    const HypoExpSpec loose = truncate_rates(ev, ev.sum(), 0.3);
    CHECK(loose.rates.size() == 2);  // dropping 0.25 + 1e-12 <= 0.3 is allowed

    const HypoExpSpec strict = truncate_rates(ev, ev.sum(), 0.0);
    CHECK(strict.rates.size() == 4);

    CHECK_THROWS_AS(truncate_rates(Eigen::VectorXd::Zero(3), 0.0), std::invalid_argument);
}
