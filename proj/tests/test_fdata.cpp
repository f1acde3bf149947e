#include <doctest.h>

#include <random>

#include "fperiod/fdata.hpp"
#include "fperiod/sim.hpp"

using namespace fperiod;

namespace {

FunctionalSample uniform_sample(Eigen::MatrixXd values, int G) {
    return make_sample(std::move(values), Eigen::VectorXd::LinSpaced(G, 0.0, 1.0));
}

}  // namespace

TEST_CASE("make_period") {
    const PeriodSpec p = make_period(7, 210);
    CHECK(p.n == 30);
    CHECK(!p.even);
    CHECK(p.n_seasonal() == 3);
    CHECK(make_period(6, 120).n_seasonal() == 2);
    CHECK(make_period(6, 120).even);
    CHECK_THROWS_AS(make_period(7, 211), std::invalid_argument);
    CHECK_THROWS_AS(make_period(1, 10), std::invalid_argument);
}

TEST_CASE("trapezoid weights integrate exactly on a uniform grid") {
    const int G = 96;
    const auto s = uniform_sample(Eigen::MatrixXd::Ones(2, G), G);
    CHECK(s.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.weights[0] == doctest::Approx(0.5 / (G - 1)));
    CHECK(s.weights[G / 2] == doctest::Approx(1.0 / (G - 1)));

    // trapezoid rule is exact for linear functions
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(G);
    CHECK(inner_product(s, one, one) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(inner_product(s, s.grid, one) == doctest::Approx(0.5).epsilon(1e-12));
    // and within O(G^-2) for smooth ones: int u^2 = 1/3
    CHECK(inner_product(s, s.grid, s.grid) == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("make_sample validation names the offending entry") {
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(3, 4);
    v(1, 2) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(uniform_sample(v, 4), doctest::Contains("row 1"),
                         std::invalid_argument);

    Eigen::VectorXd bad_grid(4);
    bad_grid << 0.0, 0.5, 0.5, 1.0;
    CHECK_THROWS_AS(make_sample(Eigen::MatrixXd::Zero(3, 4), bad_grid), std::invalid_argument);
}

TEST_CASE("projection recovers coordinates in an orthonormal basis") {
    const int G = 96;
    const auto metric = uniform_sample(Eigen::MatrixXd::Zero(2, G), G);
    const Eigen::MatrixXd basis = orthonormal_basis(metric.grid, metric.weights, 5);

    Eigen::MatrixXd values(3, G);
    values.row(0) = 3.0 * basis.row(0) + 2.0 * basis.row(1);
    values.row(1) = -1.0 * basis.row(2);
    values.row(2) = 0.5 * basis.row(4);
    const auto sample = make_sample(values, metric.grid);
    const MultivariateSeries sc = project(sample, basis, "true");
    CHECK(sc.scores(0, 0) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(sc.scores(0, 1) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(sc.scores(1, 2) == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(sc.scores(2, 4) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(std::abs(sc.scores(1, 0)) < 1e-10);

    // a duplicated basis row is singular
    Eigen::MatrixXd dup(2, G);
    dup.row(0) = basis.row(0);
    dup.row(1) = basis.row(0);
    CHECK_THROWS_AS(project(sample, dup), std::invalid_argument);
}

TEST_CASE("fpca_from_cov recovers a known Karhunen-Loeve expansion") {
    const int G = 96;
    const auto metric = uniform_sample(Eigen::MatrixXd::Zero(2, G), G);
    const Eigen::MatrixXd basis = orthonormal_basis(metric.grid, metric.weights, 3);
    const double lambda[] = {2.0, 1.0, 0.25};
    Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(G, G);
    for (int k = 0; k < 3; ++k)
        kernel += lambda[k] * basis.row(k).transpose() * basis.row(k);

    const FpcaResult pc = fpca_from_cov(kernel, metric);
    CHECK(pc.eigenvalues[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(pc.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pc.eigenvalues[2] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(pc.eigenvalues[3] == doctest::Approx(0.0));
    CHECK(pc.explained_fraction[2] == doctest::Approx(1.0).epsilon(1e-9));
    for (int k = 0; k < 3; ++k) {
        const Eigen::VectorXd v = pc.eigencurves.row(k).transpose();
        const Eigen::VectorXd w = basis.row(k).transpose();
        // eigencurves are defined up to sign
        CHECK(std::abs(inner_product(metric, v, w)) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(inner_product(metric, v, v) == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("fpca of random curves matches its covariance decomposition") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    const int G = 48, N = 40;
    Eigen::MatrixXd v(N, G);
    for (int t = 0; t < N; ++t)
        for (int g = 0; g < G; ++g) v(t, g) = gauss(rng);
    const auto sample = uniform_sample(v, G);
    const FpcaResult pc = fpca(sample);
    CHECK(pc.eigenvalues.minCoeff() >= 0.0);
    // total variance equals the integrated pointwise variance
    const Eigen::RowVectorXd mean = sample.values.colwise().mean();
    const Eigen::MatrixXd c = sample.values.rowwise() - mean;
    double total = 0;
    for (int g = 0; g < G; ++g) total += sample.weights[g] * c.col(g).squaredNorm() / N;
    CHECK(pc.eigenvalues.sum() == doctest::Approx(total).epsilon(1e-10));
}

TEST_CASE("weekday means") {
    // d = 2, n = 2, scalar-ish curves on 2 grid points
    Eigen::MatrixXd v(4, 2);
    v << 1, 0,
         3, 2,
         5, 4,
         7, 6;
    const auto sample = uniform_sample(v, 2);
    const PeriodSpec p = make_period(2, 4);
    const GroupMeans gm = weekday_means(sample, p);
    CHECK(gm.grand_mean[0] == doctest::Approx(4.0));
    CHECK(gm.grand_mean[1] == doctest::Approx(3.0));
    // group 0 = rows 0,2 -> mean 3; group 1 = rows 1,3 -> mean 5; centered
    CHECK(gm.wk_means(0, 0) == doctest::Approx(-1.0));
    CHECK(gm.wk_means(1, 0) == doctest::Approx(1.0));
    // centered means sum to zero
    CHECK(gm.wk_means.colwise().sum().cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(weekday_means(sample, make_period(3, 6)), std::invalid_argument);
}
