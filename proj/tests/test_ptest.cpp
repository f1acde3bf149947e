#include <doctest.h>

#include <random>

#include "fperiod/ptest.hpp"
#include "fperiod/sim.hpp"

using namespace fperiod;

namespace {

DgpSpec noiseless_cosine(int d, long n_obs) {
    DgpSpec spec;
    spec.kind = DgpKind::model_s;
    spec.d = d;
    spec.signal_index = 1;
    spec.loading_index = 1;
    spec.n_obs = n_obs;
    spec.noise_eigenvalues.assign(9, 0.0);
    return spec;
}

TestConfig known_rates_config(int d, FreqMode mode) {
    TestConfig cfg;
    cfg.period_d = d;
    cfg.mode = mode;
    cfg.noise = NoiseModel::iid_gaussian;
    Eigen::VectorXd rates(3);
    rates << 1.0, 0.5, 0.25;
    cfg.known_gamma_rates = rates;
    return cfg;
}

}  // namespace

TEST_CASE("noiseless cosine signal: the single-frequency statistic is N/4") {
    const long N = 210;
    const FunctionalSample sample = gen(noiseless_cosine(7, N));
    const TestResult r = test_ftr(sample, known_rates_config(7, FreqMode::single));
    CHECK(r.statistic == doctest::Approx(N / 4.0).epsilon(1e-9));
    CHECK(r.reject);
    CHECK(r.p_value < 1e-6);
    // all seasonal frequencies: the cosine adds nothing beyond its own
    const TestResult r2 = test_ftr(sample, known_rates_config(7, FreqMode::all_seasonal));
    CHECK(r2.statistic == doctest::Approx(N / 4.0).epsilon(1e-9));
}

TEST_CASE("period 2 is rejected with differencing advice") {
    const FunctionalSample sample = gen(noiseless_cosine(4, 40));
    TestConfig cfg = known_rates_config(2, FreqMode::single);
    CHECK_THROWS_WITH_AS(test_ftr(sample, cfg), doctest::Contains("difference"),
                         std::invalid_argument);
    MultivariateSeries scores{Eigen::MatrixXd::Zero(40, 2), "u"};
    CHECK_THROWS_AS(test_mev(scores, cfg), std::invalid_argument);
}

TEST_CASE("ANOVA equals the scaled all-frequency trace statistic (odd period)") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss;
    for (int d : {3, 5, 7}) {
        const int n = 12, G = 40;
        Eigen::MatrixXd v(d * n, G);
        for (int t = 0; t < d * n; ++t)
            for (int g = 0; g < G; ++g) v(t, g) = gauss(rng);
        const auto sample = make_sample(v, Eigen::VectorXd::LinSpaced(G, 0.0, 1.0));
        const PeriodSpec period = make_period(d, d * n);

        const double fav = anova_statistic(sample, period);
        const double ftr2 =
            test_ftr(sample, known_rates_config(d, FreqMode::all_seasonal)).statistic;
        CHECK(fav == doctest::Approx(2.0 / d * ftr2).epsilon(1e-9));

        // multivariate: same identity with a nontrivial Sigma weighting
        const int p = 3;
        Eigen::MatrixXd a(p, p);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) a(i, j) = gauss(rng);
        const Eigen::MatrixXd sigma =
            a * a.transpose() + Eigen::MatrixXd::Identity(p, p) * 0.1;
        MultivariateSeries scores{v.leftCols(p), "u"};
        TestConfig cfg;
        cfg.period_d = d;
        cfg.mode = FreqMode::all_seasonal;
        cfg.noise = NoiseModel::iid_gaussian;
        cfg.known_sigma = sigma;
        cfg.mc = {20000, 3};
        const double mtr2 = test_mev(scores, cfg).tr.statistic;
        const double mav = anova_statistic(scores, period, sigma);
        CHECK(mav == doctest::Approx(2.0 / d * mtr2).epsilon(1e-9));
    }
}

TEST_CASE("ANOVA tests refuse even periods, mirror FTR2/MTR2 decisions for odd") {
    DgpSpec spec;
    spec.kind = DgpKind::ma5_plus_means;
    spec.d = 7;
    spec.n_obs = 210;
    spec.seed = 8;
    const FunctionalSample sample = gen(spec);
    TestConfig cfg = known_rates_config(7, FreqMode::all_seasonal);
    const TestResult fav = test_anova(sample, cfg);
    const TestResult ftr2 = test_ftr(sample, cfg);
    CHECK(fav.test_id == "FAV");
    CHECK(fav.statistic == doctest::Approx(2.0 / 7 * ftr2.statistic).epsilon(1e-12));
    CHECK(fav.reject == ftr2.reject);

    cfg.period_d = 6;
    DgpSpec even = spec;
    even.d = 6;
    even.n_obs = 216;
    CHECK_THROWS_AS(test_anova(gen(even), cfg), std::invalid_argument);
}

TEST_CASE("even period: Nyquist component enters statistic and null law") {
    DgpSpec spec;
    spec.kind = DgpKind::ma5_null;
    spec.d = 6;
    spec.n_obs = 216;
    spec.seed = 21;
    const FunctionalSample sample = gen(spec);

    TestConfig cfg;
    cfg.period_d = 6;
    cfg.mode = FreqMode::all_seasonal;
    cfg.noise = NoiseModel::dependent;
    cfg.mc = {20000, 11};
    const TestResult r = test_ftr(sample, cfg);
    CHECK(r.p_value > 0.0);
    CHECK(r.p_value <= 1.0);
    CHECK(r.mc_se > 0);  // Monte Carlo calibrated because of the chi-square part
    CHECK(r.reject == (r.statistic > r.critical_value));

    const MultivariateSeries scores{sample.values.leftCols(3), "u"};
    const MultivariateTestResult m = test_mev(scores, cfg);
    CHECK(m.tr.dof_used == 3 * 5);  // p(d-1)
    CHECK(m.ev.dof_used == 5);      // d-1
}

TEST_CASE("multivariate tests: statistics and laws are coherent under iid null") {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> gauss;
    const int N = 140, p = 2;
    Eigen::MatrixXd v(N, p);
    for (int t = 0; t < N; ++t)
        for (int j = 0; j < p; ++j) v(t, j) = gauss(rng);
    MultivariateSeries scores{v, "u"};
    TestConfig cfg;
    cfg.period_d = 7;
    cfg.mode = FreqMode::single;
    cfg.noise = NoiseModel::iid_gaussian;
    cfg.mc = {20000, 13};
    const MultivariateTestResult r = test_mev(scores, cfg);
    CHECK(r.ev.statistic >= r.tr.statistic / (2 * p));  // max eig >= mean eig
    CHECK(r.ev.statistic <= r.tr.statistic + 1e-12);
    CHECK(r.tr.dof_used == p);
    CHECK(r.ev.dof_used == 2);
    CHECK(r.tr.p_value == doctest::Approx(erlang_tail_prob(p, r.tr.statistic)));
    CHECK(r.ev.mc_se > 0);
}

TEST_CASE("run_suite produces the table layout with per-row recovery") {
    DgpSpec spec;
    spec.kind = DgpKind::ma5_null;
    spec.d = 7;
    spec.n_obs = 210;
    spec.seed = 19;
    const FunctionalSample sample = gen(spec);
    SuiteConfig cfg;
    cfg.period_d = 7;
    cfg.mc = {20000, 2};
    cfg.projection_levels = {1, 2, 200};  // the last level is out of range
    const auto rows = run_suite(sample, cfg);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].label == "FF");
    CHECK(rows[0].ok);
    CHECK(rows[0].results.count("FTR1") == 1);
    CHECK(rows[0].results.count("FTR2") == 1);
    for (int i = 1; i <= 2; ++i) {
        CHECK(rows[i].ok);
        for (const char* id : {"MEV1", "MTR1", "MEV2", "MTR2"}) {
            REQUIRE(rows[i].results.count(id) == 1);
            const TestResult& r = rows[i].results.at(id);
            CHECK(r.p_value >= 0.0);
            CHECK(r.p_value <= 1.0);
        }
        CHECK(rows[i].explained_variance > 0.0);
        CHECK(rows[i].explained_variance <= 1.0);
    }
    CHECK(!rows[3].ok);
    CHECK(!rows[3].error.empty());
}
