#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fperiod/estimators.hpp"
#include "fperiod/fdata.hpp"
#include "fperiod/freq.hpp"
#include "fperiod/nulldist.hpp"

namespace fperiod {

enum class TestFamily { mev, mtr, ftr, fav, mav };
enum class FreqMode { single, all_seasonal };
enum class NoiseModel { iid_gaussian, dependent };

std::string family_name(TestFamily f, FreqMode m);

struct TestConfig {
    int period_d = 7;
    FreqMode mode = FreqMode::all_seasonal;
    NoiseModel noise = NoiseModel::dependent;
    KernelSpec kernel;                 // used in dependent mode
    bool kernel_default_bandwidth = true;  // b_N = floor(N^{1/3}) unless overridden
    double alpha = 0.05;
    double rate_epsilon = -1.0;        // eigenvalue truncation; <0 = default
    McConfig mc;                       // for MC-calibrated null laws

    // Known-covariance mode: skip estimation and use these (local-power studies).
    std::optional<Eigen::MatrixXd> known_sigma;        // p x p, multivariate
    std::optional<Eigen::VectorXd> known_gamma_rates;  // eigenvalues of Gamma, functional
};

struct TestResult {
    std::string test_id;
    double statistic = 0;
    double critical_value = 0;
    double p_value = 1;
    double alpha = 0.05;
    bool reject = false;
    double mc_se = 0;                  // 0 when the null law is closed form
    std::vector<double> rates_used;    // hypoexponential rates, if applicable
    long dof_used = 0;                 // Wishart/Erlang/chi-square dof, if applicable
    int floored_modes = 0;
};

// Eigenvalue and trace statistics of the same (whitened) DFT Gram matrix.
struct MultivariateTestResult {
    TestResult ev;
    TestResult tr;
};

MultivariateTestResult test_mev(const MultivariateSeries& series, const TestConfig& cfg);

TestResult test_ftr(const FunctionalSample& sample, const TestConfig& cfg);

// Functional ANOVA; statistic (2/d) * T_FTR2 by the algebraic identity, with
// the critical value scaled accordingly.  Odd d only.
TestResult test_anova(const FunctionalSample& sample, const TestConfig& cfg);
TestResult test_anova(const MultivariateSeries& series, const TestConfig& cfg);

// Direct ANOVA statistics from group means (used for the identity checks).
double anova_statistic(const FunctionalSample& sample, const PeriodSpec& period);
double anova_statistic(const MultivariateSeries& series, const PeriodSpec& period,
                       const Eigen::MatrixXd& sigma);

struct SuiteRow {
    std::string label;
    bool ok = false;
    std::string error;
    std::map<std::string, TestResult> results;  // keyed by test id
    double explained_variance = 1.0;            // for projection rows
};

struct SuiteConfig {
    int period_d = 7;
    NoiseModel noise = NoiseModel::dependent;
    KernelSpec kernel;
    bool kernel_default_bandwidth = true;
    double alpha = 0.05;
    McConfig mc;
    std::vector<int> projection_levels = {1, 2, 3, 5};
    std::optional<Eigen::MatrixXd> user_basis;  // overrides fpca eigencurves
};

// One row of fully functional tests plus one row per projection level,
// mirroring the layout of the p-value tables.  Per-row failures are recorded
// without aborting the suite.
std::vector<SuiteRow> run_suite(const FunctionalSample& sample, const SuiteConfig& cfg);

}  // namespace fperiod
