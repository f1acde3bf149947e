#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fperiod/fdata.hpp"
#include "fperiod/ptest.hpp"

namespace fperiod {

// Orthonormal (in the quadrature metric) system of K functions on the grid:
// shifted Legendre polynomials, re-orthonormalized against the discrete
// inner product.  Rows are basis curves.
Eigen::MatrixXd orthonormal_basis(const Eigen::VectorXd& grid, const Eigen::VectorXd& weights,
                                  int count);

enum class DgpKind { model_s, ma5_null, ma5_plus_means, local_scenario };
enum class Scenario { A, B, C };

struct DgpSpec {
    DgpKind kind = DgpKind::model_s;
    int d = 7;
    int signal_index = 1;   // s^(i,d), i in {1,2,3}
    int loading_index = 1;  // psi^(j), j in {1,2,3}
    double scale = 1.0;     // multiplies the periodic signal
    long n_obs = 210;
    int grid_size = 96;
    std::vector<double> noise_eigenvalues;      // default 2^0 .. 2^-8
    std::uint64_t seed = 1;                     // noise stream
    std::uint64_t signal_seed = 73;             // one-off draws (s^(3,d), ma5 means)
    std::optional<std::vector<double>> signal_values;  // explicit s_t override
    Scenario scenario = Scenario::A;            // for local_scenario
    double rho2 = 1.0;                          // MSS_sig of the scenario signal

    std::vector<double> effective_noise_eigenvalues() const;
};

// d-periodic scalar signals s^(i,d), centered to sum zero.
std::vector<double> periodic_signal(int index, int d, std::uint64_t signal_seed);

// psi^(j) loading vectors on 9 components, unit length.
Eigen::VectorXd loading_vector(int index);

// Scenario (A)/(B)/(C) signal curves w_t (d x G), centered, with
// MSS_sig = (1/d) sum_t ||w_t||^2 = rho2.
Eigen::MatrixXd scenario_abc(Scenario kind, int d, double rho2, const Eigen::VectorXd& grid,
                             const Eigen::VectorXd& weights);

FunctionalSample gen(const DgpSpec& spec);

// Mean squared signal (1/d) sum ||w_t||^2 of the periodic component of a spec.
double mss_sig(const DgpSpec& spec);
// E||Z_t||^2 of the noise component.
double noise_energy(const DgpSpec& spec);

// Which statistic a simulation experiment tracks.  projection_p > 0 selects
// the multivariate test on the first p components (estimated basis in
// estimated mode, true basis in known-covariance mode).
struct SimTest {
    TestFamily family = TestFamily::ftr;
    FreqMode mode = FreqMode::single;
    int projection_p = 0;

    std::string name() const;
};

struct RateEstimate {
    double rate = 0;
    double std_error = 0;
    long failures = 0;
};

struct SizeStudyConfig {
    double alpha = 0.05;
    long reps = 1000;
    std::uint64_t seed = 42;
    NoiseModel noise = NoiseModel::dependent;
    KernelSpec kernel;
    bool kernel_default_bandwidth = true;
    McConfig mc{20000, 7};  // inner MC laws; modest since only p-values are needed
};

// Empirical rejection rates, one per test, over seeded replications.
std::vector<RateEstimate> rejection_rates(const DgpSpec& spec, const std::vector<SimTest>& tests,
                                          const SizeStudyConfig& cfg);

struct PowerCurve {
    std::vector<double> xs;
    std::vector<SimTest> tests;
    std::vector<std::vector<double>> rates;  // [test][x]
    long reps = 0;
    double binom_se(std::size_t test, std::size_t xi) const;
};

struct LocalPowerConfig {
    double alpha = 0.05;
    long reps = 5000;
    std::uint64_t seed = 43;
    long n_cycles = 20;  // N = d * n_cycles; the law does not depend on it
    // true: signal amplitude is x/sqrt(N) (local alternatives); false: the
    // signal scale is x itself (fixed-alternative power at the true null law)
    bool local_scaling = true;
};

// Local asymptotic power: DGP (psi, (x/sqrt(N)) s) with the true covariance
// used for all null laws (no estimation).
PowerCurve local_power_curve(const DgpSpec& base, const std::vector<SimTest>& tests,
                             const std::vector<double>& xs, const LocalPowerConfig& cfg);

}  // namespace fperiod
