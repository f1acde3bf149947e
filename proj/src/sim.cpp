#include "fperiod/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fperiod/rng.hpp"

namespace fperiod {

namespace {

Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& grid) {
    const Eigen::Index G = grid.size();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(G);
    for (Eigen::Index g = 0; g + 1 < G; ++g) {
        const double h = 0.5 * (grid[g + 1] - grid[g]);
        w[g] += h;
        w[g + 1] += h;
    }
    return w;
}

Eigen::VectorXd default_grid(int G) {
    return Eigen::VectorXd::LinSpaced(G, 0.0, 1.0);
}

}  // namespace

Eigen::MatrixXd orthonormal_basis(const Eigen::VectorXd& grid, const Eigen::VectorXd& weights,
                                  int count) {
    const Eigen::Index G = grid.size();
    if (count < 1 || count > G)
        throw std::invalid_argument("orthonormal_basis: need 1 <= count <= grid size");
    // Shifted Legendre P_k(2u-1) by the three-term recurrence, then modified
    // Gram-Schmidt (two passes) against the discrete quadrature metric.
    Eigen::MatrixXd b(count, G);
    for (Eigen::Index g = 0; g < G; ++g) {
        const double x = 2.0 * grid[g] - 1.0;
        double pkm1 = 1.0, pk = x;
        b(0, g) = 1.0;
        if (count > 1) b(1, g) = x;
        for (int k = 2; k < count; ++k) {
            const double pkp1 = ((2.0 * k - 1.0) * x * pk - (k - 1.0) * pkm1) / k;
            b(k, g) = pkp1;
            pkm1 = pk;
            pk = pkp1;
        }
    }
    auto dot = [&](const Eigen::RowVectorXd& f, const Eigen::RowVectorXd& h) {
        return (f.array() * h.array() * weights.transpose().array()).sum();
    };
    for (int pass = 0; pass < 2; ++pass) {
        for (int k = 0; k < count; ++k) {
            for (int j = 0; j < k; ++j) b.row(k) -= dot(b.row(k), b.row(j)) * b.row(j);
            const double nrm = std::sqrt(dot(b.row(k), b.row(k)));
            if (nrm < 1e-12)
                throw std::invalid_argument("orthonormal_basis: grid too coarse for count");
            b.row(k) /= nrm;
        }
    }
    return b;
}

std::vector<double> DgpSpec::effective_noise_eigenvalues() const {
    if (!noise_eigenvalues.empty()) return noise_eigenvalues;
    std::vector<double> eig(9);
    for (int k = 0; k < 9; ++k) eig[k] = std::pow(2.0, -k);
    if (kind == DgpKind::ma5_null || kind == DgpKind::ma5_plus_means) {
        // calibrate E||Z||^2 to about 3.1 given the MA weights
        double sa2 = 1.0;
        for (int k = 1; k <= 5; ++k) sa2 += std::exp(-2.0 * k);
        double sum = 0;
        for (double l : eig) sum += l;
        const double c = 3.1 / (sa2 * sum);
        for (double& l : eig) l *= c;
    }
    return eig;
}

std::vector<double> periodic_signal(int index, int d, std::uint64_t signal_seed) {
    std::vector<double> s(d);
    switch (index) {
        case 1:
            for (int t = 1; t <= d; ++t) s[t - 1] = std::cos(2.0 * std::numbers::pi * t / d);
            break;
        case 2: {
            const int step = (2 * d + 2) / 3;  // ceil(2d/3)
            for (int t = 1; t <= d; ++t) s[t - 1] = (t <= step) ? 1.0 : -2.0;
            break;
        }
        case 3: {
            auto rng = block_rng(signal_seed, 0x53u);
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (double& v : s) v = gauss(rng);
            break;
        }
        default:
            throw std::invalid_argument("signal index must be 1, 2 or 3");
    }
    double mean = 0;
    for (double v : s) mean += v;
    mean /= d;
    for (double& v : s) v -= mean;
    return s;
}

Eigen::VectorXd loading_vector(int index) {
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(9);
    switch (index) {
        case 1: psi[0] = 1.0; break;
        case 2:
            for (int k = 0; k < 9; ++k) psi[k] = std::pow(2.0, -0.5 * k);
            psi /= psi.norm();
            break;
        case 3: psi[3] = 1.0; break;
        default:
            throw std::invalid_argument("loading index must be 1, 2 or 3");
    }
    return psi;
}

Eigen::MatrixXd scenario_abc(Scenario kind, int d, double rho2, const Eigen::VectorXd& grid,
                             const Eigen::VectorXd& weights) {
    if (!(rho2 > 0)) throw std::invalid_argument("scenario signal needs rho2 > 0");
    if (d > grid.size())
        throw std::invalid_argument("scenario: period exceeds available orthonormal directions");
    const Eigen::Index G = grid.size();
    Eigen::MatrixXd omega(d, G);
    switch (kind) {
        case Scenario::A: {
            const Eigen::MatrixXd b = orthonormal_basis(grid, weights, d);
            const double norm = std::sqrt(d / (d - 1.0) * rho2);
            for (int t = 0; t < d; ++t) omega.row(t) = norm * b.row(t);
            break;
        }
        case Scenario::B: {
            const Eigen::MatrixXd b = orthonormal_basis(grid, weights, 1);
            for (int t = 1; t <= d; ++t) {
                const double c = std::cos(2.0 * std::numbers::pi * t / d) +
                                 std::sin(2.0 * std::numbers::pi * t / d);
                omega.row(t - 1) = std::sqrt(rho2) * c * b.row(0);
            }
            break;
        }
        case Scenario::C: {
            const Eigen::MatrixXd b = orthonormal_basis(grid, weights, d);
            const double vnorm = std::sqrt(12.0 * d * d / (d * d - 1.0) * rho2);
            Eigen::MatrixXd v = vnorm * b;
            Eigen::RowVectorXd total = v.colwise().sum();
            Eigen::RowVectorXd partial = Eigen::RowVectorXd::Zero(G);
            for (int t = 1; t <= d; ++t) {
                partial += v.row(t - 1);
                omega.row(t - 1) = (partial - (static_cast<double>(t) / d) * total) / std::sqrt(d);
            }
            break;
        }
    }
    const Eigen::RowVectorXd bar = omega.colwise().mean();
    omega.rowwise() -= bar;
    return omega;
}

namespace {

// Gaussian score rows with the given component variances.
Eigen::MatrixXd gaussian_scores(long rows, const std::vector<double>& eig, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd z(rows, eig.size());
    for (long t = 0; t < rows; ++t)
        for (std::size_t k = 0; k < eig.size(); ++k) z(t, k) = std::sqrt(eig[k]) * gauss(rng);
    return z;
}

Eigen::MatrixXd ma5_scores(long N, const std::vector<double>& eig, std::mt19937_64& rng) {
    const int lags = 5;
    const Eigen::MatrixXd eps = gaussian_scores(N + lags, eig, rng);
    Eigen::MatrixXd z = eps.bottomRows(N);
    for (int k = 1; k <= lags; ++k)
        z += std::exp(-static_cast<double>(k)) * eps.middleRows(lags - k, N);
    return z;
}

// Weekday mean score rows for the ma5-plus-means design: drawn once per
// signal seed, centered, and scaled to MSS_sig = 0.1.
Eigen::MatrixXd ma5_mean_scores(int d, const std::vector<double>& eig, std::uint64_t signal_seed) {
    auto rng = block_rng(signal_seed, 0x77u);
    Eigen::MatrixXd w = gaussian_scores(d, eig, rng);
    w.rowwise() -= Eigen::RowVectorXd(w.colwise().mean());
    const double mss = w.array().square().sum() / d;
    w *= std::sqrt(0.1 / mss);
    return w;
}

}  // namespace

FunctionalSample gen(const DgpSpec& spec) {
    if (spec.n_obs % spec.d != 0)
        throw std::invalid_argument("gen: n_obs must be a multiple of d");
    const Eigen::VectorXd grid = default_grid(spec.grid_size);
    const Eigen::VectorXd weights = trapezoid_weights(grid);
    const auto eig = spec.effective_noise_eigenvalues();
    const Eigen::MatrixXd basis =
        orthonormal_basis(grid, weights, static_cast<int>(eig.size()));
    const long N = spec.n_obs;
    auto rng = block_rng(spec.seed, 0);

    Eigen::MatrixXd scores;  // N x n_components, noise plus projected signal
    switch (spec.kind) {
        case DgpKind::model_s: {
            scores = gaussian_scores(N, eig, rng);
            std::vector<double> s = spec.signal_values
                                        ? *spec.signal_values
                                        : periodic_signal(spec.signal_index, spec.d,
                                                          spec.signal_seed);
            if (static_cast<int>(s.size()) != spec.d)
                throw std::invalid_argument("gen: signal_values length must equal d");
            const Eigen::VectorXd psi = loading_vector(spec.loading_index);
            for (long t = 0; t < N; ++t)
                scores.row(t) += spec.scale * s[t % spec.d] * psi.transpose();
            break;
        }
        case DgpKind::ma5_null:
            scores = ma5_scores(N, eig, rng);
            break;
        case DgpKind::ma5_plus_means: {
            scores = ma5_scores(N, eig, rng);
            const Eigen::MatrixXd w = ma5_mean_scores(spec.d, eig, spec.signal_seed);
            for (long t = 0; t < N; ++t) scores.row(t) += spec.scale * w.row(t % spec.d);
            break;
        }
        case DgpKind::local_scenario: {
            const Eigen::MatrixXd w = scenario_abc(spec.scenario, spec.d, spec.rho2, grid, weights);
            Eigen::MatrixXd values = gaussian_scores(N, eig, rng) * basis;
            for (long t = 0; t < N; ++t) values.row(t) += spec.scale * w.row(t % spec.d);
            return make_sample(values, grid);
        }
    }
    return make_sample(scores * basis, grid);
}

double mss_sig(const DgpSpec& spec) {
    switch (spec.kind) {
        case DgpKind::ma5_null:
            return 0.0;
        case DgpKind::ma5_plus_means:
            return 0.1 * spec.scale * spec.scale;
        case DgpKind::local_scenario:
            return spec.rho2 * spec.scale * spec.scale;
        case DgpKind::model_s: {
            const std::vector<double> s =
                spec.signal_values ? *spec.signal_values
                                   : periodic_signal(spec.signal_index, spec.d, spec.signal_seed);
            double ss = 0;
            for (double v : s) ss += v * v;
            return spec.scale * spec.scale * ss / spec.d;  // ||psi|| = 1
        }
    }
    return 0.0;
}

double noise_energy(const DgpSpec& spec) {
    const auto eig = spec.effective_noise_eigenvalues();
    double sum = 0;
    for (double l : eig) sum += l;
    if (spec.kind == DgpKind::ma5_null || spec.kind == DgpKind::ma5_plus_means) {
        double sa2 = 1.0;
        for (int k = 1; k <= 5; ++k) sa2 += std::exp(-2.0 * k);
        sum *= sa2;
    }
    return sum;
}

std::string SimTest::name() const {
    std::string n = family_name(family, mode);
    if (projection_p > 0) n += "(p=" + std::to_string(projection_p) + ")";
    return n;
}

namespace {

bool run_one_test(const FunctionalSample& sample, const SimTest& test, const TestConfig& cfg,
                  const FpcaResult* pc) {
    switch (test.family) {
        case TestFamily::ftr:
            return test_ftr(sample, cfg).reject;
        case TestFamily::fav:
            return test_anova(sample, cfg).reject;
        case TestFamily::mev:
        case TestFamily::mtr:
        case TestFamily::mav: {
            if (test.projection_p < 1 || !pc || test.projection_p > pc->eigencurves.rows())
                throw std::invalid_argument("multivariate sim test needs a projection level");
            const MultivariateSeries scores =
                project(sample, pc->eigencurves.topRows(test.projection_p), "fpca");
            if (test.family == TestFamily::mav) return test_anova(scores, cfg).reject;
            const MultivariateTestResult r = test_mev(scores, cfg);
            return (test.family == TestFamily::mev ? r.ev : r.tr).reject;
        }
    }
    return false;
}

}  // namespace

std::vector<RateEstimate> rejection_rates(const DgpSpec& spec, const std::vector<SimTest>& tests,
                                          const SizeStudyConfig& cfg) {
    if (cfg.reps < 200) throw std::invalid_argument("rejection_rates: need reps >= 200");
    const std::size_t nt = tests.size();
    std::vector<RateEstimate> out(nt);
    if (cfg.alpha >= 1.0) {
        for (auto& r : out) r.rate = 1.0;
        return out;
    }

    const bool needs_fpca = std::any_of(tests.begin(), tests.end(), [](const SimTest& t) {
        return t.projection_p > 0;
    });

    std::vector<std::vector<signed char>> rejects(cfg.reps,
                                                  std::vector<signed char>(nt, -1));
#pragma omp parallel for schedule(dynamic)
    for (long rep = 0; rep < cfg.reps; ++rep) {
        DgpSpec s = spec;
        s.seed = splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(rep)));
        TestConfig tc;
        tc.period_d = spec.d;
        tc.noise = cfg.noise;
        tc.kernel = cfg.kernel;
        tc.kernel_default_bandwidth = cfg.kernel_default_bandwidth;
        tc.alpha = cfg.alpha;
        tc.mc = cfg.mc;
        try {
            const FunctionalSample sample = gen(s);
            FpcaResult pc;
            if (needs_fpca) {
                const PeriodSpec period = make_period(spec.d, sample.n_curves());
                const GroupMeans means = weekday_means(sample, period);
                pc = fpca_from_cov(autocov(sample, means, 0).kernel, sample);
            }
            for (std::size_t j = 0; j < nt; ++j) {
                TestConfig c = tc;
                c.mode = tests[j].mode;
                try {
                    rejects[rep][j] = run_one_test(sample, tests[j], c, &pc) ? 1 : 0;
                } catch (const std::exception&) {
                    rejects[rep][j] = -1;
                }
            }
        } catch (const std::exception&) {
            // generation failure counts against every test
        }
    }

    for (std::size_t j = 0; j < nt; ++j) {
        long hits = 0, ok = 0;
        for (long rep = 0; rep < cfg.reps; ++rep) {
            if (rejects[rep][j] < 0) continue;
            ++ok;
            hits += rejects[rep][j];
        }
        out[j].failures = cfg.reps - ok;
        out[j].rate = ok > 0 ? static_cast<double>(hits) / ok : 0.0;
        out[j].std_error = ok > 0 ? std::sqrt(out[j].rate * (1.0 - out[j].rate) / ok) : 0.0;
    }
    return out;
}

double PowerCurve::binom_se(std::size_t test, std::size_t xi) const {
    const double r = rates[test][xi];
    return std::sqrt(r * (1.0 - r) / static_cast<double>(reps));
}

PowerCurve local_power_curve(const DgpSpec& base, const std::vector<SimTest>& tests,
                             const std::vector<double>& xs, const LocalPowerConfig& cfg) {
    const int d = base.d;
    const PeriodSpec period = make_period(d, static_cast<long>(d) * cfg.n_cycles);
    const long N = period.sample_size();
    const auto eig = base.effective_noise_eigenvalues();
    const Eigen::VectorXd grid = default_grid(base.grid_size);
    const Eigen::VectorXd weights = trapezoid_weights(grid);
    const Eigen::MatrixXd basis = orthonormal_basis(grid, weights, static_cast<int>(eig.size()));
    const FrequencySet freq1 = [&] {
        FrequencySet f = seasonal_frequencies(period);
        f.thetas.resize(1);
        f.indices.resize(1);
        f.has_nyquist = false;
        return f;
    }();
    const FrequencySet freq_all = seasonal_frequencies(period);

    // Null critical values from the true covariance, computed once.
    HypoExpSpec gamma_rates;
    gamma_rates.rates = eig;
    std::vector<double> crit(tests.size());
    std::vector<Eigen::VectorXd> whiten(tests.size());  // diag of Sigma^{-1/2}
    McConfig mc;
    mc.seed = cfg.seed ^ 0xabcdefULL;
    for (std::size_t j = 0; j < tests.size(); ++j) {
        const SimTest& t = tests[j];
        const bool single = t.mode == FreqMode::single;
        const int ell = single ? 1 : period.n_seasonal();
        switch (t.family) {
            case TestFamily::ftr: {
                if (period.even && !single)
                    throw std::invalid_argument("local_power_curve: even periods not supported");
                HypoExpSpec merged;
                for (int k = 0; k < ell; ++k)
                    merged.rates.insert(merged.rates.end(), gamma_rates.rates.begin(),
                                        gamma_rates.rates.end());
                crit[j] = hypoexp_quantile(merged, cfg.alpha);
                break;
            }
            case TestFamily::mev: {
                const int dof = single ? 2 : d - 1;
                crit[j] = wishart_maxeig_quantile(t.projection_p, dof, cfg.alpha, mc).value;
                break;
            }
            case TestFamily::mtr:
                crit[j] = erlang_quantile(static_cast<long>(t.projection_p) * ell, cfg.alpha);
                break;
            default:
                throw std::invalid_argument("local_power_curve: unsupported test family");
        }
        if (t.projection_p > 0) {
            if (t.projection_p > static_cast<int>(eig.size()))
                throw std::invalid_argument("projection level exceeds noise dimension");
            Eigen::VectorXd wdiag(t.projection_p);
            for (int k = 0; k < t.projection_p; ++k) wdiag[k] = 1.0 / std::sqrt(eig[k]);
            whiten[j] = wdiag;
        }
    }

    PowerCurve curve;
    curve.xs = xs;
    curve.tests = tests;
    curve.reps = cfg.reps;
    curve.rates.assign(tests.size(), std::vector<double>(xs.size(), 0.0));

    std::vector<std::vector<std::vector<long>>> hits(
        tests.size(), std::vector<std::vector<long>>(xs.size()));
    for (auto& a : hits)
        for (auto& b : a) b.assign(cfg.reps, 0);

    const int max_p = [&] {
        int m = 0;
        for (const auto& t : tests) m = std::max(m, t.projection_p);
        return m;
    }();

#pragma omp parallel for schedule(dynamic)
    for (long rep = 0; rep < cfg.reps; ++rep) {
        DgpSpec s = base;
        s.seed = splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(rep)));
        s.n_obs = N;
        for (std::size_t xi = 0; xi < xs.size(); ++xi) {
            s.scale = cfg.local_scaling ? xs[xi] / std::sqrt(static_cast<double>(N)) : xs[xi];
            const FunctionalSample sample = gen(s);
            const DftBlock b1 = dft(sample, freq1);
            const DftBlock ball = dft(sample, freq_all);
            // true-basis scores for multivariate tests
            MultivariateSeries scores;
            if (max_p > 0) scores = project(sample, basis.topRows(max_p), "true");
            for (std::size_t j = 0; j < tests.size(); ++j) {
                const SimTest& t = tests[j];
                const bool single = t.mode == FreqMode::single;
                double stat = 0;
                if (t.family == TestFamily::ftr) {
                    const DftBlock& b = single ? b1 : ball;
                    for (std::size_t k = 0; k < b.thetas.size(); ++k)
                        stat += inner_product(sample, b.real_part[k], b.real_part[k]) +
                                inner_product(sample, b.imag_part[k], b.imag_part[k]);
                } else {
                    MultivariateSeries sub;
                    sub.scores = scores.scores.leftCols(t.projection_p);
                    const DftBlock b = dft(sub, single ? freq1 : freq_all);
                    std::vector<Eigen::MatrixXcd> ws(
                        b.thetas.size(),
                        Eigen::MatrixXcd(whiten[j].asDiagonal().toDenseMatrix()
                                             .cast<std::complex<double>>()));
                    const Eigen::MatrixXd m = gram_whitened(b, ws);
                    if (t.family == TestFamily::mev) {
                        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
                        stat = es.eigenvalues().maxCoeff();
                    } else {
                        stat = m.trace();
                    }
                }
                if (stat > crit[j]) hits[j][xi][rep] = 1;
            }
        }
    }

    for (std::size_t j = 0; j < tests.size(); ++j)
        for (std::size_t xi = 0; xi < xs.size(); ++xi) {
            long h = 0;
            for (long rep = 0; rep < cfg.reps; ++rep) h += hits[j][xi][rep];
            curve.rates[j][xi] = static_cast<double>(h) / cfg.reps;
        }
    return curve;
}

}  // namespace fperiod
