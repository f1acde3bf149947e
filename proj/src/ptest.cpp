#include "fperiod/ptest.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace fperiod {

std::string family_name(TestFamily f, FreqMode m) {
    const char* idx = (m == FreqMode::single) ? "1" : "2";
    switch (f) {
        case TestFamily::mev: return std::string("MEV") + idx;
        case TestFamily::mtr: return std::string("MTR") + idx;
        case TestFamily::ftr: return std::string("FTR") + idx;
        case TestFamily::fav: return "FAV";
        case TestFamily::mav: return "MAV";
    }
    return "?";
}

namespace {

PeriodSpec checked_period(int d, long N) {
    if (d == 2)
        throw std::invalid_argument(
            "period 2 is not supported: difference the series at lag 1 and "
            "test the differences for zero mean instead");
    return make_period(d, N);
}

FrequencySet test_frequencies(const PeriodSpec& period, FreqMode mode) {
    FrequencySet fs = seasonal_frequencies(period);
    if (mode == FreqMode::single) {
        fs.thetas.resize(1);
        fs.indices.resize(1);
        fs.has_nyquist = false;
    }
    return fs;
}

KernelSpec effective_kernel(const TestConfig& cfg, long N) {
    KernelSpec k = cfg.kernel;
    if (cfg.kernel_default_bandwidth) k.bandwidth = default_bandwidth(N);
    return k;
}

// Cache of sorted Wishart max-eigenvalue samples; quantiles for a given
// (p, dof) are reused across suite rows and simulation replications.
const std::vector<double>& cached_wishart(int p, int dof, const McConfig& mc) {
    struct Key {
        int p, dof;
        std::uint64_t seed;
        long reps;
        auto operator<=>(const Key&) const = default;
    };
    static std::map<Key, std::vector<double>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto [it, inserted] = cache.try_emplace(Key{p, dof, mc.seed, mc.replications});
    if (inserted) it->second = wishart_maxeig_sample(p, dof, mc);
    return it->second;
}

Eigen::MatrixXd group_means_of_scores(const Eigen::MatrixXd& scores, const PeriodSpec& period) {
    Eigen::MatrixXd gm = Eigen::MatrixXd::Zero(period.d, scores.cols());
    for (Eigen::Index t = 0; t < scores.rows(); ++t) gm.row(t % period.d) += scores.row(t);
    gm /= static_cast<double>(period.n);
    gm.rowwise() -= scores.colwise().mean();
    return gm;
}

}  // namespace

MultivariateTestResult test_mev(const MultivariateSeries& series, const TestConfig& cfg) {
    const long N = series.n_obs();
    const int p = static_cast<int>(series.dim());
    const PeriodSpec period = checked_period(cfg.period_d, N);
    const FrequencySet freqs = test_frequencies(period, cfg.mode);
    const DftBlock block = dft(series, freqs);
    const Eigen::MatrixXd score_means = group_means_of_scores(series.scores, period);

    Eigen::MatrixXd m;  // the (whitened) Gram matrix
    int floored = 0;
    if (cfg.noise == NoiseModel::iid_gaussian) {
        Eigen::MatrixXd sigma;
        if (cfg.known_sigma) {
            sigma = *cfg.known_sigma;
        } else {
            Eigen::MatrixXd resid = series.scores.rowwise() - series.scores.colwise().mean();
            for (Eigen::Index t = 0; t < N; ++t) resid.row(t) -= score_means.row(t % period.d);
            sigma = resid.transpose() * resid / static_cast<double>(N);
        }
        const InvSqrtResult w = inv_sqrt(sigma.cast<std::complex<double>>());
        floored = w.floored_modes;
        std::vector<Eigen::MatrixXcd> ws(freqs.size(), w.matrix);
        m = gram_whitened(block, ws);
    } else {
        const KernelSpec kernel = effective_kernel(cfg, N);
        const auto spectra = projected_spectral_multi(series, score_means, freqs.thetas, kernel);
        std::vector<Eigen::MatrixXcd> ws;
        for (const auto& sd : spectra) {
            const InvSqrtResult w = inv_sqrt(sd.matrix);
            floored += w.floored_modes;
            ws.push_back(w.matrix);
        }
        m = gram_whitened(block, ws);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const double ev_stat = es.eigenvalues().maxCoeff();
    const double tr_stat = m.trace();

    MultivariateTestResult out;
    const bool single = cfg.mode == FreqMode::single;

    {
        TestResult& r = out.ev;
        r.test_id = family_name(TestFamily::mev, cfg.mode);
        r.statistic = ev_stat;
        r.alpha = cfg.alpha;
        r.dof_used = single ? 2 : period.d - 1;
        const auto& sample = cached_wishart(p, static_cast<int>(r.dof_used), cfg.mc);
        const McQuantile q = quantile_from_sorted(sample, cfg.alpha);
        r.critical_value = q.value;
        r.mc_se = q.std_error;
        r.p_value = tail_prob_from_sorted(sample, ev_stat);
        r.floored_modes = floored;
        r.reject = r.statistic > r.critical_value;
    }
    {
        TestResult& r = out.tr;
        r.test_id = family_name(TestFamily::mtr, cfg.mode);
        r.statistic = tr_stat;
        r.alpha = cfg.alpha;
        r.floored_modes = floored;
        if (single) {
            r.dof_used = p;
            r.critical_value = erlang_quantile(p, cfg.alpha);
            r.p_value = erlang_tail_prob(p, tr_stat);
        } else if (!period.even) {
            r.dof_used = static_cast<long>(p) * period.n_seasonal();
            r.critical_value = erlang_quantile(r.dof_used, cfg.alpha);
            r.p_value = erlang_tail_prob(r.dof_used, tr_stat);
        } else {
            // chi^2_{p(d-1)}/2 = Gamma(p(d-1)/2, 1)
            r.dof_used = static_cast<long>(p) * (period.d - 1);
            r.critical_value = gamma_quantile(r.dof_used / 2.0, cfg.alpha);
            r.p_value = gamma_tail_prob(r.dof_used / 2.0, tr_stat);
        }
        r.reject = r.statistic > r.critical_value;
    }
    return out;
}

namespace {

// Null-law rate lists for the functional tests, one per interior frequency,
// plus the Nyquist rate list for even d.
struct FtrNull {
    std::vector<HypoExpSpec> specs;
    std::vector<double> nyquist_rates;
};

FtrNull ftr_null_rates(const FunctionalSample& sample, const GroupMeans& means,
                       const PeriodSpec& period, const FrequencySet& freqs,
                       const TestConfig& cfg) {
    FtrNull out;
    const std::size_t n_interior = freqs.size() - (freqs.has_nyquist ? 1 : 0);
    if (cfg.known_gamma_rates) {
        HypoExpSpec spec;
        for (Eigen::Index j = 0; j < cfg.known_gamma_rates->size(); ++j)
            spec.rates.push_back((*cfg.known_gamma_rates)[j]);
        out.specs.assign(n_interior, spec);
        if (freqs.has_nyquist) out.nyquist_rates = spec.rates;
        return out;
    }
    if (cfg.noise == NoiseModel::iid_gaussian) {
        const AutocovOperator c0 = autocov(sample, means, 0);
        const FpcaResult pc = fpca_from_cov(c0.kernel, sample);
        const HypoExpSpec spec =
            truncate_rates(pc.eigenvalues, pc.eigenvalues.sum(), cfg.rate_epsilon);
        out.specs.assign(n_interior, spec);
        if (freqs.has_nyquist) out.nyquist_rates = spec.rates;
    } else {
        const KernelSpec kernel = effective_kernel(cfg, sample.n_curves());
        const auto spectra = spectral_density_multi(sample, means, freqs.thetas, kernel);
        for (std::size_t k = 0; k < n_interior; ++k)
            out.specs.push_back(truncate_rates(spectra[k].eigenvalues,
                                               spectra[k].eigenvalues.sum(), cfg.rate_epsilon));
        if (freqs.has_nyquist) {
            const auto& ny = spectra.back();
            const HypoExpSpec s =
                truncate_rates(ny.eigenvalues, ny.eigenvalues.sum(), cfg.rate_epsilon);
            out.nyquist_rates = s.rates;
        }
    }
    return out;
}

}  // namespace

TestResult test_ftr(const FunctionalSample& sample, const TestConfig& cfg) {
    const long N = sample.n_curves();
    const PeriodSpec period = checked_period(cfg.period_d, N);
    const FrequencySet freqs = test_frequencies(period, cfg.mode);
    const DftBlock block = dft(sample, freqs);

    double stat = 0;
    const std::size_t n_interior = freqs.size() - (freqs.has_nyquist ? 1 : 0);
    for (std::size_t k = 0; k < n_interior; ++k)
        stat += inner_product(sample, block.real_part[k], block.real_part[k]) +
                inner_product(sample, block.imag_part[k], block.imag_part[k]);
    if (freqs.has_nyquist) {
        const auto& rny = block.real_part[n_interior];
        stat += inner_product(sample, rny, rny);
    }

    const GroupMeans means = weekday_means(sample, period);
    const FtrNull null = ftr_null_rates(sample, means, period, freqs, cfg);
    if (null.specs.empty() || null.specs[0].rates.empty())
        throw std::runtime_error("test_ftr: empty rate list after truncation");

    TestResult r;
    r.test_id = family_name(TestFamily::ftr, cfg.mode);
    r.statistic = stat;
    r.alpha = cfg.alpha;
    r.rates_used = null.specs[0].rates;
    if (!freqs.has_nyquist) {
        // sum of independent hypoexponentials: one concatenated rate list
        MixtureLaw law;
        law.specs = null.specs;
        r.p_value = 1.0 - mixture_cdf(law, stat);
        HypoExpSpec merged;
        for (const auto& s : law.specs)
            merged.rates.insert(merged.rates.end(), s.rates.begin(), s.rates.end());
        r.critical_value = hypoexp_quantile(merged, cfg.alpha);
    } else {
        MixtureLaw law = even_d_theta_law(null.nyquist_rates);
        law.specs = null.specs;
        r.p_value = mixture_tail_prob(law, stat, cfg.mc);
        const McQuantile q = mixture_quantile(law, cfg.alpha, cfg.mc);
        r.critical_value = q.value;
        r.mc_se = q.std_error;
    }
    r.reject = r.statistic > r.critical_value;
    return r;
}

double anova_statistic(const FunctionalSample& sample, const PeriodSpec& period) {
    const GroupMeans gm = weekday_means(sample, period);
    double s = 0;
    for (int k = 0; k < period.d; ++k) {
        const Eigen::VectorXd w = gm.wk_means.row(k).transpose();
        s += inner_product(sample, w, w);
    }
    return s * static_cast<double>(period.n) / period.d;
}

double anova_statistic(const MultivariateSeries& series, const PeriodSpec& period,
                       const Eigen::MatrixXd& sigma) {
    const Eigen::MatrixXd gm = group_means_of_scores(series.scores, period);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(sigma);
    double s = 0;
    for (int k = 0; k < period.d; ++k) {
        const Eigen::VectorXd w = gm.row(k).transpose();
        s += w.dot(ldlt.solve(w));
    }
    return s * static_cast<double>(period.n) / period.d;
}

namespace {

TestResult scale_to_anova(TestResult tr, int d, const char* id) {
    TestResult r = std::move(tr);
    r.test_id = id;
    r.statistic *= 2.0 / d;
    r.critical_value *= 2.0 / d;
    r.mc_se *= 2.0 / d;
    r.reject = r.statistic > r.critical_value;  // unchanged by common scaling
    return r;
}

void require_odd(int d, const char* what) {
    if (d % 2 == 0)
        throw std::invalid_argument(std::string(what) +
                                    ": even periods are not supported; use the "
                                    "all-frequency trace test instead");
}

}  // namespace

TestResult test_anova(const FunctionalSample& sample, const TestConfig& cfg) {
    require_odd(cfg.period_d, "FAV");
    TestConfig c = cfg;
    c.mode = FreqMode::all_seasonal;
    return scale_to_anova(test_ftr(sample, c), cfg.period_d, "FAV");
}

TestResult test_anova(const MultivariateSeries& series, const TestConfig& cfg) {
    require_odd(cfg.period_d, "MAV");
    TestConfig c = cfg;
    c.mode = FreqMode::all_seasonal;
    return scale_to_anova(test_mev(series, c).tr, cfg.period_d, "MAV");
}

std::vector<SuiteRow> run_suite(const FunctionalSample& sample, const SuiteConfig& cfg) {
    std::vector<SuiteRow> rows;

    TestConfig base;
    base.period_d = cfg.period_d;
    base.noise = cfg.noise;
    base.kernel = cfg.kernel;
    base.kernel_default_bandwidth = cfg.kernel_default_bandwidth;
    base.alpha = cfg.alpha;
    base.mc = cfg.mc;

    {
        SuiteRow row;
        row.label = "FF";
        try {
            TestConfig c1 = base;
            c1.mode = FreqMode::single;
            row.results["FTR1"] = test_ftr(sample, c1);
            TestConfig c2 = base;
            c2.mode = FreqMode::all_seasonal;
            row.results["FTR2"] = test_ftr(sample, c2);
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }

    if (cfg.projection_levels.empty()) return rows;

    // Shared projection basis: principal components of the residual
    // covariance (consistent under both hypotheses), or a user basis.
    FpcaResult pc;
    Eigen::MatrixXd basis;
    std::string basis_err;
    try {
        if (cfg.user_basis) {
            basis = *cfg.user_basis;
        } else {
            const PeriodSpec period = checked_period(cfg.period_d, sample.n_curves());
            const GroupMeans means = weekday_means(sample, period);
            pc = fpca_from_cov(autocov(sample, means, 0).kernel, sample);
            basis = pc.eigencurves;
        }
    } catch (const std::exception& e) {
        basis_err = e.what();
    }

    for (int p : cfg.projection_levels) {
        SuiteRow row;
        row.label = "p=" + std::to_string(p);
        if (!basis_err.empty()) {
            row.error = basis_err;
            rows.push_back(std::move(row));
            continue;
        }
        try {
            if (p < 1 || p > basis.rows())
                throw std::invalid_argument("projection level out of range");
            const MultivariateSeries scores =
                project(sample, basis.topRows(p), cfg.user_basis ? "user" : "fpca");
            if (!cfg.user_basis && pc.explained_fraction.size() >= p)
                row.explained_variance = pc.explained_fraction[p - 1];
            TestConfig c1 = base;
            c1.mode = FreqMode::single;
            const MultivariateTestResult r1 = test_mev(scores, c1);
            row.results["MEV1"] = r1.ev;
            row.results["MTR1"] = r1.tr;
            TestConfig c2 = base;
            c2.mode = FreqMode::all_seasonal;
            const MultivariateTestResult r2 = test_mev(scores, c2);
            row.results["MEV2"] = r2.ev;
            row.results["MTR2"] = r2.tr;
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace fperiod
