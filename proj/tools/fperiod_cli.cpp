// Command-line driver: data ingestion, periodicity test suite, simulation
// studies and local-power curves.  See README.md for file formats.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "fperiod/ingest.hpp"
#include "fperiod/report.hpp"

namespace fs = std::filesystem;
using namespace fperiod;

namespace {

struct CommonOpts {
    int period = 7;
    double alpha = 0.05;
    long bandwidth = 0;  // 0 = default floor(N^{1/3})
    std::string kernel = "bartlett";
    std::vector<int> proj = {1, 2, 3, 5};
    bool sqrt_transform = false;
    std::string bspline;  // "9:4"
    std::uint64_t seed = 42;
    long reps = 1000;
    long mc_reps = 200000;
    std::string out_dir = "fperiod-out";
    bool iid = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--period", o.period, "period d (number of groups)");
    cmd->add_option("--alpha", o.alpha, "test level");
    cmd->add_option("--bandwidth", o.bandwidth, "lag-window bandwidth b_N (0 = N^(1/3))");
    cmd->add_option("--kernel", o.kernel, "lag window: bartlett|flat-top|truncated");
    cmd->add_option("--proj", o.proj, "projection levels p")->delimiter(',');
    cmd->add_option("--seed", o.seed, "rng seed");
    cmd->add_option("--reps", o.reps, "simulation replications");
    cmd->add_option("--mc-reps", o.mc_reps, "Monte Carlo replications for null laws");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_flag("--iid", o.iid, "assume i.i.d. noise (skip spectral estimation)");
    cmd->set_config("--config")->configurable(false);
}

KernelSpec make_kernel(const CommonOpts& o, long N) {
    return KernelSpec::parse(o.kernel, o.bandwidth > 0 ? o.bandwidth : default_bandwidth(N));
}

IngestConfig make_ingest_config(const CommonOpts& o) {
    IngestConfig cfg;
    cfg.period_d = o.period;
    cfg.sqrt_transform = o.sqrt_transform;
    if (!o.bspline.empty()) {
        SmoothingSpec sm;
        const auto colon = o.bspline.find(':');
        if (colon == std::string::npos)
            throw CLI::ValidationError("--bspline", "expected NUM_BASIS:ORDER, e.g. 9:4");
        sm.num_basis = std::stoi(o.bspline.substr(0, colon));
        sm.order = std::stoi(o.bspline.substr(colon + 1));
        cfg.smoothing = sm;
    }
    return cfg;
}

void echo_common(Diagnostics& diag, const CommonOpts& o) {
    diag.put("config.period", static_cast<long>(o.period));
    diag.put("config.alpha", o.alpha);
    diag.put("config.kernel", o.kernel);
    diag.put("config.bandwidth", o.bandwidth);
    diag.put("config.noise", o.iid ? "iid" : "dependent");
    diag.put("config.seed", static_cast<long>(o.seed));
    diag.put("config.mc_reps", o.mc_reps);
    diag.put("config.out", o.out_dir);
}

int run_test(const CommonOpts& o, const std::string& data_path) {
    fs::create_directories(o.out_dir);
    const IngestResult in = ingest_csv(data_path, make_ingest_config(o));
    for (const auto& w : in.report.warnings) std::cerr << "warning: " << w << "\n";

    SuiteConfig cfg;
    cfg.period_d = o.period;
    cfg.noise = o.iid ? NoiseModel::iid_gaussian : NoiseModel::dependent;
    cfg.kernel = make_kernel(o, in.sample.n_curves());
    cfg.kernel_default_bandwidth = o.bandwidth == 0;
    cfg.alpha = o.alpha;
    cfg.mc = {o.mc_reps, o.seed};
    cfg.projection_levels = o.proj;
    const auto rows = run_suite(in.sample, cfg);

    write_pvalue_table(o.out_dir + "/pvalues.csv", rows);

    const PeriodSpec period = make_period(o.period, in.sample.n_curves());
    write_weekday_means(o.out_dir + "/weekday_means.csv", weekday_means(in.sample, period),
                        in.sample.grid);

    Diagnostics diag;
    echo_common(diag, o);
    diag.put("ingest.days_read", in.report.days_read);
    diag.put("ingest.days_kept", in.report.days_kept);
    diag.put("ingest.days_trimmed", in.report.days_trimmed);
    diag.put("ingest.values_imputed", in.report.values_imputed);
    for (const auto& d : in.report.rejected_days) diag.put("ingest.rejected_day", d);
    describe_suite(diag, rows);
    diag.write(o.out_dir + "/diagnostics.txt");

    std::cout << "wrote " << o.out_dir << "/pvalues.csv\n";
    return 0;
}

DgpSpec make_dgp(const CommonOpts& o, const std::string& kind, int signal, int loading,
                 double scale, double rho2, long n_obs) {
    DgpSpec spec;
    spec.d = o.period;
    spec.signal_index = signal;
    spec.loading_index = loading;
    spec.scale = scale;
    spec.rho2 = rho2;
    spec.n_obs = n_obs;
    spec.seed = o.seed;
    if (kind == "model-s") spec.kind = DgpKind::model_s;
    else if (kind == "ma5-null") spec.kind = DgpKind::ma5_null;
    else if (kind == "ma5-plus-means") spec.kind = DgpKind::ma5_plus_means;
    else if (kind == "scenario-a" || kind == "scenario-b" || kind == "scenario-c") {
        spec.kind = DgpKind::local_scenario;
        spec.scenario = kind == "scenario-a" ? Scenario::A
                        : kind == "scenario-b" ? Scenario::B : Scenario::C;
    } else {
        throw CLI::ValidationError("--dgp", "unknown generator '" + kind + "'");
    }
    return spec;
}

std::vector<SimTest> standard_tests(const std::vector<int>& proj) {
    std::vector<SimTest> tests = {{TestFamily::ftr, FreqMode::single, 0},
                                  {TestFamily::ftr, FreqMode::all_seasonal, 0}};
    for (int p : proj) {
        tests.push_back({TestFamily::mev, FreqMode::single, p});
        tests.push_back({TestFamily::mtr, FreqMode::single, p});
        tests.push_back({TestFamily::mev, FreqMode::all_seasonal, p});
        tests.push_back({TestFamily::mtr, FreqMode::all_seasonal, p});
    }
    return tests;
}

int run_simulate(const CommonOpts& o, const std::string& kind, int signal, int loading,
                 double scale, double rho2, const std::vector<long>& n_list) {
    fs::create_directories(o.out_dir);
    const auto tests = standard_tests(o.proj);

    std::ofstream out(o.out_dir + "/simulate.csv");
    out << "test,n,rate,std_error,failures,reps\n";
    Diagnostics diag;
    echo_common(diag, o);
    diag.put("config.dgp", kind);
    diag.put("config.reps", o.reps);
    for (long N : n_list) {
        const DgpSpec spec = make_dgp(o, kind, signal, loading, scale, rho2, N);
        diag.put("dgp.n" + std::to_string(N) + ".mss_sig", mss_sig(spec));
        diag.put("dgp.n" + std::to_string(N) + ".noise_energy", noise_energy(spec));

        SizeStudyConfig cfg;
        cfg.alpha = o.alpha;
        cfg.reps = o.reps;
        cfg.seed = o.seed;
        cfg.noise = o.iid ? NoiseModel::iid_gaussian : NoiseModel::dependent;
        cfg.kernel = make_kernel(o, N);
        cfg.kernel_default_bandwidth = o.bandwidth == 0;
        cfg.mc = {o.mc_reps, o.seed};
        const auto rates = rejection_rates(spec, tests, cfg);
        for (std::size_t i = 0; i < tests.size(); ++i)
            out << tests[i].name() << ',' << N << ',' << format_number(rates[i].rate) << ','
                << format_number(rates[i].std_error) << ',' << rates[i].failures << ',' << o.reps
                << "\n";
    }
    diag.write(o.out_dir + "/diagnostics.txt");
    std::cout << "wrote " << o.out_dir << "/simulate.csv\n";
    return 0;
}

int run_localpower(const CommonOpts& o, int signal, int loading, const std::vector<double>& xs,
                   long n_cycles) {
    fs::create_directories(o.out_dir);
    DgpSpec base;
    base.kind = DgpKind::model_s;
    base.d = o.period;
    base.signal_index = signal;
    base.loading_index = loading;
    base.seed = o.seed;

    std::vector<SimTest> tests = {{TestFamily::ftr, FreqMode::single, 0},
                                  {TestFamily::ftr, FreqMode::all_seasonal, 0}};
    for (int p : o.proj) {
        tests.push_back({TestFamily::mev, FreqMode::single, p});
        tests.push_back({TestFamily::mtr, FreqMode::single, p});
        tests.push_back({TestFamily::mev, FreqMode::all_seasonal, p});
        tests.push_back({TestFamily::mtr, FreqMode::all_seasonal, p});
    }

    LocalPowerConfig cfg;
    cfg.alpha = o.alpha;
    cfg.reps = o.reps;
    cfg.seed = o.seed;
    cfg.n_cycles = n_cycles;
    const PowerCurve curve = local_power_curve(base, tests, xs, cfg);
    write_power_curve(o.out_dir + "/localpower.csv", curve);

    Diagnostics diag;
    echo_common(diag, o);
    diag.put("config.reps", o.reps);
    diag.put("config.n_cycles", n_cycles);
    diag.put("config.signal", static_cast<long>(signal));
    diag.put("config.loading", static_cast<long>(loading));
    diag.write(o.out_dir + "/diagnostics.txt");
    std::cout << "wrote " << o.out_dir << "/localpower.csv\n";
    return 0;
}

int run_ingest_check(const CommonOpts& o, const std::string& data_path) {
    const IngestResult in = ingest_csv(data_path, make_ingest_config(o));
    std::cout << "days_read = " << in.report.days_read << "\n"
              << "days_kept = " << in.report.days_kept << "\n"
              << "days_trimmed = " << in.report.days_trimmed << "\n"
              << "values_imputed = " << in.report.values_imputed << "\n"
              << "grid_size = " << in.sample.n_grid() << "\n";
    for (const auto& d : in.report.rejected_days) std::cout << "rejected_day = " << d << "\n";
    for (const auto& w : in.report.warnings) std::cout << "warning: " << w << "\n";
    std::cout << "ok\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tests for periodic components of known period in functional time series"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string data_path;
    std::string dgp_kind = "ma5-null";
    int signal = 1, loading = 1;
    double scale = 1.0, rho2 = 1.0;
    std::vector<long> n_list = {210, 420};
    std::vector<double> xs = {0, 1, 2, 3, 4, 5, 6, 7, 8};
    long n_cycles = 20;

    auto* t = app.add_subcommand("test", "run the test suite on a data CSV");
    t->add_option("data", data_path, "input CSV (long or wide)")->required();
    t->add_flag("--sqrt", o.sqrt_transform, "square-root transform the values");
    t->add_option("--bspline", o.bspline, "smooth each day: NUM_BASIS:ORDER, e.g. 9:4");
    add_common(t, o);

    auto* s = app.add_subcommand("simulate", "size/power study for a synthetic DGP");
    s->add_option("--dgp", dgp_kind,
                  "model-s|ma5-null|ma5-plus-means|scenario-a|scenario-b|scenario-c");
    s->add_option("--signal", signal, "periodic signal index 1..3 (model-s)");
    s->add_option("--loading", loading, "loading vector index 1..3 (model-s)");
    s->add_option("--scale", scale, "signal scale");
    s->add_option("--rho2", rho2, "scenario signal MSS");
    s->add_option("--n", n_list, "sample sizes")->delimiter(',');
    add_common(s, o);

    auto* l = app.add_subcommand("localpower", "local asymptotic power curves (known covariance)");
    l->add_option("--signal", signal, "periodic signal index 1..3");
    l->add_option("--loading", loading, "loading vector index 1..3");
    l->add_option("--xs", xs, "local alternative grid")->delimiter(',');
    l->add_option("--cycles", n_cycles, "periods per sample (N = d*cycles)");
    add_common(l, o);

    auto* c = app.add_subcommand("ingest-check", "validate a data CSV and report the pipeline");
    c->add_option("data", data_path, "input CSV (long or wide)")->required();
    c->add_flag("--sqrt", o.sqrt_transform, "square-root transform the values");
    c->add_option("--bspline", o.bspline, "smooth each day: NUM_BASIS:ORDER, e.g. 9:4");
    add_common(c, o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (t->parsed()) return run_test(o, data_path);
        if (s->parsed()) return run_simulate(o, dgp_kind, signal, loading, scale, rho2, n_list);
        if (l->parsed()) return run_localpower(o, signal, loading, xs, n_cycles);
        if (c->parsed()) return run_ingest_check(o, data_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
