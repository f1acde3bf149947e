// Timing harness: OpenMP kernels against their serial reference
// implementations (DFT, autocovariance, Monte Carlo mixture sampler).
#include <algorithm>
#include <chrono>
#include <cstdio>

#include "fperiod/estimators.hpp"
#include "fperiod/freq.hpp"
#include "fperiod/nulldist.hpp"
#include "fperiod/sim.hpp"

using namespace fperiod;

namespace {

template <class F>
double time_ms(F&& f, int repeats = 3) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
    DgpSpec spec;
    spec.kind = DgpKind::ma5_null;
    spec.d = 31;
    spec.n_obs = 31L * 64;
    spec.seed = 7;
    const FunctionalSample sample = gen(spec);
    const PeriodSpec period = make_period(spec.d, sample.n_curves());
    const GroupMeans means = weekday_means(sample, period);
    const FrequencySet freqs = seasonal_frequencies(period);

    {
        DftBlock a, b;
        const double s = time_ms([&] { a = ref::dft_serial(sample.values, freqs); });
        const double p = time_ms([&] { b = dft(sample, freqs); });
        report("dft (15 frequencies)", s, p);
    }
    {
        const long h = 5;
        AutocovOperator a, b;
        const double s = time_ms([&] { a = ref::autocov_serial(sample, means, h); });
        const double p = time_ms([&] { b = autocov(sample, means, h); });
        report("autocov (lag 5)", s, p);
    }
    {
        MixtureLaw law;
        HypoExpSpec rates;
        for (int k = 0; k < 9; ++k) rates.rates.push_back(std::pow(2.0, -k));
        law.specs = {rates, rates, rates};
        McConfig mc{200000, 11};
        // both paths sample 200k draws and take the 95% quantile
        const double s = time_ms([&] {
            auto draws = ref::mixture_sample_serial(law, mc);
            std::sort(draws.begin(), draws.end());
            volatile double q = quantile_from_sorted(draws, 0.05).value;
            (void)q;
        });
        const double p = time_ms([&] {
            volatile double q = mixture_quantile(law, 0.05, mc).value;
            (void)q;
        });
        report("mixture MC (200k draws)", s, p);
    }
    return 0;
}
