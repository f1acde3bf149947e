#pragma once

#include <cstdint>
#include <vector>

#include "fperiod/estimators.hpp"

namespace fperiod {

struct McConfig {
    long replications = 200000;
    std::uint64_t seed = 20240901;

    void validate_for_quantiles() const;
};

// Law of sum_k Xi_k (+ Theta), with independent Xi_k ~ HExp(specs[k]) and,
// when chi_rates is non-empty, Theta = (1/2) sum_l chi_rates[l] * chi2_1.
struct MixtureLaw {
    std::vector<HypoExpSpec> specs;
    std::vector<double> chi_rates;
};

struct McQuantile {
    double value = 0;
    double std_error = 0;
};

// P(HExp(rates) <= x).  Distinct rates use the closed form
// 1 - sum_i c_i exp(-x/l_i); repeated or near-equal rates fall back to the
// phase-type representation evaluated with a matrix exponential.
double hypoexp_cdf(const HypoExpSpec& spec, double x);

// Quantile of HExp(rates) by monotone root-finding on hypoexp_cdf.
double hypoexp_quantile(const HypoExpSpec& spec, double alpha);

// CDF of a sum of independent hypoexponentials: the rate lists concatenate
// into a single hypoexponential.  Only valid when chi_rates is empty.
double mixture_cdf(const MixtureLaw& law, double x);

// Seeded Monte Carlo (1-alpha)-quantile of the mixture, with its s.e.
McQuantile mixture_quantile(const MixtureLaw& law, double alpha, const McConfig& mc);

// Empirical tail probability P(X > x) with add-one smoothing (r+1)/(R+1).
double mixture_tail_prob(const MixtureLaw& law, double x, const McConfig& mc);

// Exact Gamma(k,1) quantile at level 1-alpha.
double erlang_quantile(long shape, double alpha);
double erlang_tail_prob(long shape, double x);

// Gamma(shape,1) with real shape; covers the chi2_k/2 laws of the even-d tests.
double gamma_quantile(double shape, double alpha);
double gamma_tail_prob(double shape, double x);

// Sorted Monte Carlo sample of lambda_max(W_p(dof))/2; reusable for both
// quantiles and tail probabilities of the eigenvalue tests.
std::vector<double> wishart_maxeig_sample(int p, int dof, const McConfig& mc);
McQuantile quantile_from_sorted(const std::vector<double>& sorted, double alpha);
double tail_prob_from_sorted(const std::vector<double>& sorted, double x);
McQuantile wishart_maxeig_quantile(int p, int dof, double alpha, const McConfig& mc);

// Attach the even-d Nyquist component Theta = (1/2) sum_l rates[l] chi2_1.
MixtureLaw even_d_theta_law(const std::vector<double>& rates);

namespace ref {
// Serial single-stream sampler, reference for the block-parallel one.
std::vector<double> mixture_sample_serial(const MixtureLaw& law, const McConfig& mc);
}

}  // namespace fperiod
