#pragma once

// Reference laws and estimators: Monte Carlo estimates, spherical-harmonic
// observables and their exact decay, log-linear rate fits, z and KS tests.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "intertwine/bundle.hpp"

namespace intertwine::stats {

struct ObservableEstimate {
    std::string name;
    double t = 0.0;
    double mean = 0.0;
    double se = 0.0; ///< sample sd / √count; 0 when count = 1
    std::size_t count = 0;

    // batch metadata
    double epsilon = 0.0;
    std::uint64_t master_seed = 0;
    std::uint64_t first_stream = 0;
};

/// Deterministic pairwise (cascade) summation; the tree depends only on the length.
double pairwise_sum(std::span<const double> x);

/// Mean and SE of `samples` with pairwise summation in index order.
ObservableEstimate estimate(std::string name, double t, std::span<const double> samples);

/// Normalized Gegenbauer polynomial C_l^α(c)/C_l^α(1), α = (n−1)/2; Legendre for n = 2.
double gegenbauer(int l, double c, int n);
/// P_l(<x, x0>) on Sⁿ; throws std::invalid_argument unless l ∈ {1, 2}.
double legendre_observable(int l, const bundle::SpherePoint& x, const bundle::SpherePoint& x0, int n);

struct ReferenceDecay {
    int l = 1;
    int n = 2;
    double c = 0.5;

    /// exp(−c·l(l+n−1)·t)
    double value(double t) const;
    double rate() const { return c * l * (l + n - 1); }
};

double sphere_decay_reference(double c, int l, int n, double t);

struct RateFit {
    double rate = 0.0;
    double se = 0.0;
    double intercept = 0.0;
};

/// Weighted least squares of −log(mean) against t with σ = se/mean.
/// Throws fit_domain_error on a nonpositive mean, std::invalid_argument on < 4 points.
RateFit rate_fit(std::span<const ObservableEstimate> estimates);

/// Two-sided p-value of the difference in means with SE √(se_a² + se_b²).
/// Throws std::invalid_argument if either count < 30.
double two_sample_z(const ObservableEstimate& a, const ObservableEstimate& b);

/// E[A_t²] = t²/4 for A_t = ½∫(x dy − y dx) of standard planar Brownian motion.
double levy_area_moment2(double t);

double normal_cdf(double x);

struct KSResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// One-sample Kolmogorov–Smirnov test against a continuous cdf.
KSResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);
/// Asymptotic Kolmogorov distribution tail P(K > λ).
double kolmogorov_tail(double lambda);

} // namespace intertwine::stats
