#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "intertwine/stats.hpp"

using namespace intertwine;
using namespace intertwine::stats;

namespace {

ObservableEstimate make(double t, double mean, double se, std::size_t count = 1000) {
    ObservableEstimate e;
    e.name = "P1";
    e.t = t;
    e.mean = mean;
    e.se = se;
    e.count = count;
    return e;
}

// ∫_0^π f(cos φ) sin^{n−1} φ dφ by the midpoint rule
double zonal_integral(const std::function<double(double)>& f, int n) {
    const int m = 40000;
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
        const double phi = (i + 0.5) * std::numbers::pi / m;
        s += f(std::cos(phi)) * std::pow(std::sin(phi), n - 1);
    }
    return s * std::numbers::pi / m;
}

} // namespace

TEST_CASE("pairwise summation") {
    std::vector<double> x(100001);
    long double ref = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = 1.0 / double(i + 1) + (i % 2 ? 1e8 : -1e8);
        ref += static_cast<long double>(x[i]);
    }
    CHECK(std::abs(pairwise_sum(x) - double(ref)) <= 1e-6);
    CHECK(pairwise_sum({}) == 0.0);
}

TEST_CASE("estimates") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const auto e = estimate("a", 0.5, x);
    CHECK(e.mean == doctest::Approx(2.5));
    // sample sd √(5/3), so se = √(5/3)/2
    CHECK(e.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(e.count == 4);
    CHECK(e.t == 0.5);
    const std::vector<double> one{7.0};
    CHECK(estimate("b", 1.0, one).se == 0.0);
    CHECK_THROWS_AS(estimate("c", 1.0, std::span<const double>()), std::invalid_argument);
}

TEST_CASE("harmonic observables") {
    for (int n : {2, 3, 4}) {
        CHECK(gegenbauer(1, 1.0, n) == doctest::Approx(1.0));
        CHECK(gegenbauer(2, 1.0, n) == doctest::Approx(1.0));
        // orthogonal to constants and to each other under the zonal measure
        CHECK(std::abs(zonal_integral([n](double c) { return gegenbauer(1, c, n); }, n)) <= 1e-9);
        CHECK(std::abs(zonal_integral([n](double c) { return gegenbauer(2, c, n); }, n)) <= 1e-9);
        CHECK(std::abs(zonal_integral([n](double c) { return gegenbauer(1, c, n) * gegenbauer(2, c, n); }, n)) <=
              1e-9);
        // Δ f(c) = (1 − c²) f'' − n c f' for zonal f; P_l has eigenvalue −l(l + n − 1)
        for (int l : {1, 2}) {
            for (double c : {-0.7, 0.1, 0.55}) {
                const double d = 1e-4;
                const double f0 = gegenbauer(l, c, n), fp = gegenbauer(l, c + d, n), fm = gegenbauer(l, c - d, n);
                const double lap = (1 - c * c) * (fp - 2 * f0 + fm) / (d * d) - n * c * (fp - fm) / (2 * d);
                CHECK(lap == doctest::Approx(-double(l * (l + n - 1)) * f0).epsilon(1e-6));
            }
        }
    }
    CHECK(gegenbauer(2, 0.0, 2) == doctest::Approx(-0.5));
    CHECK(gegenbauer(2, 0.0, 3) == doctest::Approx(-1.0 / 3.0));
    CHECK_THROWS_AS(gegenbauer(3, 0.0, 2), std::invalid_argument);

    const bundle::SpherePoint n0(Eigen::Vector3d(0, 0, 1)), e1(Eigen::Vector3d(1, 0, 0));
    CHECK(legendre_observable(1, n0, n0, 2) == doctest::Approx(1.0));
    CHECK(std::abs(legendre_observable(1, e1, n0, 2)) <= 1e-15);
    CHECK(legendre_observable(2, e1, n0, 2) == doctest::Approx(-0.5));
    CHECK_THROWS_AS(legendre_observable(3, e1, n0, 2), std::invalid_argument);
    CHECK_THROWS_AS(legendre_observable(1, e1, n0, 3), std::invalid_argument);
}

TEST_CASE("reference decay") {
    CHECK(sphere_decay_reference(0.5, 1, 2, 0.0) == 1.0);
    CHECK(sphere_decay_reference(0.5, 1, 2, 1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(sphere_decay_reference(0.5, 2, 2, 1.0) == doctest::Approx(std::exp(-3.0)));
    CHECK(sphere_decay_reference(1.0, 1, 2, 0.5) == doctest::Approx(sphere_decay_reference(0.5, 1, 2, 1.0)));
    CHECK(ReferenceDecay{1, 3, 0.25}.rate() == doctest::Approx(0.75));
    CHECK_THROWS_AS(sphere_decay_reference(0.0, 1, 2, 1.0), std::invalid_argument);
}

TEST_CASE("rate fit on exact data") {
    std::vector<ObservableEstimate> e;
    for (int i = 1; i <= 5; ++i) e.push_back(make(0.1 * i, 0.7 * std::exp(-3.0 * 0.1 * i), 0.01));
    auto f = rate_fit(e);
    CHECK(f.rate == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(-std::log(0.7)).epsilon(1e-12));
    for (auto& x : e) {
        x.mean *= 5.0;
        x.se *= 5.0;
    }
    CHECK(rate_fit(e).rate == doctest::Approx(3.0).epsilon(1e-12));

    std::vector<ObservableEstimate> flat;
    for (int i = 1; i <= 4; ++i) flat.push_back(make(i, 0.4, 0.0, 1));
    f = rate_fit(flat);
    CHECK(std::abs(f.rate) <= 1e-14);
    CHECK(f.se <= 1e-14);
}

TEST_CASE("rate fit domain checks") {
    std::vector<ObservableEstimate> e;
    for (int i = 1; i <= 3; ++i) e.push_back(make(i, 0.5, 0.01));
    CHECK_THROWS_AS(rate_fit(e), std::invalid_argument);
    e.push_back(make(4, -0.01, 0.01));
    CHECK_THROWS_AS(rate_fit(e), fit_domain_error);
    e.back().mean = 0.1;
    e.back().se = 0.0;
    CHECK_THROWS_AS(rate_fit(e), std::invalid_argument);
}

TEST_CASE("rate fit standard errors are calibrated") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> nd;
    const double lambda = 2.0;
    int covered = 0;
    const int reps = 1000;
    for (int r = 0; r < reps; ++r) {
        std::vector<ObservableEstimate> e;
        for (int i = 1; i <= 5; ++i) {
            const double t = 0.1 * i;
            const double m = std::exp(-lambda * t);
            const double se = 0.01 * (1.0 + t) * m;
            e.push_back(make(t, m + se * nd(rng), se));
        }
        const auto f = rate_fit(e);
        if (std::abs(f.rate - lambda) <= 3.0 * f.se) ++covered;
    }
    CHECK(covered >= 990);
}

TEST_CASE("two-sample z test") {
    const auto a = make(1.0, 0.3, 0.01);
    CHECK(two_sample_z(a, a) == doctest::Approx(1.0));
    const auto b = make(1.0, 0.3 + 10.0 * std::sqrt(2.0) * 0.01, 0.01);
    CHECK(two_sample_z(a, b) < 1e-8);
    CHECK(two_sample_z(a, b) == doctest::Approx(two_sample_z(b, a)));
    // |z| = 1.96 gives p = 0.05
    const auto c = make(1.0, 0.3 + 1.959963984540054 * std::sqrt(2.0) * 0.01, 0.01);
    CHECK(two_sample_z(a, c) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK_THROWS_AS(two_sample_z(a, make(1.0, 0.3, 0.01, 29)), std::invalid_argument);
    const auto z0 = make(1.0, 0.3, 0.0), z1 = make(1.0, 0.4, 0.0);
    CHECK(two_sample_z(z0, z0) == 1.0);
    CHECK(two_sample_z(z0, z1) == 0.0);
}

TEST_CASE("two-sample p-values are uniform under the null") {
    std::mt19937_64 rng(99);
    std::exponential_distribution<double> ed(1.0);
    std::vector<double> p;
    for (int r = 0; r < 2000; ++r) {
        std::vector<double> x(200), y(200);
        for (auto& v : x) v = ed(rng);
        for (auto& v : y) v = ed(rng);
        p.push_back(two_sample_z(estimate("x", 1.0, x), estimate("y", 1.0, y)));
    }
    const auto ks = ks_test(p, [](double u) { return std::clamp(u, 0.0, 1.0); });
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("Levy area second moment") {
    CHECK(levy_area_moment2(0.0) == 0.0);
    CHECK(levy_area_moment2(1.0) == doctest::Approx(0.25));
    CHECK(levy_area_moment2(2.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(levy_area_moment2(-1.0), std::invalid_argument);
}

TEST_CASE("Kolmogorov-Smirnov") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    // P(K > 1.3581) = 0.05 and P(K > 1.6276) = 0.01
    CHECK(kolmogorov_tail(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(kolmogorov_tail(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK(kolmogorov_tail(0.0) == doctest::Approx(1.0));

    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    std::vector<double> g(5000), u(5000);
    for (auto& v : g) v = nd(rng);
    for (auto& v : u) v = ud(rng);
    CHECK(ks_test(g, normal_cdf).p_value > 0.01);
    CHECK(ks_test(u, normal_cdf).p_value < 1e-6);
    CHECK_THROWS_AS(ks_test({}, normal_cdf), std::invalid_argument);
}
