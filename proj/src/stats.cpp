#include "intertwine/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "intertwine/errors.hpp"

namespace intertwine::stats {

double pairwise_sum(std::span<const double> x) {
    if (x.size() <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t half = x.size() / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

ObservableEstimate estimate(std::string name, double t, std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("estimate: no samples");
    ObservableEstimate e;
    e.name = std::move(name);
    e.t = t;
    e.count = samples.size();
    const double n = static_cast<double>(samples.size());
    e.mean = pairwise_sum(samples) / n;
    if (samples.size() > 1) {
        std::vector<double> dev(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double d = samples[i] - e.mean;
            dev[i] = d * d;
        }
        e.se = std::sqrt(pairwise_sum(dev) / (n - 1.0) / n);
    }
    return e;
}

double gegenbauer(int l, double c, int n) {
    const double alpha = 0.5 * (n - 1);
    switch (l) {
    case 0: return 1.0;
    case 1: return c;
    case 2: return (2.0 * (1.0 + alpha) * c * c - 1.0) / (1.0 + 2.0 * alpha);
    default: throw std::invalid_argument("harmonic degree must be 1 or 2");
    }
}

double legendre_observable(int l, const bundle::SpherePoint& x, const bundle::SpherePoint& x0, int n) {
    if (l != 1 && l != 2) throw std::invalid_argument("legendre_observable: l must be 1 or 2");
    if (x.dim() != n || x0.dim() != n) throw std::invalid_argument("legendre_observable: dimension mismatch");
    return gegenbauer(l, x.coords().dot(x0.coords()), n);
}

double ReferenceDecay::value(double t) const { return std::exp(-rate() * t); }

double sphere_decay_reference(double c, int l, int n, double t) {
    if (!(c > 0.0)) throw std::invalid_argument("sphere_decay_reference: c must be positive");
    return ReferenceDecay{l, n, c}.value(t);
}

RateFit rate_fit(std::span<const ObservableEstimate> est) {
    if (est.size() < 4) throw std::invalid_argument("rate_fit: need at least 4 time points");
    bool any_zero = false, any_pos = false;
    for (const auto& e : est) {
        if (!(e.mean > 0.0)) throw fit_domain_error("rate_fit: nonpositive mean at t = " + std::to_string(e.t));
        (e.se > 0.0 ? any_pos : any_zero) = true;
    }
    if (any_zero && any_pos) throw std::invalid_argument("rate_fit: mixed zero and positive standard errors");
    const bool weighted = any_pos;

    std::vector<double> w(est.size()), t(est.size()), y(est.size());
    for (std::size_t i = 0; i < est.size(); ++i) {
        t[i] = est[i].t;
        y[i] = -std::log(est[i].mean);
        const double sigma = est[i].se / est[i].mean;
        w[i] = weighted ? 1.0 / (sigma * sigma) : 1.0;
    }
    double sw = 0, st = 0, sy = 0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        sw += w[i];
        st += w[i] * t[i];
        sy += w[i] * y[i];
    }
    const double tbar = st / sw, ybar = sy / sw;
    double stt = 0, sty = 0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        stt += w[i] * (t[i] - tbar) * (t[i] - tbar);
        sty += w[i] * (t[i] - tbar) * (y[i] - ybar);
    }
    if (!(stt > 0.0)) throw std::invalid_argument("rate_fit: times must not all coincide");
    RateFit fit;
    fit.rate = sty / stt;
    fit.intercept = ybar - fit.rate * tbar;
    if (weighted) {
        fit.se = 1.0 / std::sqrt(stt);
    } else {
        double rss = 0;
        for (std::size_t i = 0; i < est.size(); ++i) {
            const double r = y[i] - fit.intercept - fit.rate * t[i];
            rss += r * r;
        }
        fit.se = std::sqrt(rss / static_cast<double>(est.size() - 2) / stt);
    }
    return fit;
}

double two_sample_z(const ObservableEstimate& a, const ObservableEstimate& b) {
    if (a.count < 30 || b.count < 30) throw std::invalid_argument("two_sample_z: both samples need at least 30 paths");
    const double pooled = std::sqrt(a.se * a.se + b.se * b.se);
    const double diff = std::abs(a.mean - b.mean);
    if (pooled == 0.0) return diff == 0.0 ? 1.0 : 0.0;
    return std::erfc(diff / pooled / std::sqrt(2.0));
}

double levy_area_moment2(double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("levy_area_moment2: t must be nonnegative");
    return 0.25 * t * t;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double kolmogorov_tail(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-300) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

KSResult ks_test(std::vector<double> x, const std::function<double(double)>& cdf) {
    if (x.empty()) throw std::invalid_argument("ks_test: no samples");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    const double sn = std::sqrt(n);
    // Stephens' small-sample correction to the asymptotic series.
    return {d, kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d)};
}

} // namespace intertwine::stats
