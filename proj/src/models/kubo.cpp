#include "intertwine/models/kubo.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "intertwine/bundle.hpp"
#include "intertwine/errors.hpp"
#include "intertwine/lie.hpp"
#include "intertwine/models/averaging.hpp"
#include "intertwine/noise.hpp"
#include "intertwine/stats.hpp"

namespace intertwine::models {

std::string to_string(RateSource s) {
    switch (s) {
    case RateSource::paper: return "paper";
    case RateSource::kubo: return "kubo";
    case RateSource::quadrature: return "quadrature";
    }
    return "?";
}

KuboSpec KuboSpec::hopf(double c2, double c3) {
    KuboSpec s;
    s.kind = Kind::hopf;
    s.c2 = c2;
    s.c3 = c3;
    return s;
}

KuboSpec KuboSpec::ou_geodesic(int n, Eigen::VectorXd e0) {
    KuboSpec s;
    s.kind = Kind::ou_geodesic;
    s.n = n;
    s.e0 = std::move(e0);
    return s;
}

bool KuboSpec::has_closed_form() const {
    return kind == Kind::hopf || a0.size() == 0 || a0.cwiseAbs().maxCoeff() == 0.0;
}

namespace {

void validate(const KuboSpec& s) {
    if (s.kind == KuboSpec::Kind::hopf) {
        if (!(s.c2 * s.c2 + s.c3 * s.c3 > 0.0)) throw std::invalid_argument("kubo: Y0 must be nonzero");
        return;
    }
    if (s.n < 2) throw std::invalid_argument("kubo: n must be at least 2");
    if (s.e0.size() != s.n || !(std::abs(s.e0.norm() - 1.0) <= 1e-12)) {
        throw std::invalid_argument("kubo: e0 must be a unit vector in R^n");
    }
    if (s.a0.size() > 0 && (s.a0.rows() != s.n || s.a0.cols() != s.n)) {
        throw std::invalid_argument("kubo: A0 must be n x n");
    }
}

lie::AlgebraElement hopf_y0(const KuboSpec& s) { return s.c2 * lie::milnor(2) + s.c3 * lie::milnor(3); }

// Velocity decorrelation rate κ on the fast clock: the fast generator ½ Σ A_k²
// acts on linear functions of g as multiplication by ½ casimir_sum = −κ I.
double spectral_gap(const KuboSpec& s) {
    const lie::CMatrix cas = s.kind == KuboSpec::Kind::hopf
                                 ? lie::casimir_sum(std::vector<lie::AlgebraElement>{lie::milnor(1)})
                                 : lie::casimir_sum(lie::so_basis(s.n));
    return -0.5 * cas(0, 0).real();
}

// |base velocity|² at the stationary start.
double speed2(const KuboSpec& s) {
    if (s.kind == KuboSpec::Kind::hopf) {
        return bundle::kernel::hopf_differential(Eigen::Matrix2cd::Identity(), Eigen::Matrix2cd(hopf_y0(s).entries()))
            .squaredNorm();
    }
    return s.e0.squaredNorm();
}

EffectiveRate closed_form(const KuboSpec& s) {
    const double c = speed2(s) / (s.base_dimension() * spectral_gap(s));
    return {c, RateSource::kubo, 0.0, "closed-form"};
}

// Stationary fast path of base velocities v_0 .. v_{L-1}, one column each.
Eigen::MatrixXd velocity_path(const KuboSpec& s, std::uint64_t path, std::size_t len) {
    const double dt = s.mc_step;
    const double sq = std::sqrt(dt);
    if (s.kind == KuboSpec::Kind::hopf) {
        const Eigen::Matrix2cd y0 = hopf_y0(s).entries();
        double u[1];
        engine::uniforms(engine::NoiseStream{s.seed, path, engine::kInitCounter}, u);
        double theta = 2.0 * std::numbers::pi * u[0];
        Eigen::MatrixXd v(3, len);
        double xi[1];
        for (std::size_t i = 0; i < len; ++i) {
            v.col(i) = bundle::kernel::hopf_differential(Eigen::Matrix2cd::Identity(), lie::kernel::circle(theta) * y0);
            engine::standard_normals(engine::NoiseStream{s.seed, path, i}, xi);
            theta += sq * xi[0];
        }
        return v;
    }
    const int n = s.n;
    const auto basis = lie::so_basis(n);
    const std::size_t m = basis.size();
    const Eigen::MatrixXd a0 = s.a0.size() > 0 ? s.a0 : Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd g = lie::haar_sample(lie::GroupTag::SO(n), engine::NoiseStream{s.seed, path, engine::kInitCounter}).real();
    Eigen::MatrixXd v(n, len);
    std::vector<double> xi(m);
    for (std::size_t i = 0; i < len; ++i) {
        v.col(i) = g * s.e0;
        engine::standard_normals(engine::NoiseStream{s.seed, path, i}, xi);
        Eigen::MatrixXd inc = a0 * dt;
        for (std::size_t k = 0; k < m; ++k) inc += (sq * xi[k]) * basis[k].real();
        Eigen::MatrixXd next = g * lie::kernel::expm_taylor(inc);
        lie::kernel::reproject_orthogonal(next);
        g = std::move(next);
    }
    return v;
}

EffectiveRate monte_carlo(const KuboSpec& s) {
    if (!(s.mc_step > 0.0) || !(s.mc_max_lag > s.mc_step) || !(s.mc_window > s.mc_step) || s.mc_paths < 2) {
        throw std::invalid_argument("kubo: invalid Monte Carlo settings");
    }
    const auto lags = static_cast<std::size_t>(std::llround(s.mc_max_lag / s.mc_step));
    const auto window = static_cast<std::size_t>(std::llround(s.mc_window / s.mc_step));
    const std::size_t len = lags + window;
    const std::size_t tail_start = lags - std::max<std::size_t>(1, lags / 20);

    std::vector<double> per_path(s.mc_paths);
    std::vector<double> c0(s.mc_paths), tail(s.mc_paths);
    for (std::size_t p = 0; p < s.mc_paths; ++p) {
        const Eigen::MatrixXd v = velocity_path(s, p, len);
        std::vector<double> corr(lags + 1);
        for (std::size_t k = 0; k <= lags; ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i < window; ++i) acc += v.col(i).dot(v.col(i + k));
            corr[k] = acc / static_cast<double>(window);
        }
        double integral = 0.5 * (corr[0] + corr[lags]);
        for (std::size_t k = 1; k < lags; ++k) integral += corr[k];
        integral *= s.mc_step;
        per_path[p] = integral / s.base_dimension();
        c0[p] = corr[0];
        double t = 0.0;
        for (std::size_t k = tail_start; k <= lags; ++k) t += corr[k];
        tail[p] = t / static_cast<double>(lags - tail_start + 1);
    }
    const double c0m = stats::estimate("C0", 0.0, c0).mean;
    const double tailm = stats::estimate("tail", 0.0, tail).mean;
    if (!(std::abs(tailm) <= 0.01 * c0m)) {
        throw oracle_failure("kubo: velocity correlation does not decay (tail " + std::to_string(tailm) + " vs C(0) " +
                             std::to_string(c0m) + ")");
    }
    const auto est = stats::estimate("c", 0.0, per_path);
    return {est.mean, RateSource::kubo, est.se, "monte-carlo"};
}

} // namespace

EffectiveRate kubo_effective_rate(const KuboSpec& spec) {
    validate(spec);
    switch (spec.method) {
    case KuboSpec::Method::closed_form:
        if (!spec.has_closed_form()) throw std::invalid_argument("kubo: no closed form with a vertical drift");
        return closed_form(spec);
    case KuboSpec::Method::monte_carlo: return monte_carlo(spec);
    case KuboSpec::Method::automatic: break;
    }
    return spec.has_closed_form() ? closed_form(spec) : monte_carlo(spec);
}

EffectiveRate quadrature_effective_rate(const KuboSpec& spec) {
    validate(spec);
    if (!spec.has_closed_form()) {
        throw unsupported_configuration("quadrature: the fast generator with a vertical drift is not a pure Casimir");
    }
    double trace = 0.0, metric = 1.0;
    if (spec.kind == KuboSpec::Kind::hopf) {
        trace = averaged_coefficients(AveragingSpec::hopf(spec.c2, spec.c3)).a.trace();
        // π scales horizontal vectors by a constant factor: |dπ(X2)|² = 4.
        metric = bundle::kernel::hopf_differential(Eigen::Matrix2cd::Identity(),
                                                   Eigen::Matrix2cd(lie::milnor(2).entries()))
                     .squaredNorm();
    } else {
        trace = averaged_coefficients(AveragingSpec::frame(spec.n, spec.e0)).a.trace();
    }
    return {metric * trace / (spec.base_dimension() * spectral_gap(spec)), RateSource::quadrature, 0.0,
            "haar-quadrature"};
}

EffectiveRate paper_effective_rate(const KuboSpec& spec) {
    validate(spec);
    if (spec.kind == KuboSpec::Kind::hopf) {
        // ½|Y0|² Δ on the radius-½ sphere is 2|Y0|² Δ on the unit sphere.
        const double y2 = spec.c2 * spec.c2 + spec.c3 * spec.c3;
        return {4.0 * 0.5 * y2, RateSource::paper, 0.0, "stated"};
    }
    return {4.0 / (spec.n * (spec.n - 1)), RateSource::paper, 0.0, "stated"};
}

double persistent_walk_rate(double speed, double kappa, double epsilon) {
    if (!(speed >= 0.0) || !(kappa > 0.0) || !(epsilon > 0.0)) {
        throw std::invalid_argument("persistent_walk_rate: need speed >= 0, kappa > 0, epsilon > 0");
    }
    const double a = kappa / epsilon;
    const double disc = a * a - 4.0 * speed * speed;
    if (disc < 0.0) throw std::invalid_argument("persistent_walk_rate: oscillatory regime");
    // a − √disc loses digits for small ε; use the conjugate form 4s²/(a + √disc).
    return 4.0 * speed * speed / (a + std::sqrt(disc)) / (2.0 * epsilon);
}

} // namespace intertwine::models
