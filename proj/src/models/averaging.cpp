#include "intertwine/models/averaging.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "intertwine/errors.hpp"
#include "intertwine/lie.hpp"
#include "intertwine/noise.hpp"
#include "intertwine/stats.hpp"

namespace intertwine::models {

AveragingSpec AveragingSpec::hopf(double c2, double c3) {
    AveragingSpec s;
    s.kind = Kind::hopf;
    s.c2 = c2;
    s.c3 = c3;
    return s;
}

AveragingSpec AveragingSpec::frame(int n, Eigen::VectorXd e0) {
    AveragingSpec s;
    s.kind = Kind::frame;
    s.n = n;
    s.e0 = std::move(e0);
    return s;
}

namespace {

// Averages of f f^T and f over a sample set, with per-entry standard errors.
struct Moments {
    std::vector<std::vector<double>> outer, first;
    int d;

    explicit Moments(int dim, std::size_t count)
        : outer(dim * dim, std::vector<double>(count)), first(dim, std::vector<double>(count)), d(dim) {}

    void put(std::size_t i, const Eigen::VectorXd& f) {
        for (int j = 0; j < d; ++j) {
            first[j][i] = f(j);
            for (int k = 0; k < d; ++k) outer[j * d + k][i] = f(j) * f(k);
        }
    }

    AveragedCoefficients finish(std::string method, bool with_se) const {
        AveragedCoefficients out{Eigen::MatrixXd(d, d), Eigen::MatrixXd::Zero(d, d), Eigen::VectorXd(d),
                                 Eigen::VectorXd::Zero(d), std::move(method)};
        for (int j = 0; j < d; ++j) {
            const auto e = stats::estimate("b", 0.0, first[j]);
            out.b(j) = e.mean;
            if (with_se) out.b_se(j) = e.se;
            for (int k = 0; k < d; ++k) {
                const auto ejk = stats::estimate("a", 0.0, outer[j * d + k]);
                out.a(j, k) = ejk.mean;
                if (with_se) out.a_se(j, k) = ejk.se;
            }
        }
        return out;
    }
};

AveragedCoefficients hopf_average(const AveragingSpec& spec) {
    if (spec.nodes < 8) throw std::invalid_argument("averaged_coefficients: need at least 8 nodes");
    const lie::AlgebraElement y0 = spec.c2 * lie::milnor(2) + spec.c3 * lie::milnor(3);
    const lie::AlgebraElement x1 = lie::milnor(1), x2 = lie::milnor(2), x3 = lie::milnor(3);
    Moments m(2, spec.nodes);
    for (std::size_t i = 0; i < spec.nodes; ++i) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(spec.nodes);
        const lie::GroupElement g = lie::expm(theta * x1);
        const lie::AlgebraElement v(lie::AlgebraTag::su2(), g.entries() * y0.entries());
        m.put(i, Eigen::Vector2d(lie::inner(x2, v), lie::inner(x3, v)));
    }
    return m.finish("trapezoid", false);
}

AveragedCoefficients frame_average(const AveragingSpec& spec) {
    const int n = spec.n;
    if (n < 2) throw std::invalid_argument("averaged_coefficients: n must be at least 2");
    if (spec.e0.size() != n) throw std::invalid_argument("averaged_coefficients: e0 must have dimension n");
    if (n == 2) {
        Moments m(2, spec.nodes);
        for (std::size_t i = 0; i < spec.nodes; ++i) {
            const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(spec.nodes);
            const lie::GroupElement g = lie::expm(theta * lie::so_generator(2, 0, 1));
            m.put(i, g.real() * spec.e0);
        }
        return m.finish("trapezoid", false);
    }
    if (spec.mc_samples < 2) throw std::invalid_argument("averaged_coefficients: need at least 2 Haar samples");
    Moments m(n, spec.mc_samples);
    for (std::size_t i = 0; i < spec.mc_samples; ++i) {
        const engine::NoiseStream s{spec.seed, i, engine::kInitCounter};
        m.put(i, lie::haar_sample(lie::GroupTag::SO(n), s).real() * spec.e0);
    }
    return m.finish("monte-carlo", true);
}

} // namespace

AveragedCoefficients averaged_coefficients(const AveragingSpec& spec) {
    if (spec.measure != InvariantMeasure::haar) {
        throw unsupported_configuration("averaged_coefficients: only the Haar invariant measure is supported");
    }
    return spec.kind == AveragingSpec::Kind::hopf ? hopf_average(spec) : frame_average(spec);
}

} // namespace intertwine::models
