#include "intertwine/models/heisenberg.hpp"

#include <cmath>
#include <stdexcept>

#include "intertwine/engine.hpp"

namespace intertwine::models {

void HeisenbergConfig::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("heisenberg: epsilon must be positive");
}

HeisenbergModel::HeisenbergModel(HeisenbergConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    kappa_ = cfg_.vertical ? 1.0 / std::sqrt(cfg_.epsilon) : 0.0;
    drift_ = cfg_.vertical ? 1.0 / cfg_.epsilon : 0.0;
}

void HeisenbergModel::coefficients(const Eigen::Vector3d& p, Eigen::Vector3d& b, Eigen::Matrix3d& s) const {
    const double c = std::cos(p(2)), sn = std::sin(p(2));
    b << 0.0, 0.0, -drift_ * p(2);
    s << c, -sn, 0.0,
         sn, c, 0.0,
         0.5 * (p(0) * sn - p(1) * c), 0.5 * (p(0) * c + p(1) * sn), kappa_;
}

void HeisenbergModel::step(State& s, std::span<const double> dw, double dt) const {
    const Eigen::Vector3d p(s.x, s.y, s.z);
    const Eigen::Vector3d w(dw[0], dw[1], dw[2]);
    auto coeff = [this](const Eigen::Vector3d& q, Eigen::Vector3d& b, Eigen::Matrix3d& m) { coefficients(q, b, m); };
    const Eigen::Vector3d q = engine::heun_step<Eigen::Vector3d, Eigen::Matrix3d>(p, coeff, w, dt);
    // Trapezoid rule for ½∫(x dy − y dx) collapses to ½(x_n y_{n+1} − y_n x_{n+1}).
    s.area += 0.5 * (s.x * q(1) - s.y * q(0));
    s.x = q(0);
    s.y = q(1);
    s.z = q(2);
}

std::vector<std::string> HeisenbergModel::observable_names() const {
    return {"x", "y", "z", "x2", "y2", "xy", "x4", "y4", "z2", "area", "area2"};
}

void HeisenbergModel::observe(const State& s, const State&, std::span<double> out) const {
    const double x2 = s.x * s.x, y2 = s.y * s.y;
    out[0] = s.x;
    out[1] = s.y;
    out[2] = s.z;
    out[3] = x2;
    out[4] = y2;
    out[5] = s.x * s.y;
    out[6] = x2 * x2;
    out[7] = y2 * y2;
    out[8] = s.z * s.z;
    out[9] = s.area;
    out[10] = s.area * s.area;
}

void HeisenbergModel::check_invariants(const State& s) const {
    if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.z) || !std::isfinite(s.area)) {
        throw numeric_domain_error("heisenberg: non-finite state");
    }
}

HeisenbergState heisenberg_step(const HeisenbergModel& m, const HeisenbergState& s, double db1, double db2, double dw,
                                double dt) {
    HeisenbergState out = s;
    const double inc[3] = {db1, db2, dw};
    m.step(out, inc, dt);
    return out;
}

} // namespace intertwine::models
