#include "intertwine/models/hopf.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "intertwine/stats.hpp"

namespace intertwine::models {

using lie::kernel::circle;
using lie::kernel::expm_su2;
using lie::kernel::reproject_su2;

AlgebraElement HopfConfig::y0() const { return c2 * lie::milnor(2) + c3 * lie::milnor(3); }

double HopfConfig::hypoellipticity_determinant() const {
    const auto basis = lie::milnor_basis();
    const AlgebraElement x1 = lie::milnor(1);
    const AlgebraElement y = y0();
    Eigen::Matrix3d m;
    m.col(0) = basis.coordinates(x1);
    m.col(1) = basis.coordinates(y);
    m.col(2) = basis.coordinates(lie::bracket(y, x1));
    return m.determinant();
}

void HopfConfig::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("hopf: epsilon must be positive");
    if (!std::isfinite(c2) || !std::isfinite(c3)) throw std::invalid_argument("hopf: non-finite Y0");
    if (std::abs(hypoellipticity_determinant()) < 1e-14) {
        throw std::invalid_argument("hopf: span{X1, Y0, [Y0,X1]} is degenerate (Y0 = 0)");
    }
}

HopfModel::HopfModel(HopfConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    y0_ = Eigen::Matrix2cd(cfg_.y0().entries());
    kappa_ = cfg_.noise ? 1.0 / std::sqrt(cfg_.epsilon) : 0.0;
}

HopfState HopfModel::initial_state(const engine::NoiseStream& init) const {
    HopfState s;
    if (cfg_.fast_init == FastInit::haar) {
        double u[1];
        engine::uniforms(init, u);
        s.theta = 2.0 * std::numbers::pi * u[0];
    }
    s.u = cfg_.mode == HopfMode::full ? circle(s.theta) : Eigen::Matrix2cd::Identity();
    return s;
}

void HopfModel::full_step(Eigen::Matrix2cd& u, double theta0, double theta1, double db, double dt) const {
    Eigen::Matrix2cd a = (0.5 * dt) * (y0_ * circle(theta0) + y0_ * circle(theta1));
    const double v = kappa_ * db;
    a(0, 0) += lie::Complex(0.0, v);
    a(1, 1) += lie::Complex(0.0, -v);
    u = (u * expm_su2(a)).eval();
    reproject_su2(u);
}

void hopf_reduced_kernel(Eigen::Matrix2cd& x, const Eigen::Matrix2cd& y0, double theta0, double theta1, double dt) {
    const Eigen::Matrix2cd a = (0.5 * dt) * (circle(theta0) * y0 + circle(theta1) * y0);
    x = (x * expm_su2(a)).eval();
    reproject_su2(x);
}

void HopfModel::reduced_step(Eigen::Matrix2cd& x, double theta0, double theta1, double dt) const {
    hopf_reduced_kernel(x, y0_, theta0, theta1, dt);
}

void HopfModel::step(State& s, std::span<const double> db, double dt) const {
    const double theta1 = s.theta + kappa_ * db[0];
    if (cfg_.mode == HopfMode::full) {
        full_step(s.u, s.theta, theta1, db[0], dt);
    } else {
        reduced_step(s.u, s.theta, theta1, dt);
    }
    s.theta = theta1;
}

void HopfModel::observe(const State& s, const State& s0, std::span<double> out) const {
    // π(x̃ g) = π(x̃), so either mode projects its stored matrix directly.
    const double c = bundle::kernel::hopf_project(s.u).dot(bundle::kernel::hopf_project(s0.u));
    out[0] = stats::gegenbauer(1, c, 2);
    out[1] = stats::gegenbauer(2, c, 2);
    out[2] = std::cos(s.theta);
}

void HopfModel::check_invariants(const State& s) const {
    const double defect = (s.u.adjoint() * s.u - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
    if (!(defect <= lie::kGroupTol) || !(std::abs(s.u.determinant() - 1.0) <= lie::kGroupTol)) {
        throw drift_error("hopf: state left SU(2)");
    }
    if (!std::isfinite(s.theta)) throw numeric_domain_error("hopf: non-finite fast angle");
}

Eigen::Matrix2cd HopfModel::total_space_point(const State& s) const {
    return cfg_.mode == HopfMode::full ? s.u : Eigen::Matrix2cd(s.u * circle(s.theta));
}

std::pair<GroupElement, double> hopf_full_step(const HopfModel& m, const GroupElement& u, double theta, double db,
                                               double dt) {
    if (!(u.tag() == lie::GroupTag::SU2())) throw std::invalid_argument("hopf_full_step: expected SU(2)");
    const double kappa = m.config().noise ? 1.0 / std::sqrt(m.config().epsilon) : 0.0;
    const double theta1 = theta + kappa * db;
    Eigen::Matrix2cd x = u.entries();
    m.full_step(x, theta, theta1, db, dt);
    return {GroupElement(lie::GroupTag::SU2(), x), theta1};
}

GroupElement hopf_reduced_step(const HopfModel& m, const GroupElement& x, double theta0, double theta1, double dt) {
    if (!(x.tag() == lie::GroupTag::SU2())) throw std::invalid_argument("hopf_reduced_step: expected SU(2)");
    Eigen::Matrix2cd y = x.entries();
    m.reduced_step(y, theta0, theta1, dt);
    return GroupElement(lie::GroupTag::SU2(), y);
}

double hopf_discrepancy(const Eigen::Matrix2cd& u, const Eigen::Matrix2cd& x, double theta) {
    return (u - x * circle(theta)).norm();
}

} // namespace intertwine::models
