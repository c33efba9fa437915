#include "intertwine/models/frame.hpp"

#include <cmath>
#include <stdexcept>

namespace intertwine::models {

namespace {

void check_dimension(int n, const char* who) {
    if (n != 2 && n != 3) throw unsupported_configuration(std::string(who) + ": sphere dimension must be 2 or 3");
}

} // namespace

void OUGeodesicConfig::validate() const {
    check_dimension(n, "ou-geodesic");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("ou-geodesic: epsilon must be positive");
    if (e0.size() != n) throw std::invalid_argument("ou-geodesic: e0 must have dimension n");
    if (!(std::abs(e0.norm() - 1.0) <= 1e-12)) throw std::invalid_argument("ou-geodesic: e0 must be a unit vector");
    if (a0.size() > 0) {
        if (a0.rows() != n || a0.cols() != n) throw std::invalid_argument("ou-geodesic: A0 must be n x n");
        (void)lie::AlgebraElement::so(a0); // throws unless skew-symmetric
    }
}

void RotInvConfig::validate() const {
    check_dimension(n, "rotinv");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("rotinv: epsilon must be positive");
    if (e0.size() != n || !e0.allFinite()) throw std::invalid_argument("rotinv: e0 must have dimension n");
    const int m = n * (n - 1) / 2;
    if (sigma.size() > 0 && (sigma.rows() != m || sigma.cols() != m || !sigma.allFinite())) {
        throw std::invalid_argument("rotinv: sigma must be a finite m x m matrix, m = n(n-1)/2");
    }
}

std::vector<Eigen::MatrixXd> embedded_vertical_basis(int n) {
    std::vector<Eigen::MatrixXd> out;
    const auto basis = lie::so_basis(n);
    for (const auto& a : basis.elements()) out.push_back(bundle::fundamental_vertical(a).real());
    return out;
}

namespace {

template <int n>
bundle::FrameBundlePoint ou_step(const OUGeodesicConfig& cfg, const bundle::FrameBundlePoint& r,
                                 std::span<const double> dw, double dt) {
    const OUGeodesic<n> model(cfg);
    if (dw.size() != model.noise_dimension()) throw std::invalid_argument("ou_geodesic_step: wrong increment count");
    typename OUGeodesic<n>::State s{r.frame().real()};
    model.step(s, dw, dt);
    return bundle::FrameBundlePoint(lie::GroupElement::so(s.r));
}

template <int n>
RotInvPoint ri_step(const RotInvConfig& cfg, const RotInvPoint& p, std::span<const double> dw, double dt) {
    const RotInv<n> model(cfg);
    if (dw.size() != model.noise_dimension()) throw std::invalid_argument("rotinv_step: wrong increment count");
    typename RotInv<n>::State s{p.x.frame().real(), p.g.real()};
    model.step(s, dw, dt);
    return {bundle::FrameBundlePoint(lie::GroupElement::so(s.x)), lie::GroupElement::so(s.g)};
}

} // namespace

bundle::FrameBundlePoint ou_geodesic_step(const OUGeodesicConfig& cfg, const bundle::FrameBundlePoint& r,
                                          std::span<const double> dw, double dt) {
    if (r.n() != cfg.n) throw std::invalid_argument("ou_geodesic_step: dimension mismatch");
    return cfg.n == 2 ? ou_step<2>(cfg, r, dw, dt) : ou_step<3>(cfg, r, dw, dt);
}

RotInvPoint rotinv_step(const RotInvConfig& cfg, const RotInvPoint& s, std::span<const double> dw, double dt) {
    if (s.x.n() != cfg.n || s.g.tag().dim != cfg.n) throw std::invalid_argument("rotinv_step: dimension mismatch");
    return cfg.n == 2 ? ri_step<2>(cfg, s, dw, dt) : ri_step<3>(cfg, s, dw, dt);
}

} // namespace intertwine::models
