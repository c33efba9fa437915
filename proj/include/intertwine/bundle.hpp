#pragma once

// Hopf fibration SU(2) → S² and the frame bundle of Sⁿ realized as
// SO(n+1) → Sⁿ, R ↦ R e₀. The structure group SO(n) sits in the lower-right
// block; tangent data is always carried in the body frame R⁻¹ dR.

#include <Eigen/Dense>

#include "intertwine/lie.hpp"

namespace intertwine::bundle {

using lie::AlgebraElement;
using lie::GroupElement;
using lie::VectorElement;

inline constexpr double kSphereTol = 1e-12;

class SpherePoint {
public:
    /// Throws std::invalid_argument unless |coords| = 1 within 1e−12.
    explicit SpherePoint(Eigen::VectorXd coords);

    const Eigen::VectorXd& coords() const { return coords_; }
    Eigen::Index dim() const { return coords_.size() - 1; } ///< sphere dimension n

private:
    Eigen::VectorXd coords_;
};

class FrameBundlePoint {
public:
    /// `r` must be an SO(n+1) element; the base point is its first column.
    explicit FrameBundlePoint(GroupElement r);

    const GroupElement& frame() const { return r_; }
    const SpherePoint& base() const { return base_; }
    int n() const { return r_.tag().dim - 1; }

private:
    GroupElement r_;
    SpherePoint base_;
};

struct TangentDecomposition {
    AlgebraElement horizontal;
    AlgebraElement vertical;
    AlgebraElement original;
    /// Canonical-form coordinates θ (frame bundle only; empty for Hopf).
    VectorElement theta;
};

/// π(z, w) = (Re 2zw̄, Im 2zw̄, |z|² − |w|²) from the first column of u.
SpherePoint hopf_project(const GroupElement& u);
/// Body-frame split: vertical = <V, X1> X1, horizontal = the X2, X3 part.
TangentDecomposition hopf_connection_split(const GroupElement& u, const AlgebraElement& v);

/// H(e) in so(n+1): first column (0, e), first row (0, −eᵀ).
AlgebraElement standard_horizontal(const VectorElement& e, int n);
/// A* for A in so(n): A placed in the lower-right block of so(n+1).
AlgebraElement fundamental_vertical(const AlgebraElement& a);
/// vertical = lower-right block (the connection form ϖ); horizontal = first row/column;
/// θ = first column below the diagonal.
TangentDecomposition frame_connection_split(const AlgebraElement& v);
/// R · exp(h H(e)); the vertical part of the body increment is zero by construction.
FrameBundlePoint horizontal_lift_step(const FrameBundlePoint& r, const VectorElement& e, double h);

namespace kernel {

inline Eigen::Vector3d hopf_project(const Eigen::Matrix2cd& u) {
    const lie::Complex z = u(0, 0), w = u(1, 0);
    const lie::Complex zw = 2.0 * z * std::conj(w);
    return {zw.real(), zw.imag(), std::norm(z) - std::norm(w)};
}

/// d/dt π(u exp(tV)) at t = 0.
inline Eigen::Vector3d hopf_differential(const Eigen::Matrix2cd& u, const Eigen::Matrix2cd& body) {
    const Eigen::Matrix2cd du = u * body;
    const lie::Complex z = u(0, 0), w = u(1, 0), dz = du(0, 0), dw = du(1, 0);
    const lie::Complex d = 2.0 * (dz * std::conj(w) + z * std::conj(dw));
    return {d.real(), d.imag(), 2.0 * (std::conj(z) * dz).real() - 2.0 * (std::conj(w) * dw).real()};
}

template <int N>
Eigen::Matrix<double, N, N> standard_horizontal(const Eigen::Matrix<double, N - 1, 1>& e) {
    Eigen::Matrix<double, N, N> h = Eigen::Matrix<double, N, N>::Zero();
    h.template block<N - 1, 1>(1, 0) = e;
    h.template block<1, N - 1>(0, 1) = -e.transpose();
    return h;
}

template <int N>
Eigen::Matrix<double, N, N> fundamental_vertical(const Eigen::Matrix<double, N - 1, N - 1>& a) {
    Eigen::Matrix<double, N, N> v = Eigen::Matrix<double, N, N>::Zero();
    v.template block<N - 1, N - 1>(1, 1) = a;
    return v;
}

} // namespace kernel
} // namespace intertwine::bundle
