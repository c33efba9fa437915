#include "intertwine/bundle.hpp"

#include <stdexcept>

namespace intertwine::bundle {

using lie::Algebra;
using lie::AlgebraTag;
using lie::CMatrix;
using lie::Group;
using lie::RMatrix;

SpherePoint::SpherePoint(Eigen::VectorXd coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2 || !(std::abs(coords_.norm() - 1.0) <= kSphereTol)) {
        throw std::invalid_argument("sphere point must have unit norm within 1e-12");
    }
}

namespace {

SpherePoint base_of(const GroupElement& r) {
    if (r.tag().kind != Group::SO || r.tag().dim < 2) {
        throw std::invalid_argument("frame bundle point must be an SO(n+1) element, n >= 1");
    }
    return SpherePoint(r.real().col(0));
}

} // namespace

FrameBundlePoint::FrameBundlePoint(GroupElement r) : r_(std::move(r)), base_(base_of(r_)) {}

SpherePoint hopf_project(const GroupElement& u) {
    if (u.tag().kind != Group::SU2) throw std::invalid_argument("hopf_project: expected an SU(2) element");
    const Eigen::Vector3d x = kernel::hopf_project(Eigen::Matrix2cd(u.entries()));
    return SpherePoint(x / x.norm());
}

TangentDecomposition hopf_connection_split(const GroupElement& u, const AlgebraElement& v) {
    if (u.tag().kind != Group::SU2 || v.tag().kind != Algebra::su2) {
        throw std::invalid_argument("hopf_connection_split: expected SU(2) point and su(2) velocity");
    }
    const AlgebraElement x1 = lie::milnor(1);
    const AlgebraElement vertical = lie::inner(v, x1) * x1;
    // V − <V,X1>X1 leaves the diagonal exactly zero, so the sum reconstructs V.
    const AlgebraElement horizontal = v - vertical;
    return {horizontal, vertical, v, VectorElement()};
}

AlgebraElement standard_horizontal(const VectorElement& e, int n) {
    if (e.dim() != n || n < 1) throw std::invalid_argument("standard_horizontal: dim(e) must equal n");
    RMatrix h = RMatrix::Zero(n + 1, n + 1);
    h.block(1, 0, n, 1) = e.coords;
    h.block(0, 1, 1, n) = -e.coords.transpose();
    return AlgebraElement::so(h);
}

AlgebraElement fundamental_vertical(const AlgebraElement& a) {
    if (a.tag().kind != Algebra::so) throw std::invalid_argument("fundamental_vertical: expected so(n)");
    const int n = a.tag().dim;
    RMatrix v = RMatrix::Zero(n + 1, n + 1);
    v.block(1, 1, n, n) = a.real();
    return AlgebraElement::so(v);
}

TangentDecomposition frame_connection_split(const AlgebraElement& v) {
    if (v.tag().kind != Algebra::so || v.tag().dim < 2) {
        throw std::invalid_argument("frame_connection_split: expected so(n+1)");
    }
    const int n = v.tag().dim - 1;
    const RMatrix m = v.real();
    RMatrix vert = RMatrix::Zero(n + 1, n + 1);
    vert.block(1, 1, n, n) = m.block(1, 1, n, n);
    RMatrix horiz = m;
    horiz.block(1, 1, n, n).setZero();
    return {AlgebraElement::so(horiz), AlgebraElement::so(vert), v, VectorElement(m.block(1, 0, n, 1))};
}

FrameBundlePoint horizontal_lift_step(const FrameBundlePoint& r, const VectorElement& e, double h) {
    if (h < 0.0) throw std::invalid_argument("horizontal_lift_step: h must be nonnegative");
    const GroupElement step = lie::expm(standard_horizontal(e, r.n()) * h);
    return FrameBundlePoint(lie::reproject(r.frame().entries() * step.entries(), r.frame().tag()));
}

} // namespace intertwine::bundle
