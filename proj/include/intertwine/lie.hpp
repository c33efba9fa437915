#pragma once

// Small-matrix Lie algebra / group arithmetic for su(2), so(n) and the circle
// u(1) embedded in su(2) as diag(iθ, −iθ).
//
// Inner product is <A, B> = ½ Re tr(A B†) throughout; the Milnor basis
// {X1, X2, X3} of su(2) and {E_ij = e_i e_jᵀ − e_j e_iᵀ, i < j} of so(n) are
// orthonormal for it.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "intertwine/errors.hpp"
#include "intertwine/noise.hpp"

namespace intertwine::lie {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kGroupTol = 1e-9;
inline constexpr double kReprojectTol = 1e-12;
/// Largest first-order distance ½‖G†G − I‖₂ accepted by reproject().
inline constexpr double kMaxDrift = 0.1;

enum class Algebra { su2, so, u1 };
enum class Group { SU2, SO, U1 };

struct AlgebraTag {
    Algebra kind = Algebra::su2;
    int dim = 2; ///< matrix size

    static AlgebraTag su2() { return {Algebra::su2, 2}; }
    static AlgebraTag so(int n) { return {Algebra::so, n}; }
    static AlgebraTag u1() { return {Algebra::u1, 2}; }

    bool operator==(const AlgebraTag&) const = default;
};

struct GroupTag {
    Group kind = Group::SU2;
    int dim = 2;

    static GroupTag SU2() { return {Group::SU2, 2}; }
    static GroupTag SO(int n) { return {Group::SO, n}; }
    static GroupTag U1() { return {Group::U1, 2}; }

    bool operator==(const GroupTag&) const = default;
};

GroupTag group_of(AlgebraTag tag);
std::string to_string(AlgebraTag tag);
std::string to_string(GroupTag tag);

class AlgebraElement {
public:
    /// Throws std::invalid_argument if `entries` violates the algebra invariant.
    AlgebraElement(AlgebraTag tag, CMatrix entries);

    static AlgebraElement zero(AlgebraTag tag);
    static AlgebraElement so(const RMatrix& m);
    static AlgebraElement u1(double theta);

    const CMatrix& entries() const { return entries_; }
    RMatrix real() const { return entries_.real(); }
    AlgebraTag tag() const { return tag_; }

    AlgebraElement operator+(const AlgebraElement& o) const;
    AlgebraElement operator-(const AlgebraElement& o) const;
    AlgebraElement operator-() const;
    AlgebraElement operator*(double s) const;
    friend AlgebraElement operator*(double s, const AlgebraElement& a) { return a * s; }

private:
    AlgebraTag tag_;
    CMatrix entries_;
};

struct VectorElement {
    Eigen::VectorXd coords;
    double norm = 0.0;

    VectorElement() = default;
    explicit VectorElement(Eigen::VectorXd c) : coords(std::move(c)), norm(coords.norm()) {}

    Eigen::Index dim() const { return coords.size(); }
    static VectorElement unit(int n, int i);
};

class GroupElement {
public:
    /// Throws std::invalid_argument unless ‖G†G − I‖∞ ≤ 1e−9 and |det G − 1| ≤ 1e−9.
    GroupElement(GroupTag tag, CMatrix entries);

    static GroupElement identity(GroupTag tag);
    static GroupElement so(const RMatrix& m);

    const CMatrix& entries() const { return entries_; }
    RMatrix real() const { return entries_.real(); }
    GroupTag tag() const { return tag_; }

    GroupElement operator*(const GroupElement& o) const;
    GroupElement inverse() const;

    /// max-norm of G†G − I
    double unitarity_defect() const;

private:
    GroupTag tag_;
    CMatrix entries_;
};

class OrthonormalBasis {
public:
    /// Throws std::invalid_argument unless gram = I within 1e−12.
    explicit OrthonormalBasis(std::vector<AlgebraElement> elements);

    const std::vector<AlgebraElement>& elements() const { return elements_; }
    const RMatrix& gram() const { return gram_; }
    std::size_t size() const { return elements_.size(); }
    const AlgebraElement& operator[](std::size_t i) const { return elements_[i]; }

    /// Coordinates <A, e_k> of A in this basis.
    Eigen::VectorXd coordinates(const AlgebraElement& a) const;
    AlgebraElement combine(const Eigen::VectorXd& coeffs) const;

private:
    std::vector<AlgebraElement> elements_;
    RMatrix gram_;
};

/// Milnor frame: X1 = diag(i, −i), X2 = [[0, −1], [1, 0]], X3 = [[0, i], [i, 0]].
AlgebraElement milnor(int i);
OrthonormalBasis milnor_basis();
/// E_ij = e_i e_jᵀ − e_j e_iᵀ in so(n), 0 ≤ i < j < n.
AlgebraElement so_generator(int n, int i, int j);
OrthonormalBasis so_basis(int n);

AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b);
double inner(const AlgebraElement& a, const AlgebraElement& b);
/// g A g⁻¹
AlgebraElement conjugate(const GroupElement& g, const AlgebraElement& a);

/// Closed forms for su(2), u(1), so(2), so(3); scaling-and-squaring otherwise.
GroupElement expm(const AlgebraElement& a);
/// Always the degree-13 scaling-and-squaring series (cross-validation route).
CMatrix expm_series(const CMatrix& a);

/// Nearest group element (Gram–Schmidt for SO(n), quaternion projection for SU(2)).
/// Throws drift_error if `raw` is farther than 0.1 from the group.
GroupElement reproject(const CMatrix& raw, GroupTag tag);

/// Σ_l A_l² over an orthonormal basis.
CMatrix casimir_sum(const OrthonormalBasis& basis);
/// Validating overload: throws std::invalid_argument if the list is not orthonormal.
CMatrix casimir_sum(std::span<const AlgebraElement> basis);

/// Haar-distributed group element drawn from the (seed, stream, counter) block.
GroupElement haar_sample(GroupTag tag, const engine::NoiseStream& stream);

// ---------------------------------------------------------------------------
// Fixed-size kernels used by the step functions. They operate on plain Eigen
// matrices and skip tag bookkeeping.
namespace kernel {

template <int N>
using SquareMatrix = Eigen::Matrix<double, N, N>;

/// exp(A) for A in su(2): A² = −θ² I, so exp A = cos θ I + (sin θ / θ) A.
inline Eigen::Matrix2cd expm_su2(const Eigen::Matrix2cd& a) {
    const double theta2 = std::norm(a(0, 0)) + std::norm(a(0, 1));
    const double theta = std::sqrt(theta2);
    const double sinc = theta < 1e-8 ? 1.0 - theta2 / 6.0 : std::sin(theta) / theta;
    Eigen::Matrix2cd out = sinc * a;
    const double c = std::cos(theta);
    out(0, 0) += c;
    out(1, 1) += c;
    return out;
}

inline Eigen::Matrix2d expm_so2(const Eigen::Matrix2d& a) {
    const double t = a(1, 0);
    const double c = std::cos(t), s = std::sin(t);
    Eigen::Matrix2d out;
    out << c, -s, s, c;
    return out;
}

/// Rodrigues: exp A = I + (sin θ/θ) A + ((1 − cos θ)/θ²) A², θ² = ½‖A‖_F².
inline Eigen::Matrix3d expm_so3(const Eigen::Matrix3d& a) {
    const double theta2 = a(1, 0) * a(1, 0) + a(2, 0) * a(2, 0) + a(2, 1) * a(2, 1);
    const double theta = std::sqrt(theta2);
    double sinc, cosc;
    if (theta < 1e-8) {
        sinc = 1.0 - theta2 / 6.0;
        cosc = 0.5 - theta2 / 24.0;
    } else {
        const double sh = std::sin(0.5 * theta);
        sinc = std::sin(theta) / theta;
        cosc = 2.0 * sh * sh / theta2;
    }
    return Eigen::Matrix3d::Identity() + sinc * a + cosc * (a * a);
}

/// Degree-13 Taylor polynomial with scaling and squaring (‖A/2^s‖₁ ≤ ½).
template <typename Derived>
typename Derived::PlainObject expm_taylor(const Eigen::MatrixBase<Derived>& a) {
    using Plain = typename Derived::PlainObject;
    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    if (!std::isfinite(norm1)) throw numeric_domain_error("expm: non-finite entries");
    int s = 0;
    if (norm1 > 0.5) s = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
    const Plain b = a / std::ldexp(1.0, s);
    const Plain id = Plain::Identity(a.rows(), a.cols());
    Plain p = id;
    for (int k = 13; k >= 1; --k) p = id + (b * p) / static_cast<double>(k);
    for (int i = 0; i < s; ++i) p = (p * p).eval();
    return p;
}

template <int N>
SquareMatrix<N> expm_so(const SquareMatrix<N>& a) {
    if constexpr (N == 2) {
        return expm_so2(a);
    } else if constexpr (N == 3) {
        return expm_so3(a);
    } else {
        return expm_taylor(a);
    }
}

/// Modified Gram–Schmidt on the columns of a near-orthogonal matrix, in place.
template <typename Derived>
void reproject_orthogonal(Eigen::MatrixBase<Derived>& g) {
    const Eigen::Index n = g.cols();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < j; ++k) {
            const double p = g.col(k).dot(g.col(j));
            if (std::abs(p) > 2.0 * kMaxDrift) throw drift_error("state drifted off SO(n)");
            g.col(j) -= p * g.col(k);
        }
        const double nrm = g.col(j).norm();
        if (!(std::abs(nrm - 1.0) <= 2.0 * kMaxDrift)) {
            if (!std::isfinite(nrm)) throw numeric_domain_error("non-finite group state");
            throw drift_error("state drifted off SO(n)");
        }
        g.col(j) /= nrm;
    }
    if (g.determinant() < 0.0) throw drift_error("reprojection reached det −1");
}

/// SU(2) elements are [[z, −w̄], [w, z̄]]; project onto that real subspace and normalize.
inline void reproject_su2(Eigen::Matrix2cd& u) {
    const Complex z = 0.5 * (u(0, 0) + std::conj(u(1, 1)));
    const Complex w = 0.5 * (u(1, 0) - std::conj(u(0, 1)));
    const double nrm = std::sqrt(std::norm(z) + std::norm(w));
    const double off = std::abs(u(0, 0) - std::conj(u(1, 1))) + std::abs(u(1, 0) + std::conj(u(0, 1)));
    if (!std::isfinite(nrm)) throw numeric_domain_error("non-finite group state");
    if (std::abs(nrm - 1.0) > 2.0 * kMaxDrift || off > 2.0 * kMaxDrift) {
        throw drift_error("state drifted off SU(2)");
    }
    const Complex zn = z / nrm, wn = w / nrm;
    u << zn, -std::conj(wn), wn, std::conj(zn);
}

/// Circle element diag(e^{iθ}, e^{−iθ}) = exp(θ X1).
inline Eigen::Matrix2cd circle(double theta) {
    Eigen::Matrix2cd g = Eigen::Matrix2cd::Zero();
    g(0, 0) = std::polar(1.0, theta);
    g(1, 1) = std::polar(1.0, -theta);
    return g;
}

} // namespace kernel
} // namespace intertwine::lie
