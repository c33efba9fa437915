#include "intertwine/lie.hpp"

#include <Eigen/QR>

#include <numbers>
#include <stdexcept>

namespace intertwine::lie {

namespace {

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool all_finite(const CMatrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const Complex z = m.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

void require_same(AlgebraTag a, AlgebraTag b, const char* op) {
    if (!(a == b)) {
        throw std::invalid_argument(std::string(op) + ": mismatched algebra tags " + to_string(a) + " and " +
                                    to_string(b));
    }
}

void validate_algebra(AlgebraTag tag, const CMatrix& m) {
    if (m.rows() != tag.dim || m.cols() != tag.dim) {
        throw std::invalid_argument("algebra element has wrong shape for " + to_string(tag));
    }
    if (!all_finite(m)) throw std::invalid_argument("algebra element has non-finite entries");
    const double tol = kAlgebraTol * std::max(1.0, max_abs(m));
    switch (tag.kind) {
    case Algebra::su2:
        if (max_abs(m + m.adjoint()) > tol || std::abs(m.trace()) > tol) {
            throw std::invalid_argument("matrix is not in su(2)");
        }
        break;
    case Algebra::so:
        if (max_abs(m.imag().cast<Complex>()) > tol || max_abs(m + m.transpose()) > tol) {
            throw std::invalid_argument("matrix is not in so(" + std::to_string(tag.dim) + ")");
        }
        break;
    case Algebra::u1:
        if (std::abs(m(0, 1)) > tol || std::abs(m(1, 0)) > tol || std::abs(m(0, 0).real()) > tol ||
            std::abs(m(0, 0) + m(1, 1)) > tol) {
            throw std::invalid_argument("matrix is not of the form diag(iθ, −iθ)");
        }
        break;
    }
}

void validate_group(GroupTag tag, const CMatrix& m) {
    if (m.rows() != tag.dim || m.cols() != tag.dim) {
        throw std::invalid_argument("group element has wrong shape for " + to_string(tag));
    }
    if (!all_finite(m)) throw std::invalid_argument("group element has non-finite entries");
    const CMatrix id = CMatrix::Identity(tag.dim, tag.dim);
    if (max_abs(m.adjoint() * m - id) > kGroupTol) {
        throw std::invalid_argument("matrix is not unitary within 1e-9");
    }
    if (std::abs(m.determinant() - Complex(1.0)) > kGroupTol) {
        throw std::invalid_argument("matrix determinant differs from 1 by more than 1e-9");
    }
    if (tag.kind == Group::SO && m.imag().cwiseAbs().maxCoeff() > kGroupTol) {
        throw std::invalid_argument("SO(n) element has imaginary entries");
    }
    if (tag.kind == Group::U1 && (std::abs(m(0, 1)) > kGroupTol || std::abs(m(1, 0)) > kGroupTol)) {
        throw std::invalid_argument("U(1) element is not diagonal");
    }
}

} // namespace

GroupTag group_of(AlgebraTag tag) {
    switch (tag.kind) {
    case Algebra::su2: return GroupTag::SU2();
    case Algebra::so: return GroupTag::SO(tag.dim);
    case Algebra::u1: return GroupTag::U1();
    }
    return GroupTag::SU2();
}

std::string to_string(AlgebraTag tag) {
    switch (tag.kind) {
    case Algebra::su2: return "su(2)";
    case Algebra::so: return "so(" + std::to_string(tag.dim) + ")";
    case Algebra::u1: return "u(1)";
    }
    return "?";
}

std::string to_string(GroupTag tag) {
    switch (tag.kind) {
    case Group::SU2: return "SU(2)";
    case Group::SO: return "SO(" + std::to_string(tag.dim) + ")";
    case Group::U1: return "U(1)";
    }
    return "?";
}

// --- AlgebraElement --------------------------------------------------------

AlgebraElement::AlgebraElement(AlgebraTag tag, CMatrix entries) : tag_(tag), entries_(std::move(entries)) {
    validate_algebra(tag_, entries_);
}

AlgebraElement AlgebraElement::zero(AlgebraTag tag) {
    return AlgebraElement(tag, CMatrix::Zero(tag.dim, tag.dim));
}

AlgebraElement AlgebraElement::so(const RMatrix& m) {
    return AlgebraElement(AlgebraTag::so(static_cast<int>(m.rows())), m.cast<Complex>());
}

AlgebraElement AlgebraElement::u1(double theta) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = Complex(0.0, theta);
    m(1, 1) = Complex(0.0, -theta);
    return AlgebraElement(AlgebraTag::u1(), m);
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
    require_same(tag_, o.tag_, "operator+");
    return AlgebraElement(tag_, entries_ + o.entries_);
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& o) const {
    require_same(tag_, o.tag_, "operator-");
    return AlgebraElement(tag_, entries_ - o.entries_);
}

AlgebraElement AlgebraElement::operator-() const { return AlgebraElement(tag_, -entries_); }

AlgebraElement AlgebraElement::operator*(double s) const { return AlgebraElement(tag_, s * entries_); }

VectorElement VectorElement::unit(int n, int i) { return VectorElement(Eigen::VectorXd::Unit(n, i)); }

// --- GroupElement ----------------------------------------------------------

GroupElement::GroupElement(GroupTag tag, CMatrix entries) : tag_(tag), entries_(std::move(entries)) {
    validate_group(tag_, entries_);
}

GroupElement GroupElement::identity(GroupTag tag) {
    return GroupElement(tag, CMatrix::Identity(tag.dim, tag.dim));
}

GroupElement GroupElement::so(const RMatrix& m) {
    return GroupElement(GroupTag::SO(static_cast<int>(m.rows())), m.cast<Complex>());
}

GroupElement GroupElement::operator*(const GroupElement& o) const {
    if (!(tag_ == o.tag_)) throw std::invalid_argument("group product: mismatched group tags");
    return GroupElement(tag_, entries_ * o.entries_);
}

GroupElement GroupElement::inverse() const { return GroupElement(tag_, entries_.adjoint()); }

double GroupElement::unitarity_defect() const {
    return max_abs(entries_.adjoint() * entries_ - CMatrix::Identity(tag_.dim, tag_.dim));
}

// --- OrthonormalBasis ------------------------------------------------------

OrthonormalBasis::OrthonormalBasis(std::vector<AlgebraElement> elements) : elements_(std::move(elements)) {
    const auto k = static_cast<Eigen::Index>(elements_.size());
    gram_.resize(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            gram_(i, j) = inner(elements_[i], elements_[j]);
        }
    }
    if (k > 0 && (gram_ - RMatrix::Identity(k, k)).cwiseAbs().maxCoeff() > kAlgebraTol) {
        throw std::invalid_argument("basis is not orthonormal under <A,B> = ½ tr(AB†)");
    }
}

Eigen::VectorXd OrthonormalBasis::coordinates(const AlgebraElement& a) const {
    Eigen::VectorXd c(static_cast<Eigen::Index>(elements_.size()));
    for (std::size_t i = 0; i < elements_.size(); ++i) c(static_cast<Eigen::Index>(i)) = inner(a, elements_[i]);
    return c;
}

AlgebraElement OrthonormalBasis::combine(const Eigen::VectorXd& coeffs) const {
    if (coeffs.size() != static_cast<Eigen::Index>(elements_.size()) || elements_.empty()) {
        throw std::invalid_argument("combine: coefficient count does not match basis");
    }
    CMatrix m = CMatrix::Zero(elements_[0].tag().dim, elements_[0].tag().dim);
    for (std::size_t i = 0; i < elements_.size(); ++i) m += coeffs(static_cast<Eigen::Index>(i)) * elements_[i].entries();
    return AlgebraElement(elements_[0].tag(), m);
}

// --- named elements --------------------------------------------------------

AlgebraElement milnor(int i) {
    const Complex I(0.0, 1.0);
    CMatrix m = CMatrix::Zero(2, 2);
    switch (i) {
    case 1: m << I, 0.0, 0.0, -I; break;
    case 2: m << 0.0, -1.0, 1.0, 0.0; break;
    case 3: m << 0.0, I, I, 0.0; break;
    default: throw std::invalid_argument("milnor: index must be 1, 2 or 3");
    }
    return AlgebraElement(AlgebraTag::su2(), m);
}

OrthonormalBasis milnor_basis() { return OrthonormalBasis({milnor(1), milnor(2), milnor(3)}); }

AlgebraElement so_generator(int n, int i, int j) {
    if (!(0 <= i && i < j && j < n)) throw std::invalid_argument("so_generator: need 0 <= i < j < n");
    RMatrix m = RMatrix::Zero(n, n);
    m(i, j) = 1.0;
    m(j, i) = -1.0;
    return AlgebraElement::so(m);
}

OrthonormalBasis so_basis(int n) {
    std::vector<AlgebraElement> e;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) e.push_back(so_generator(n, i, j));
    }
    return OrthonormalBasis(std::move(e));
}

// --- operations ------------------------------------------------------------

AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b) {
    require_same(a.tag(), b.tag(), "bracket");
    const CMatrix& x = a.entries();
    const CMatrix& y = b.entries();
    return AlgebraElement(a.tag(), x * y - y * x);
}

double inner(const AlgebraElement& a, const AlgebraElement& b) {
    require_same(a.tag(), b.tag(), "inner");
    // ½ Re tr(A B†) = ½ Σ Re(a_ij conj(b_ij))
    return 0.5 * (a.entries().array() * b.entries().conjugate().array()).sum().real();
}

AlgebraElement conjugate(const GroupElement& g, const AlgebraElement& a) {
    if (!(group_of(a.tag()) == g.tag())) throw std::invalid_argument("conjugate: group does not match algebra");
    return AlgebraElement(a.tag(), g.entries() * a.entries() * g.entries().adjoint());
}

CMatrix expm_series(const CMatrix& a) {
    if (!all_finite(a)) throw numeric_domain_error("expm: non-finite entries");
    return kernel::expm_taylor(a);
}

GroupElement expm(const AlgebraElement& a) {
    const CMatrix& m = a.entries();
    if (!all_finite(m)) throw numeric_domain_error("expm: non-finite entries");
    const AlgebraTag tag = a.tag();
    switch (tag.kind) {
    case Algebra::su2: {
        const Eigen::Matrix2cd u = kernel::expm_su2(Eigen::Matrix2cd(m));
        return GroupElement(GroupTag::SU2(), u);
    }
    case Algebra::u1: return GroupElement(GroupTag::U1(), kernel::circle(m(0, 0).imag()));
    case Algebra::so: {
        const RMatrix r = m.real();
        if (tag.dim == 1) return GroupElement::identity(GroupTag::SO(1));
        if (tag.dim == 2) return GroupElement::so(kernel::expm_so2(Eigen::Matrix2d(r)));
        if (tag.dim == 3) return GroupElement::so(kernel::expm_so3(Eigen::Matrix3d(r)));
        RMatrix g = kernel::expm_taylor(r);
        kernel::reproject_orthogonal(g);
        return GroupElement::so(g);
    }
    }
    throw std::logic_error("expm: unknown algebra");
}

GroupElement reproject(const CMatrix& raw, GroupTag tag) {
    if (raw.rows() != tag.dim || raw.cols() != tag.dim) throw std::invalid_argument("reproject: wrong shape");
    if (!all_finite(raw)) throw numeric_domain_error("reproject: non-finite entries");
    const CMatrix defect = raw.adjoint() * raw - CMatrix::Identity(tag.dim, tag.dim);
    const double spectral = Eigen::SelfAdjointEigenSolver<CMatrix>(defect, Eigen::EigenvaluesOnly)
                                .eigenvalues()
                                .cwiseAbs()
                                .maxCoeff();
    if (0.5 * spectral > kMaxDrift) {
        throw drift_error("reproject: matrix is " + std::to_string(0.5 * spectral) + " from " + to_string(tag) +
                          " (step size too large)");
    }
    CMatrix out;
    switch (tag.kind) {
    case Group::SO: {
        if (raw.imag().cwiseAbs().maxCoeff() > kMaxDrift) throw drift_error("reproject: complex entries for SO(n)");
        RMatrix g = raw.real();
        kernel::reproject_orthogonal(g);
        out = g.cast<Complex>();
        break;
    }
    case Group::SU2: {
        Eigen::Matrix2cd u = raw;
        kernel::reproject_su2(u);
        out = u;
        break;
    }
    case Group::U1: {
        if (std::abs(raw(0, 1)) + std::abs(raw(1, 0)) > 2.0 * kMaxDrift) {
            throw drift_error("reproject: off-diagonal mass for U(1)");
        }
        const Complex z = 0.5 * (raw(0, 0) + std::conj(raw(1, 1)));
        out = kernel::circle(std::arg(z));
        break;
    }
    }
    if (max_abs(out.adjoint() * out - CMatrix::Identity(tag.dim, tag.dim)) > kReprojectTol) {
        throw drift_error("reproject: result failed the 1e-12 unitarity check");
    }
    return GroupElement(tag, out);
}

CMatrix casimir_sum(const OrthonormalBasis& basis) {
    if (basis.size() == 0) throw std::invalid_argument("casimir_sum: empty basis");
    const int d = basis[0].tag().dim;
    CMatrix s = CMatrix::Zero(d, d);
    for (const auto& a : basis.elements()) s += a.entries() * a.entries();
    return s;
}

CMatrix casimir_sum(std::span<const AlgebraElement> basis) {
    return casimir_sum(OrthonormalBasis(std::vector<AlgebraElement>(basis.begin(), basis.end())));
}

GroupElement haar_sample(GroupTag tag, const engine::NoiseStream& stream) {
    switch (tag.kind) {
    case Group::U1: {
        double u[1];
        engine::uniforms(stream, u);
        return GroupElement(tag, kernel::circle(2.0 * std::numbers::pi * u[0]));
    }
    case Group::SU2: {
        double g[4];
        engine::standard_normals(stream, g);
        const double nrm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3]);
        const Complex z(g[0] / nrm, g[1] / nrm), w(g[2] / nrm, g[3] / nrm);
        Eigen::Matrix2cd u;
        u << z, -std::conj(w), w, std::conj(z);
        return GroupElement(tag, u);
    }
    case Group::SO: {
        const int n = tag.dim;
        if (n == 1) return GroupElement::identity(tag);
        std::vector<double> g(static_cast<std::size_t>(n * n));
        engine::standard_normals(stream, g);
        const RMatrix a = Eigen::Map<const RMatrix>(g.data(), n, n);
        Eigen::HouseholderQR<RMatrix> qr(a);
        RMatrix q = qr.householderQ();
        const RMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int j = 0; j < n; ++j) {
            if (r(j, j) < 0.0) q.col(j) = -q.col(j);
        }
        if (q.determinant() < 0.0) q.col(0) = -q.col(0);
        return GroupElement::so(q);
    }
    }
    throw std::logic_error("haar_sample: unknown group");
}

} // namespace intertwine::lie
