#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "intertwine/bundle.hpp"

using namespace intertwine;
using namespace intertwine::bundle;
using lie::CMatrix;
using lie::RMatrix;

namespace {

GroupElement random_su2_point(std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Eigen::Vector4d q(nd(rng), nd(rng), nd(rng), nd(rng));
    q.normalize();
    CMatrix u(2, 2);
    const lie::Complex z(q(0), q(1)), w(q(2), q(3));
    u << z, -std::conj(w), w, std::conj(z);
    return GroupElement(lie::GroupTag::SU2(), u);
}

RMatrix random_skew(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> nd;
    RMatrix m = RMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            m(i, j) = nd(rng);
            m(j, i) = -m(i, j);
        }
    return m;
}

Eigen::VectorXd unit(int n, int i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(i) = 1.0;
    return e;
}

} // namespace

TEST_CASE("hopf projection basics") {
    const auto x = hopf_project(GroupElement::identity(lie::GroupTag::SU2()));
    CHECK((x.coords() - Eigen::Vector3d(0, 0, 1)).norm() <= 1e-15);
    // the second column of the identity is (0, 1): the south pole
    CMatrix s(2, 2);
    s << 0.0, -1.0, 1.0, 0.0;
    CHECK((hopf_project(GroupElement(lie::GroupTag::SU2(), s)).coords() - Eigen::Vector3d(0, 0, -1)).norm() <= 1e-15);
    CHECK_THROWS_AS(hopf_project(GroupElement::identity(lie::GroupTag::SO(3))), std::invalid_argument);
}

TEST_CASE("hopf projection is constant on circle orbits") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ud(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < 10000; ++i) {
        const auto u = random_su2_point(rng);
        const Eigen::Vector3d x = kernel::hopf_project(Eigen::Matrix2cd(u.entries()));
        REQUIRE(std::abs(x.norm() - 1.0) <= 1e-12);
        const Eigen::Matrix2cd ug = u.entries() * lie::kernel::circle(ud(rng));
        REQUIRE((kernel::hopf_project(ug) - x).norm() <= 1e-12);
    }
}

TEST_CASE("hopf connection split") {
    const auto u = GroupElement::identity(lie::GroupTag::SU2());
    const auto x1 = hopf_connection_split(u, lie::milnor(1));
    CHECK(x1.horizontal.entries().cwiseAbs().maxCoeff() == 0.0);
    CHECK((x1.vertical - lie::milnor(1)).entries().cwiseAbs().maxCoeff() == 0.0);
    const auto x2 = hopf_connection_split(u, lie::milnor(2));
    CHECK(x2.vertical.entries().cwiseAbs().maxCoeff() == 0.0);
    CHECK((x2.horizontal - lie::milnor(2)).entries().cwiseAbs().maxCoeff() == 0.0);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (int i = 0; i < 1000; ++i) {
        const auto p = random_su2_point(rng);
        const auto v = nd(rng) * lie::milnor(1) + nd(rng) * lie::milnor(2) + nd(rng) * lie::milnor(3);
        const auto d = hopf_connection_split(p, v);
        REQUIRE(((d.horizontal + d.vertical) - v).entries().cwiseAbs().maxCoeff() == 0.0);
        REQUIRE(std::abs(lie::inner(d.horizontal, d.vertical)) <= 1e-12);
        REQUIRE(std::abs(lie::inner(d.horizontal, lie::milnor(1))) <= 1e-15);
        // vertical directions do not move the base point
        const Eigen::Vector3d dx = kernel::hopf_differential(Eigen::Matrix2cd(p.entries()),
                                                             Eigen::Matrix2cd(d.vertical.entries()));
        REQUIRE(dx.norm() <= 1e-12);
    }
    CHECK_THROWS_AS(hopf_connection_split(u, lie::so_generator(2, 0, 1)), std::invalid_argument);
}

TEST_CASE("horizontal unit vectors move the Hopf base at speed 2") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
        const auto p = random_su2_point(rng);
        for (int k : {2, 3}) {
            const Eigen::Vector3d dx = kernel::hopf_differential(Eigen::Matrix2cd(p.entries()),
                                                                 Eigen::Matrix2cd(lie::milnor(k).entries()));
            CHECK(dx.norm() == doctest::Approx(2.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("standard horizontal fields") {
    const auto h = standard_horizontal(VectorElement(unit(2, 0)), 2);
    RMatrix want = RMatrix::Zero(3, 3);
    want(1, 0) = 1.0;
    want(0, 1) = -1.0;
    CHECK((h.real() - want).cwiseAbs().maxCoeff() == 0.0);
    CHECK(standard_horizontal(VectorElement(Eigen::VectorXd::Zero(3)), 3).entries().cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(standard_horizontal(VectorElement(unit(3, 0)), 2), std::invalid_argument);

    // exp(t H(e1)) e0 = cos t e0 + sin t e1
    for (double t : {0.1, 1.0, 2.5}) {
        const Eigen::VectorXd x = lie::expm(t * h).real().col(0);
        CHECK((x - Eigen::Vector3d(std::cos(t), std::sin(t), 0.0)).norm() <= 1e-14);
    }

    // horizontal and vertical subspaces are orthogonal
    for (int n : {2, 3}) {
        const auto basis = lie::so_basis(n);
        for (int i = 0; i < n; ++i) {
            const auto hi = standard_horizontal(VectorElement(unit(n, i)), n);
            for (const auto& a : basis.elements()) {
                CHECK(std::abs(lie::inner(hi, fundamental_vertical(a))) <= 1e-15);
            }
        }
    }
}

TEST_CASE("fundamental vertical fields fix the base point") {
    CHECK(fundamental_vertical(lie::AlgebraElement::zero(lie::AlgebraTag::so(3))).entries().cwiseAbs().maxCoeff() ==
          0.0);
    std::mt19937_64 rng(6);
    for (int n : {2, 3}) {
        const auto a = lie::AlgebraElement::so(random_skew(rng, n));
        const auto v = fundamental_vertical(a);
        CHECK(v.tag() == lie::AlgebraTag::so(n + 1));
        const Eigen::VectorXd x = lie::expm(0.8 * v).real().col(0);
        CHECK((x - unit(n + 1, 0)).norm() <= 1e-15);
        CHECK((frame_connection_split(v).vertical.real().block(1, 1, n, n) - a.real()).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK_THROWS_AS(fundamental_vertical(lie::milnor(1)), std::invalid_argument);
}

TEST_CASE("frame connection split") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (int n : {2, 3}) {
        const Eigen::VectorXd e = Eigen::VectorXd::NullaryExpr(n, [&] { return nd(rng); });
        const auto d0 = frame_connection_split(standard_horizontal(VectorElement(e), n));
        CHECK((d0.theta.coords - e).norm() == 0.0);
        CHECK(d0.vertical.entries().cwiseAbs().maxCoeff() == 0.0);

        for (int trial = 0; trial < 200; ++trial) {
            const auto v = lie::AlgebraElement::so(random_skew(rng, n + 1));
            const auto d = frame_connection_split(v);
            REQUIRE(((d.horizontal + d.vertical) - v).entries().cwiseAbs().maxCoeff() == 0.0);
            REQUIRE(std::abs(lie::inner(d.horizontal, d.vertical)) <= 1e-15);
            // splitting twice changes nothing
            const auto dh = frame_connection_split(d.horizontal);
            REQUIRE(dh.vertical.entries().cwiseAbs().maxCoeff() == 0.0);

            // equivariance: ϖ(Ad(ĝ⁻¹) V) = Ad(g⁻¹) ϖ(V) for ĝ = diag(1, g)
            const RMatrix g = lie::expm(lie::AlgebraElement::so(random_skew(rng, n))).real();
            RMatrix gh = RMatrix::Identity(n + 1, n + 1);
            gh.block(1, 1, n, n) = g;
            const auto moved = frame_connection_split(lie::AlgebraElement::so(gh.transpose() * v.real() * gh));
            const RMatrix want = g.transpose() * d.vertical.real().block(1, 1, n, n) * g;
            REQUIRE((moved.vertical.real().block(1, 1, n, n) - want).cwiseAbs().maxCoeff() <= 1e-12);
            // and θ transforms as θ ↦ g⁻¹θ
            REQUIRE((moved.theta.coords - g.transpose() * d.theta.coords).norm() <= 1e-12);
        }
    }
    CHECK_THROWS_AS(frame_connection_split(lie::milnor(2)), std::invalid_argument);
}

TEST_CASE("frame bundle points") {
    std::mt19937_64 rng(9);
    const auto r = lie::expm(lie::AlgebraElement::so(random_skew(rng, 4)));
    const FrameBundlePoint p(r);
    CHECK(p.n() == 3);
    CHECK((p.base().coords() - r.real().col(0)).norm() == 0.0);
    // right action of the structure group keeps the fiber
    const auto g = lie::expm(fundamental_vertical(lie::AlgebraElement::so(random_skew(rng, 3))));
    CHECK((FrameBundlePoint(r * g).base().coords() - p.base().coords()).norm() <= 1e-15);
    CHECK_THROWS_AS(FrameBundlePoint(GroupElement::identity(lie::GroupTag::SU2())), std::invalid_argument);
    CHECK_THROWS_AS(SpherePoint(Eigen::Vector3d(1.0, 1e-5, 0.0)), std::invalid_argument);
}

TEST_CASE("horizontal lift steps trace great circles") {
    const FrameBundlePoint r0(GroupElement::identity(lie::GroupTag::SO(3)));
    CHECK((horizontal_lift_step(r0, VectorElement(unit(2, 0)), 0.0).frame().real() - RMatrix::Identity(3, 3))
              .cwiseAbs()
              .maxCoeff() == 0.0);

    const Eigen::VectorXd e = Eigen::Vector2d(0.6, 0.8);
    const double h = 1e-3;
    FrameBundlePoint r = r0;
    for (int k = 1; k <= 2000; ++k) {
        const RMatrix before = r.frame().real();
        r = horizontal_lift_step(r, VectorElement(e), h);
        const RMatrix body = before.transpose() * r.frame().real();
        // each body increment is exp(hH(e)), with no vertical part
        REQUIRE((body - lie::expm(standard_horizontal(VectorElement(e), 2) * h).real()).cwiseAbs().maxCoeff() <=
                1e-13);
    }
    const double s = 2.0;
    const Eigen::Vector3d want(std::cos(s), 0.6 * std::sin(s), 0.8 * std::sin(s));
    CHECK((r.base().coords() - want).norm() <= 1e-10);
    CHECK(std::acos(r.base().coords()(0)) == doctest::Approx(s).epsilon(1e-10));
    CHECK_THROWS_AS(horizontal_lift_step(r0, VectorElement(e), -1.0), std::invalid_argument);
}
