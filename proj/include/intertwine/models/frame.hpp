#pragma once

// Models on the frame bundle SO(n+1) → Sⁿ, n ∈ {2, 3}.
//
// OU-geodesic:  du = H(u)(e0) dt + ε^{-1/2} Σ_k A_k*(u) ∘ dw^k + ε^{-1} A0*(u) dt,
//               {A_k} the E_ij basis of so(n).
// Rotationally invariant horizontal lift with a fast structure-group factor:
//               dx̃ = √ε H(x̃)(g ∘ db) + ε H(x̃)(g e0) dt,   dg = Σ_k g B_k ∘ dw^k,
//               B_k = Σ_j σ_kj A_j constant.
// Both are observed on the slow clock: sample time t is original time t/ε.

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "intertwine/bundle.hpp"
#include "intertwine/lie.hpp"
#include "intertwine/models/hopf.hpp"
#include "intertwine/noise.hpp"
#include "intertwine/stats.hpp"

namespace intertwine::models {

struct OUGeodesicConfig {
    int n = 2;
    Eigen::VectorXd e0 = Eigen::Vector2d(1.0, 0.0);
    double epsilon = 0.1;
    Eigen::MatrixXd a0; ///< vertical drift in so(n); empty means 0
    FastInit fast_init = FastInit::haar;
    bool noise = true; ///< false removes the vertical terms (pure geodesic flow)

    void validate() const;
};

struct RotInvConfig {
    int n = 2;
    Eigen::VectorXd e0 = Eigen::Vector2d::Zero(); ///< may be 0
    Eigen::MatrixXd sigma; ///< m × m with m = dim so(n); empty means identity
    double epsilon = 0.1;
    FastInit fast_init = FastInit::haar;
    bool slow_noise = true; ///< false removes the db term

    void validate() const;
};

/// Full E_ij basis of so(n) embedded in so(n+1).
std::vector<Eigen::MatrixXd> embedded_vertical_basis(int n);

template <int n>
class OUGeodesic {
public:
    static constexpr int N = n + 1;
    static constexpr int M = n * (n - 1) / 2;
    using Mat = Eigen::Matrix<double, N, N>;
    struct State {
        Mat r;
    };

    explicit OUGeodesic(OUGeodesicConfig cfg) : cfg_(std::move(cfg)) {
        cfg_.validate();
        if (cfg_.n != n) throw std::invalid_argument("ou-geodesic: dimension mismatch");
        horiz_ = bundle::kernel::standard_horizontal<N>(Eigen::Matrix<double, n, 1>(cfg_.e0));
        const auto basis = embedded_vertical_basis(n);
        for (int k = 0; k < M; ++k) vert_[k] = basis[k];
        v0_.setZero();
        if (cfg_.a0.size() > 0) v0_.template block<n, n>(1, 1) = cfg_.a0;
        kappa_ = cfg_.noise ? 1.0 / std::sqrt(cfg_.epsilon) : 0.0;
        drift_ = cfg_.noise ? 1.0 / cfg_.epsilon : 0.0;
    }

    const OUGeodesicConfig& config() const { return cfg_; }
    std::size_t noise_dimension() const { return M; }
    double time_scale() const { return 1.0 / cfg_.epsilon; }

    State initial_state(const engine::NoiseStream& init) const {
        State s{Mat::Identity()};
        if (cfg_.fast_init == FastInit::haar) {
            s.r.template block<n, n>(1, 1) = lie::haar_sample(lie::GroupTag::SO(n), init).real();
        }
        return s;
    }

    void step(State& s, std::span<const double> dw, double dt) const {
        Mat inc = dt * horiz_ + (dt * drift_) * v0_;
        for (int k = 0; k < M; ++k) inc += (kappa_ * dw[k]) * vert_[k];
        s.r = (s.r * lie::kernel::expm_so<N>(inc)).eval();
        lie::kernel::reproject_orthogonal(s.r);
    }

    std::vector<std::string> observable_names() const { return {"P1", "P2"}; }

    void observe(const State& s, const State& s0, std::span<double> out) const {
        const double c = s.r.col(0).dot(s0.r.col(0));
        out[0] = stats::gegenbauer(1, c, n);
        out[1] = stats::gegenbauer(2, c, n);
    }

    void check_invariants(const State& s) const {
        const double defect = (s.r.transpose() * s.r - Mat::Identity()).cwiseAbs().maxCoeff();
        if (!(defect <= lie::kGroupTol) || !(std::abs(s.r.determinant() - 1.0) <= lie::kGroupTol)) {
            throw drift_error("ou-geodesic: frame left SO(n+1)");
        }
        if (!(std::abs(s.r.col(0).norm() - 1.0) <= bundle::kSphereTol)) {
            throw drift_error("ou-geodesic: base point left the sphere");
        }
    }

private:
    OUGeodesicConfig cfg_;
    Mat horiz_;
    std::array<Mat, M> vert_;
    Mat v0_;
    double kappa_ = 0.0;
    double drift_ = 0.0;
};

template <int n>
class RotInv {
public:
    static constexpr int N = n + 1;
    static constexpr int M = n * (n - 1) / 2;
    using Mat = Eigen::Matrix<double, N, N>;
    using GMat = Eigen::Matrix<double, n, n>;
    using Vec = Eigen::Matrix<double, n, 1>;
    struct State {
        Mat x;
        GMat g;
    };

    explicit RotInv(RotInvConfig cfg) : cfg_(std::move(cfg)) {
        cfg_.validate();
        if (cfg_.n != n) throw std::invalid_argument("rotinv: dimension mismatch");
        e0_ = cfg_.e0;
        const auto basis = lie::so_basis(n);
        const Eigen::MatrixXd sig = cfg_.sigma.size() > 0 ? cfg_.sigma : Eigen::MatrixXd::Identity(M, M);
        for (int k = 0; k < M; ++k) {
            b_[k].setZero();
            for (int j = 0; j < M; ++j) b_[k] += sig(k, j) * GMat(basis[j].real());
        }
        sqrt_eps_ = cfg_.slow_noise ? std::sqrt(cfg_.epsilon) : 0.0;
    }

    const RotInvConfig& config() const { return cfg_; }
    std::size_t noise_dimension() const { return n + M; }
    double time_scale() const { return 1.0 / cfg_.epsilon; }

    State initial_state(const engine::NoiseStream& init) const {
        State s{Mat::Identity(), GMat::Identity()};
        if (cfg_.fast_init == FastInit::haar) s.g = lie::haar_sample(lie::GroupTag::SO(n), init).real();
        return s;
    }

    /// increments (db¹..dbⁿ, dw¹..dw^M); g enters at the left endpoint
    void step(State& s, std::span<const double> dw, double dt) const {
        Vec db;
        for (int i = 0; i < n; ++i) db(i) = dw[i];
        const Vec v = sqrt_eps_ * (s.g * db) + (cfg_.epsilon * dt) * (s.g * e0_);
        s.x = (s.x * lie::kernel::expm_so<N>(bundle::kernel::standard_horizontal<N>(v))).eval();
        lie::kernel::reproject_orthogonal(s.x);
        GMat a = GMat::Zero();
        for (int k = 0; k < M; ++k) a += dw[n + k] * b_[k];
        s.g = (s.g * lie::kernel::expm_so<n>(a)).eval();
        lie::kernel::reproject_orthogonal(s.g);
    }

    std::vector<std::string> observable_names() const { return {"P1", "P2"}; }

    void observe(const State& s, const State& s0, std::span<double> out) const {
        const double c = s.x.col(0).dot(s0.x.col(0));
        out[0] = stats::gegenbauer(1, c, n);
        out[1] = stats::gegenbauer(2, c, n);
    }

    void check_invariants(const State& s) const {
        const double dx = (s.x.transpose() * s.x - Mat::Identity()).cwiseAbs().maxCoeff();
        const double dg = (s.g.transpose() * s.g - GMat::Identity()).cwiseAbs().maxCoeff();
        if (!(dx <= lie::kGroupTol) || !(dg <= lie::kGroupTol) || !(std::abs(s.x.determinant() - 1.0) <= lie::kGroupTol) ||
            !(std::abs(s.g.determinant() - 1.0) <= lie::kGroupTol)) {
            throw drift_error("rotinv: state left the group");
        }
    }

private:
    RotInvConfig cfg_;
    Vec e0_;
    std::array<GMat, M> b_;
    double sqrt_eps_ = 0.0;
};

/// One OU-geodesic step on a frame bundle point (n ∈ {2, 3}).
bundle::FrameBundlePoint ou_geodesic_step(const OUGeodesicConfig& cfg, const bundle::FrameBundlePoint& r,
                                          std::span<const double> dw, double dt);

struct RotInvPoint {
    bundle::FrameBundlePoint x;
    lie::GroupElement g;
};

/// One coupled rotinv step (n ∈ {2, 3}).
RotInvPoint rotinv_step(const RotInvConfig& cfg, const RotInvPoint& s, std::span<const double> dw, double dt);

} // namespace intertwine::models
