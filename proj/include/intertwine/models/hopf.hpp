#pragma once

// Slow/fast system on SU(2) × U(1):
//   du = u Y0 g dt + ε^{-1/2} u X1 ∘ db,   dg = ε^{-1/2} g X1 ∘ db,
// with the circle factor solved exactly, g_t = exp(X1 θ_t), θ_t = θ_0 + b_t/√ε.
// The reduced form integrates the horizontal part x̃ = u g⁻¹, dx̃ = x̃ g Y0 dt.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "intertwine/bundle.hpp"
#include "intertwine/lie.hpp"
#include "intertwine/noise.hpp"

namespace intertwine::models {

using lie::AlgebraElement;
using lie::GroupElement;

enum class HopfMode { full, reduced };
enum class FastInit { haar, identity };

struct HopfConfig {
    double c2 = 1.0;
    double c3 = 0.0;
    double epsilon = 0.1;
    HopfMode mode = HopfMode::reduced;
    FastInit fast_init = FastInit::haar;
    bool noise = true; ///< false freezes g (the b-noise coefficient is set to 0)

    AlgebraElement y0() const;
    /// det of the Milnor coordinates of X1, Y0, [Y0, X1]; equals 2|Y0|².
    double hypoellipticity_determinant() const;
    /// Throws std::invalid_argument unless ε > 0 and the determinant is nonzero.
    void validate() const;
};

struct HopfState {
    Eigen::Matrix2cd u; ///< u in full mode, x̃ in reduced mode
    double theta = 0.0; ///< g = exp(θ X1)
};

class HopfModel {
public:
    using State = HopfState;

    explicit HopfModel(HopfConfig cfg);

    const HopfConfig& config() const { return cfg_; }
    std::size_t noise_dimension() const { return 1; }
    double time_scale() const { return 1.0 / cfg_.epsilon; }
    State initial_state(const engine::NoiseStream& init) const;
    void step(State& s, std::span<const double> db, double dt) const;
    std::vector<std::string> observable_names() const { return {"P1", "P2", "cos_g"}; }
    void observe(const State& s, const State& s0, std::span<double> out) const;
    void check_invariants(const State& s) const;

    /// x̃ g in reduced mode, u in full mode.
    Eigen::Matrix2cd total_space_point(const State& s) const;

    // Single steps in place, shared by step() and the domain wrappers below.
    void full_step(Eigen::Matrix2cd& u, double theta0, double theta1, double db, double dt) const;
    void reduced_step(Eigen::Matrix2cd& x, double theta0, double theta1, double dt) const;

private:
    HopfConfig cfg_;
    Eigen::Matrix2cd y0_;
    double kappa_; ///< noise coefficient 1/√ε, or 0 with noise off
};

/// One Stratonovich step of the full system; returns (u', θ').
std::pair<GroupElement, double> hopf_full_step(const HopfModel& m, const GroupElement& u, double theta, double db,
                                               double dt);
/// One trapezoidal step of dx̃ = x̃ g Y0 dt given the fast angle at both ends.
GroupElement hopf_reduced_step(const HopfModel& m, const GroupElement& x, double theta0, double theta1, double dt);

/// In-place reduced step x ← x·exp(dt·½(g(θ0) + g(θ1))·Y0) for any Y0 in span{X2, X3}.
void hopf_reduced_kernel(Eigen::Matrix2cd& x, const Eigen::Matrix2cd& y0, double theta0, double theta1, double dt);

/// Frobenius distance between u and x̃ g.
double hopf_discrepancy(const Eigen::Matrix2cd& u, const Eigen::Matrix2cd& x, double theta);

} // namespace intertwine::models
