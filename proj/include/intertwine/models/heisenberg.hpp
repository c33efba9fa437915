#pragma once

// Coordinate SDE on the Heisenberg group ℝ³:
//   dx = cos z ∘ db¹ − sin z ∘ db²,   dy = sin z ∘ db¹ + cos z ∘ db²,
//   dz = ½(x sin z − y cos z) ∘ db¹ + ½(x cos z + y sin z) ∘ db² + ε^{-1/2} dw − ε^{-1} z dt.
// The planar path's Lévy area A = ½∫(x dy − y dx) is accumulated alongside.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "intertwine/noise.hpp"

namespace intertwine::models {

struct HeisenbergConfig {
    double epsilon = 0.1;
    /// false drops the fast terms ε^{-1/2} dw − ε^{-1} z dt, leaving z − A constant.
    bool vertical = true;

    void validate() const;
};

struct HeisenbergState {
    double x = 0.0, y = 0.0, z = 0.0;
    double area = 0.0;
};

class HeisenbergModel {
public:
    using State = HeisenbergState;

    explicit HeisenbergModel(HeisenbergConfig cfg);

    const HeisenbergConfig& config() const { return cfg_; }
    std::size_t noise_dimension() const { return 3; }
    double time_scale() const { return 1.0; }
    State initial_state(const engine::NoiseStream&) const { return {}; }
    /// increments (db¹, db², dw)
    void step(State& s, std::span<const double> dw, double dt) const;
    std::vector<std::string> observable_names() const;
    void observe(const State& s, const State& s0, std::span<double> out) const;
    void check_invariants(const State& s) const;

    /// Drift b and diffusion columns (db¹, db², dw) at (x, y, z).
    void coefficients(const Eigen::Vector3d& p, Eigen::Vector3d& b, Eigen::Matrix3d& s) const;

private:
    HeisenbergConfig cfg_;
    double kappa_; ///< 1/√ε, or 0 with the vertical part off
    double drift_; ///< 1/ε, or 0 with the vertical part off
};

/// One Heun step from `s`; free-function form of HeisenbergModel::step.
HeisenbergState heisenberg_step(const HeisenbergModel& m, const HeisenbergState& s, double db1, double db2, double dw,
                                double dt);

} // namespace intertwine::models
