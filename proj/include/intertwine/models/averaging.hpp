#pragma once

// Haar averages of the horizontal coefficient fields:
//   a_jk = ∫_G <g-translated field, H_j> <g-translated field, H_k> dg,   b_j = ∫_G <field, H_j> dg.
// Hopf: the field is g Y0 on G = S¹ and H_j ∈ {X2, X3}.
// Frame bundle: the field is g e0 on G = SO(n) and H_j = e_j.

#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace intertwine::models {

enum class InvariantMeasure { haar, other };

struct AveragingSpec {
    enum class Kind { hopf, frame };

    Kind kind = Kind::hopf;
    double c2 = 1.0, c3 = 0.0;  ///< Hopf: Y0 = c2 X2 + c3 X3
    int n = 2;                  ///< frame: SO(n) acting on e0 ∈ ℝⁿ
    Eigen::VectorXd e0;
    InvariantMeasure measure = InvariantMeasure::haar;
    std::size_t nodes = 1024;         ///< trapezoid nodes on the circle
    std::size_t mc_samples = 100000;  ///< Haar samples for SO(n ≥ 3)
    std::uint64_t seed = 1;

    static AveragingSpec hopf(double c2, double c3);
    static AveragingSpec frame(int n, Eigen::VectorXd e0);
};

struct AveragedCoefficients {
    Eigen::MatrixXd a;
    Eigen::MatrixXd a_se; ///< zero for quadrature
    Eigen::VectorXd b;
    Eigen::VectorXd b_se;
    std::string method;   ///< "trapezoid" or "monte-carlo"
};

/// Throws unsupported_configuration for a non-Haar invariant measure.
AveragedCoefficients averaged_coefficients(const AveragingSpec& spec);

} // namespace intertwine::models
