#pragma once

// Effective Laplacian coefficient c (limit generator c·Δ on the base sphere)
// from three independent routes:
//   kubo:       c = (1/dim) ∫₀^∞ tr C(s) ds for the stationary velocity
//               autocorrelation C of the base drift, in fast time;
//   quadrature: Haar-averaged coefficients divided by the fast spectral gap;
//   paper:      the constants stated with the theorems, converted to the unit sphere.

#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace intertwine::models {

enum class RateSource { paper, kubo, quadrature };
std::string to_string(RateSource s);

struct EffectiveRate {
    double c = 0.0;
    RateSource source = RateSource::kubo;
    double se = 0.0;     ///< Monte Carlo standard error, 0 for closed forms
    std::string method;  ///< "closed-form", "monte-carlo", "haar-quadrature", "stated"

    /// Decay rate of E P_l(<x_t, x_0>) on Sⁿ: c·l(l+n−1).
    double decay_rate(int l, int n) const { return c * l * (l + n - 1); }
};

struct KuboSpec {
    enum class Kind { hopf, ou_geodesic };
    enum class Method { automatic, closed_form, monte_carlo };

    Kind kind = Kind::hopf;
    double c2 = 1.0, c3 = 0.0;  ///< Hopf Y0
    int n = 2;                  ///< OU-geodesic sphere dimension
    Eigen::VectorXd e0;         ///< OU-geodesic drift direction (unit)
    Eigen::MatrixXd a0;         ///< OU-geodesic vertical drift; empty means 0
    Method method = Method::automatic;

    // Monte Carlo route, all in fast time
    std::size_t mc_paths = 2000;
    double mc_step = 0.05;
    double mc_max_lag = 16.0;
    double mc_window = 16.0;
    std::uint64_t seed = 7;

    static KuboSpec hopf(double c2, double c3);
    static KuboSpec ou_geodesic(int n, Eigen::VectorXd e0);

    int base_dimension() const { return kind == Kind::hopf ? 2 : n; }
    bool has_closed_form() const;
};

/// Throws oracle_failure if the Monte Carlo correlation tail exceeds 1% of C(0),
/// std::invalid_argument if a closed form is requested where none applies.
EffectiveRate kubo_effective_rate(const KuboSpec& spec);
EffectiveRate quadrature_effective_rate(const KuboSpec& spec);
EffectiveRate paper_effective_rate(const KuboSpec& spec);

/// Exact slow-clock decay rate of E<x_t, x_0> for a constant-speed walk on Sⁿ
/// whose direction decorrelates at rate κ in fast time: the slow root of
/// m'' + (κ/ε) m' + s² m = 0 in original time, divided by ε. Tends to s²/κ.
/// Throws std::invalid_argument when the roots are complex (ε too large).
double persistent_walk_rate(double speed, double kappa, double epsilon);

} // namespace intertwine::models
