#pragma once

// Experiment runner: `key = value` configuration, batch execution over an ε
// sweep with common random numbers, CSV + JSON sidecar output, replay.
//
// Configuration keys (defaults in brackets):
//   model        hopf-full | hopf-reduced | heisenberg | ou-geodesic | rotinv   (required)
//   epsilon      comma-separated list, each > 0                                 (required)
//   T            horizon on the sample clock, > 0                               (required)
//   seed         master seed, u64                                               (required)
//   h            base step; the effective step is h·ε, h ≤ 1/20                 [0.05]
//   paths        number of paths per ε, ≥ 1                                     [1000]
//   times        comma-separated sample times in (0, T], increasing             [T/5, 2T/5, …, T]
//   observables  comma-separated subset of the model's observables              [all]
//   output       CSV path                                                       [results.csv]
//   c2, c3       Hopf Y0 = c2 X2 + c3 X3                                        [1, 0]
//   n            sphere dimension for ou-geodesic / rotinv, 2 or 3              [2]
//   e0           comma-separated vector in ℝⁿ    [ou-geodesic: (1, 0, …); rotinv: 0]
//   a0           ou-geodesic vertical drift, coordinates in the E_ij basis      [0]
//   sigma        rotinv m × m coefficient matrix, row-major, m = n(n−1)/2       [identity]
//   fast_init    haar | identity                                                [haar]
//   vertical     heisenberg fast vertical terms on/off: true | false            [true]
//   workers      worker threads, 0 = INTERTWINE_WORKERS or hardware             [0]
//
// Sample times are on the slow clock: for the Hopf, OU-geodesic and rotinv
// models a sample time t is original time t/ε; the Heisenberg model runs in
// original time.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "intertwine/engine.hpp"
#include "intertwine/stats.hpp"

namespace intertwine::io {

enum class ModelKind { hopf_full, hopf_reduced, heisenberg, ou_geodesic, rotinv };
std::string to_string(ModelKind k);

struct ExperimentConfig {
    ModelKind model = ModelKind::hopf_reduced;
    std::vector<double> epsilons;
    double T = 1.0;
    double h = 0.05;
    std::size_t paths = 1000;
    std::uint64_t seed = 0;
    std::vector<double> times;
    std::vector<std::string> observables;
    std::string output = "results.csv";
    double c2 = 1.0, c3 = 0.0;
    int n = 2;
    Eigen::VectorXd e0;
    Eigen::VectorXd a0;
    Eigen::VectorXd sigma;
    bool haar_init = true;
    bool vertical = true;
    unsigned workers = 0;
};

/// Throws parse_error (with the offending line) on unknown or duplicate keys,
/// malformed values, violated invariants or missing required keys.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Re-checks every invariant (used after command-line overrides).
/// Throws std::invalid_argument.
void validate(const ExperimentConfig& cfg);

/// Every simulation-relevant key with its resolved value, one per line in a
/// fixed order. `output` and `workers` are excluded: they do not affect results.
std::string canonical_text(const ExperimentConfig& cfg);
/// FNV-1a 64 of canonical_text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Observable names the model reports.
std::vector<std::string> model_observables(const ExperimentConfig& cfg);

inline constexpr const char* kCsvHeader = "model,epsilon,t,observable,mean,se,n,seed,config_hash";

struct ResultRow {
    std::string model;
    double epsilon = 0.0;
    double t = 0.0;
    std::string observable;
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string config_hash;
};

/// Shortest round-trip decimal.
std::string format_double(double x);
std::string format_row(const ResultRow& r);

/// The batch for one ε value (streams 0 .. paths − 1).
engine::BatchResult run_batch(const ExperimentConfig& cfg, double epsilon, unsigned workers);

struct RunOutcome {
    std::vector<ResultRow> rows;
    bool failed = false;
    std::string message;
};

/// Runs every ε in order; stops at the first batch failure.
RunOutcome compute_rows(const ExperimentConfig& cfg, unsigned workers);

/// Writes `csv_path` and `csv_path + ".json"`. On a simulation failure the
/// rows computed so far are followed by a FAILED row. Throws std::runtime_error
/// on I/O failure.
RunOutcome run_experiment(const ExperimentConfig& cfg, const std::string& csv_path, unsigned workers);

std::string sidecar_path(const std::string& csv_path);

struct ReplayReport {
    bool pass = false;
    std::size_t rows_checked = 0;
    std::optional<std::size_t> first_mismatch; ///< 1-based CSV line
    std::string expected;                      ///< line as recomputed
    std::string actual;                        ///< line as found in the file
    std::string message;
};

/// Re-runs the configuration stored in the sidecar and compares every CSV line
/// byte for byte. Throws std::runtime_error if the CSV or sidecar is missing.
ReplayReport replay(const std::string& csv_path, unsigned workers);

/// Rate fit of the P1 observable per ε from computed rows.
struct RateRow {
    double epsilon = 0.0;
    stats::RateFit fit;
};
std::vector<RateRow> fit_rates(const std::vector<ResultRow>& rows, const std::string& observable = "P1");

} // namespace intertwine::io
