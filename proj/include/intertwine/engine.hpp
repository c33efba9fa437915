#pragma once

// Stratonovich stepping on matrix groups and a deterministic path/batch driver.
//
// A model is a value type with pure step functions (see PathModel). Noise for
// step k of path p is the Philox block (seed, p, k), so a path depends only on
// its stream id and results do not depend on the worker count.

#include <algorithm>
#include <atomic>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "intertwine/errors.hpp"
#include "intertwine/lie.hpp"
#include "intertwine/noise.hpp"
#include "intertwine/stats.hpp"

namespace intertwine::engine {

using lie::AlgebraElement;
using lie::GroupElement;

/// Largest base step h; the effective step h·ε then resolves the fast scale
/// with at least 20 steps per unit of fast time.
inline constexpr double kMaxBaseStep = 1.0 / 20.0;

class Clock {
public:
    /// Throws std::invalid_argument unless 0 < base_step ≤ 1/20 and epsilon > 0.
    Clock(double base_step, double epsilon);

    double base_step() const { return h_; }
    double epsilon() const { return eps_; }
    double step() const { return h_ * eps_; }

private:
    double h_;
    double eps_;
};

/// U · expm(Σ_k A_k ΔW_k + drift · h), reprojected.
GroupElement exp_euler_step(const GroupElement& u, const AlgebraElement& drift,
                            std::span<const AlgebraElement> diffusions, std::span<const double> dw, double h);

struct Coefficients {
    AlgebraElement drift;
    std::vector<AlgebraElement> diffusions;
};
using CoefficientField = std::function<Coefficients(const GroupElement&)>;

/// Predictor with σ(U), corrector with ½(σ(U) + σ(U′)).
GroupElement heun_group_step(const GroupElement& u, const CoefficientField& sigma,
                             std::span<const double> dw, double h);

/// Heun step for dX = b(X) dt + Σ_k σ_k(X) ∘ dW_k in ℝᵈ. `coeff(x, b, s)` fills the
/// drift b and the diffusion matrix s (d × k, column k is σ_k).
template <typename Vec, typename Mat, typename F>
Vec heun_step(const Vec& x, F&& coeff, const Eigen::VectorXd& dw, double h) {
    Vec b0, b1;
    Mat s0, s1;
    coeff(x, b0, s0);
    const Vec pred = x + b0 * h + s0 * dw;
    coeff(pred, b1, s1);
    const Vec out = x + 0.5 * ((b0 + b1) * h + (s0 + s1) * dw);
    if (!out.allFinite()) throw numeric_domain_error("heun_step: non-finite state");
    return out;
}

template <typename M>
concept PathModel = requires(const M& m, typename M::State& s, const typename M::State& cs,
                             std::span<const double> dw, std::span<double> out, const NoiseStream& ns) {
    { m.noise_dimension() } -> std::convertible_to<std::size_t>;
    { m.initial_state(ns) } -> std::same_as<typename M::State>;
    m.step(s, dw, 0.0);
    m.observe(cs, cs, out);
    { m.observable_names() } -> std::convertible_to<std::vector<std::string>>;
    m.check_invariants(cs);
    { m.time_scale() } -> std::convertible_to<double>;
};

struct PathFailure {
    double time = 0.0; ///< sample-clock time of the last completed step
    std::string message;
};

template <typename State>
struct PathRecord {
    std::vector<double> times;              ///< sample-clock times
    std::vector<State> states;
    std::vector<std::vector<double>> observables; ///< [time][observable]
    NoiseStream stream;
    std::optional<PathFailure> failure;
};

/// Number of steps and the shortened last step covering an interval of length `len`.
struct Segment {
    std::uint64_t steps = 0;
    double last = 0.0;
};
Segment segment(double len, double dt);

/// Integrates one path; samples at `sample_times` (sample clock, strictly
/// increasing, ≥ 0). Sample time t corresponds to original time t·time_scale().
template <PathModel M>
PathRecord<typename M::State> integrate_path(const M& model, const Clock& clock, const NoiseStream& stream,
                                             std::span<const double> sample_times, bool keep_states = true,
                                             bool check_every_step = false) {
    using State = typename M::State;
    PathRecord<State> rec;
    rec.stream = stream;
    const std::size_t k = model.noise_dimension();
    const std::size_t nobs = model.observable_names().size();
    const double dt = clock.step();
    const double scale = model.time_scale();
    std::vector<double> dw(k);
    std::uint64_t counter = 0;
    double prev = 0.0;

    const State s0 = model.initial_state(stream.at(kInitCounter));
    State s = s0;
    try {
        for (double ts : sample_times) {
            if (!(ts >= prev) || (!rec.times.empty() && !(ts > prev))) {
                throw std::invalid_argument("integrate_path: sample times must be strictly increasing and >= 0");
            }
            const Segment seg = segment((ts - prev) * scale, dt);
            for (std::uint64_t i = 0; i < seg.steps; ++i) {
                const double hstep = i + 1 == seg.steps ? seg.last : dt;
                if (k > 0) gauss_increments(stream.at(counter), hstep, dw);
                ++counter;
                model.step(s, dw, hstep);
                if (check_every_step) model.check_invariants(s);
            }
            prev = ts;
            model.check_invariants(s);
            rec.times.push_back(ts);
            std::vector<double> obs(nobs);
            model.observe(s, s0, obs);
            rec.observables.push_back(std::move(obs));
            if (keep_states) rec.states.push_back(s);
        }
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& e) {
        rec.failure = PathFailure{prev, e.what()};
    }
    return rec;
}

class BatchFailure : public std::runtime_error {
public:
    BatchFailure(std::uint64_t path, double time, const std::string& what)
        : std::runtime_error("path " + std::to_string(path) + " failed near t = " + std::to_string(time) + ": " + what),
          path_(path), time_(time) {}

    std::uint64_t path() const noexcept { return path_; }
    double time() const noexcept { return time_; }

private:
    std::uint64_t path_;
    double time_;
};

struct BatchResult {
    std::vector<double> times;
    std::vector<std::string> names;
    std::size_t paths = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t first_stream = 0;
    double epsilon = 0.0;
    std::vector<double> values; ///< [path][time][observable]

    double value(std::size_t path, std::size_t ti, std::size_t obs) const {
        return values[(path * times.size() + ti) * names.size() + obs];
    }
    /// All path values of one (time, observable) cell, in path order.
    std::vector<double> column(std::size_t ti, std::size_t obs) const;
    /// One estimate per (time, observable), time-major.
    std::vector<stats::ObservableEstimate> estimates() const;
};

/// Resolves a requested worker count: > 0 is taken as is, 0 falls back to
/// INTERTWINE_WORKERS, then to the hardware concurrency.
unsigned resolve_workers(unsigned requested);

/// Runs paths with stream ids first_stream .. first_stream + n − 1.
/// Throws BatchFailure for the lowest-indexed failing path.
template <PathModel M>
BatchResult integrate_batch(const M& model, std::size_t n_paths, const Clock& clock, std::uint64_t master_seed,
                            std::span<const double> sample_times, unsigned workers = 0,
                            std::uint64_t first_stream = 0) {
    if (n_paths < 1) throw std::invalid_argument("integrate_batch: need at least one path");
    BatchResult res;
    res.times.assign(sample_times.begin(), sample_times.end());
    res.names = model.observable_names();
    res.paths = n_paths;
    res.master_seed = master_seed;
    res.first_stream = first_stream;
    res.epsilon = clock.epsilon();
    const std::size_t stride = res.times.size() * res.names.size();
    res.values.assign(n_paths * stride, 0.0);

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> first_failed{std::numeric_limits<std::size_t>::max()};
    std::vector<std::optional<PathFailure>> failures(n_paths);

    auto work = [&] {
        for (;;) {
            const std::size_t p = next.fetch_add(1);
            if (p >= n_paths || p > first_failed.load()) return;
            const NoiseStream s{master_seed, first_stream + p, 0};
            auto rec = integrate_path(model, clock, s, sample_times, false);
            if (rec.failure) {
                failures[p] = rec.failure;
                std::size_t cur = first_failed.load();
                while (p < cur && !first_failed.compare_exchange_weak(cur, p)) {
                }
                continue;
            }
            double* dst = res.values.data() + p * stride;
            for (const auto& row : rec.observables) dst = std::copy(row.begin(), row.end(), dst);
        }
    };

    const unsigned w = std::min<std::size_t>(resolve_workers(workers), n_paths);
    if (w <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(w);
        for (unsigned i = 0; i < w; ++i) pool.emplace_back(work);
    }
    const std::size_t f = first_failed.load();
    if (f < n_paths) throw BatchFailure(first_stream + f, failures[f]->time, failures[f]->message);
    return res;
}

} // namespace intertwine::engine
