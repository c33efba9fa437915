#include "intertwine/engine.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace intertwine::engine {

using lie::CMatrix;

Clock::Clock(double base_step, double epsilon) : h_(base_step), eps_(epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("clock: epsilon must be positive");
    if (!(base_step > 0.0) || base_step > kMaxBaseStep) {
        throw std::invalid_argument("clock: effective step h*epsilon must not exceed epsilon/20");
    }
}

Segment segment(double len, double dt) {
    if (!(len >= 0.0)) throw std::invalid_argument("segment: negative length");
    if (len == 0.0) return {0, 0.0};
    // A relative slack keeps t = k·dt from spawning a spurious tiny step.
    auto steps = static_cast<std::uint64_t>(std::ceil(len / dt * (1.0 - 1e-12)));
    if (steps == 0) steps = 1;
    return {steps, len - static_cast<double>(steps - 1) * dt};
}

namespace {

AlgebraElement increment(const AlgebraElement& drift, std::span<const AlgebraElement> diffusions,
                         std::span<const double> dw, double h) {
    if (diffusions.size() != dw.size()) throw std::invalid_argument("step: one increment per diffusion field");
    CMatrix m = drift.entries() * h;
    for (std::size_t k = 0; k < diffusions.size(); ++k) {
        if (!(diffusions[k].tag() == drift.tag())) throw std::invalid_argument("step: mixed algebras");
        m += diffusions[k].entries() * dw[k];
    }
    if (!m.allFinite()) throw numeric_domain_error("step: non-finite increment");
    return AlgebraElement(drift.tag(), m);
}

GroupElement advance(const GroupElement& u, const AlgebraElement& inc) {
    if (!(lie::group_of(inc.tag()) == u.tag())) throw std::invalid_argument("step: algebra does not match group");
    return lie::reproject(u.entries() * lie::expm(inc).entries(), u.tag());
}

void check_finite(const Coefficients& c) {
    bool ok = c.drift.entries().allFinite();
    for (const auto& d : c.diffusions) ok = ok && d.entries().allFinite();
    if (!ok) throw numeric_domain_error("heun_group_step: non-finite coefficient");
}

} // namespace

GroupElement exp_euler_step(const GroupElement& u, const AlgebraElement& drift,
                            std::span<const AlgebraElement> diffusions, std::span<const double> dw, double h) {
    return advance(u, increment(drift, diffusions, dw, h));
}

GroupElement heun_group_step(const GroupElement& u, const CoefficientField& sigma, std::span<const double> dw,
                             double h) {
    const Coefficients c0 = sigma(u);
    check_finite(c0);
    const GroupElement pred = exp_euler_step(u, c0.drift, c0.diffusions, dw, h);
    const Coefficients c1 = sigma(pred);
    check_finite(c1);
    if (c1.diffusions.size() != c0.diffusions.size()) throw std::invalid_argument("heun_group_step: field count changed");
    std::vector<AlgebraElement> mid;
    mid.reserve(c0.diffusions.size());
    for (std::size_t k = 0; k < c0.diffusions.size(); ++k) mid.push_back(0.5 * (c0.diffusions[k] + c1.diffusions[k]));
    return exp_euler_step(u, 0.5 * (c0.drift + c1.drift), mid, dw, h);
}

std::vector<double> BatchResult::column(std::size_t ti, std::size_t obs) const {
    std::vector<double> out(paths);
    for (std::size_t p = 0; p < paths; ++p) out[p] = value(p, ti, obs);
    return out;
}

std::vector<stats::ObservableEstimate> BatchResult::estimates() const {
    std::vector<stats::ObservableEstimate> out;
    out.reserve(times.size() * names.size());
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        for (std::size_t j = 0; j < names.size(); ++j) {
            const auto col = column(ti, j);
            auto e = stats::estimate(names[j], times[ti], col);
            e.epsilon = epsilon;
            e.master_seed = master_seed;
            e.first_stream = first_stream;
            out.push_back(std::move(e));
        }
    }
    return out;
}

unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("INTERTWINE_WORKERS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v < 4096) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

} // namespace intertwine::engine
