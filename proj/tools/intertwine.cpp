// intertwine: run, fit and replay multiscale SDE experiments.
//
//   intertwine simulate --config recipe.cfg [--seed S] [--paths N] [--out results.csv] [--workers W]
//   intertwine converge --config recipe.cfg [...]     ε sweep with rate fits against the oracles
//   intertwine haar     [--c2 C] [--c3 C] [--n N]     Haar-averaged coefficient tables
//   intertwine oracle   [--c2 C] [--c3 C] [--n N]     effective-rate oracles
//   intertwine replay   results.csv [--workers W]     bit-exact re-execution check

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "intertwine/errors.hpp"
#include "intertwine/experiment.hpp"
#include "intertwine/models/averaging.hpp"
#include "intertwine/models/kubo.hpp"

namespace io = intertwine::io;
namespace models = intertwine::models;

namespace {

struct RunFlags {
    std::string config;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    std::string out;
    unsigned workers = 0;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
    app->add_option("--config", f.config, "experiment configuration file")->required()->check(CLI::ExistingFile);
    app->add_option("--seed", f.seed, "master seed (overrides the file)");
    app->add_option("--paths", f.paths, "paths per epsilon (overrides the file)");
    app->add_option("--out", f.out, "CSV output path (overrides the file)");
    app->add_option("--workers", f.workers, "worker threads (default: INTERTWINE_WORKERS, then hardware)");
}

io::ExperimentConfig load(const RunFlags& f, const CLI::App* app) {
    io::ExperimentConfig cfg = io::load_config(f.config);
    if (app->count("--seed")) cfg.seed = f.seed;
    if (app->count("--paths")) cfg.paths = f.paths;
    if (app->count("--out")) cfg.output = f.out;
    if (app->count("--workers")) cfg.workers = f.workers;
    io::validate(cfg);
    return cfg;
}

int simulate(const RunFlags& f, const CLI::App* app) {
    const auto cfg = load(f, app);
    const auto out = io::run_experiment(cfg, cfg.output, cfg.workers);
    std::cout << "wrote " << out.rows.size() << " rows to " << cfg.output << " (config " << io::config_hash(cfg)
              << ")\n";
    if (out.failed) {
        std::cerr << "simulation failed: " << out.message << "\n";
        return 3;
    }
    return 0;
}

models::KuboSpec kubo_spec(const io::ExperimentConfig& cfg) {
    if (cfg.model == io::ModelKind::ou_geodesic) {
        auto s = models::KuboSpec::ou_geodesic(cfg.n, cfg.e0);
        s.a0 = intertwine::lie::so_basis(cfg.n).combine(cfg.a0).real();
        return s;
    }
    return models::KuboSpec::hopf(cfg.c2, cfg.c3);
}

int converge(const RunFlags& f, const CLI::App* app) {
    const auto cfg = load(f, app);
    if (cfg.times.size() < 4) throw std::invalid_argument("converge needs at least 4 sample times");
    if (cfg.model == io::ModelKind::heisenberg) throw std::invalid_argument("converge applies to sphere-valued models");
    const auto out = io::run_experiment(cfg, cfg.output, cfg.workers);
    if (out.failed) {
        std::cerr << "simulation failed: " << out.message << "\n";
        return 3;
    }
    const int dim = (cfg.model == io::ModelKind::ou_geodesic || cfg.model == io::ModelKind::rotinv) ? cfg.n : 2;
    std::printf("%-10s %-12s %-10s\n", "epsilon", "rate(P1)", "fit-se");
    for (const auto& r : io::fit_rates(out.rows)) {
        std::printf("%-10s %-12.6f %-10.6f\n", io::format_double(r.epsilon).c_str(), r.fit.rate, r.fit.se);
    }
    if (cfg.model == io::ModelKind::rotinv) {
        std::printf("reference (c = 1/2): P1 decay %.6f\n", 0.5 * dim);
        return 0;
    }
    const auto spec = kubo_spec(cfg);
    const auto kubo = models::kubo_effective_rate(spec);
    const auto paper = models::paper_effective_rate(spec);
    std::printf("kubo  (%s): c = %.6f, P1 decay %.6f\n", kubo.method.c_str(), kubo.c, kubo.decay_rate(1, dim));
    std::printf("paper (%s): c = %.6f, P1 decay %.6f\n", paper.method.c_str(), paper.c, paper.decay_rate(1, dim));
    return 0;
}

int haar(double c2, double c3, int n) {
    const auto h = models::averaged_coefficients(models::AveragingSpec::hopf(c2, c3));
    std::printf("hopf Y0 = %g X2 + %g X3 (%s)\n", c2, c3, h.method.c_str());
    std::printf("  a22 = %.15g  a23 = %.3e  a33 = %.15g\n", h.a(0, 0), h.a(0, 1), h.a(1, 1));
    std::printf("  b2 = %.3e  b3 = %.3e\n", h.b(0), h.b(1));
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(n);
    e0(0) = 1.0;
    const auto fr = models::averaged_coefficients(models::AveragingSpec::frame(n, e0));
    std::printf("frame SO(%d), e0 = e1 (%s)\n", n, fr.method.c_str());
    for (int i = 0; i < n; ++i) {
        std::printf(" ");
        for (int j = 0; j < n; ++j) std::printf(" %10.6f", fr.a(i, j));
        if (fr.method == "monte-carlo") std::printf("   (se %.1e)", fr.a_se(i, i));
        std::printf("\n");
    }
    return 0;
}

int oracle(double c2, double c3, int n, bool mc) {
    auto show = [&](const char* label, models::KuboSpec spec, int dim) {
        for (const auto& r : {models::kubo_effective_rate(spec), models::quadrature_effective_rate(spec),
                              models::paper_effective_rate(spec)}) {
            std::printf("%-12s %-10s %-16s c = %-10.6f P1 decay = %-10.6f", label, models::to_string(r.source).c_str(),
                        r.method.c_str(), r.c, r.decay_rate(1, dim));
            if (r.se > 0) std::printf(" se = %.2e", r.se);
            std::printf("\n");
        }
        if (mc) {
            spec.method = models::KuboSpec::Method::monte_carlo;
            const auto r = models::kubo_effective_rate(spec);
            std::printf("%-12s %-10s %-16s c = %-10.6f P1 decay = %-10.6f se = %.2e\n", label, "kubo", r.method.c_str(),
                        r.c, r.decay_rate(1, dim), r.se);
        }
    };
    show("hopf", models::KuboSpec::hopf(c2, c3), 2);
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(n);
    e0(0) = 1.0;
    show("ou-geodesic", models::KuboSpec::ou_geodesic(n, e0), n);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"intertwine: multiscale SDE simulator and verifier"};
    app.require_subcommand(1);

    RunFlags sim_flags, conv_flags;
    auto* sim = app.add_subcommand("simulate", "run an experiment and write CSV + JSON sidecar");
    add_run_flags(sim, sim_flags);
    auto* conv = app.add_subcommand("converge", "epsilon sweep with rate fits against the oracles");
    add_run_flags(conv, conv_flags);

    double c2 = 1.0, c3 = 0.0;
    int n = 2;
    bool mc = false;
    auto* hr = app.add_subcommand("haar", "Haar-averaged coefficient tables");
    hr->add_option("--c2", c2, "Y0 coefficient of X2");
    hr->add_option("--c3", c3, "Y0 coefficient of X3");
    hr->add_option("--n", n, "sphere dimension for the frame table")->check(CLI::Range(2, 6));
    auto* orc = app.add_subcommand("oracle", "effective-rate oracles");
    orc->add_option("--c2", c2, "Y0 coefficient of X2");
    orc->add_option("--c3", c3, "Y0 coefficient of X3");
    orc->add_option("--n", n, "sphere dimension for the OU-geodesic model")->check(CLI::Range(2, 6));
    orc->add_flag("--monte-carlo", mc, "also evaluate the Monte Carlo Green-Kubo route");

    std::string csv;
    unsigned replay_workers = 0;
    auto* rep = app.add_subcommand("replay", "re-execute from the sidecar and compare bit-exactly");
    rep->add_option("csv", csv, "results CSV (sidecar expected at <csv>.json)")->required();
    rep->add_option("--workers", replay_workers, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return simulate(sim_flags, sim);
        if (conv->parsed()) return converge(conv_flags, conv);
        if (hr->parsed()) return haar(c2, c3, n);
        if (orc->parsed()) return oracle(c2, c3, n, mc);
        if (rep->parsed()) {
            const auto r = io::replay(csv, replay_workers);
            if (r.pass) {
                std::cout << "replay pass: " << r.message << "\n";
                return 0;
            }
            std::cout << "replay FAIL: " << r.message << "\n  expected: " << r.expected << "\n  found:    " << r.actual
                      << "\n";
            return 4;
        }
    } catch (const intertwine::parse_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
