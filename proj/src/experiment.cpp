#include "intertwine/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "intertwine/errors.hpp"
#include "intertwine/lie.hpp"
#include "intertwine/models/frame.hpp"
#include "intertwine/models/heisenberg.hpp"
#include "intertwine/models/hopf.hpp"

namespace intertwine::io {

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kFormat = "intertwine-results/1";

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto p = s.find(sep, start);
        out.push_back(trim(std::string_view(s).substr(start, p == std::string::npos ? std::string::npos : p - start)));
        if (p == std::string::npos) break;
        start = p + 1;
    }
    return out;
}

std::optional<double> to_double(const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::uint64_t> to_u64(const std::string& s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {"model", "epsilon",   "T",        "seed",  "h",  "paths",
                                                  "times", "observables", "output", "c2",    "c3", "n",
                                                  "e0",    "a0",        "sigma",    "fast_init", "vertical", "workers"};
    return keys;
}

std::optional<ModelKind> model_from(const std::string& s) {
    if (s == "hopf-full") return ModelKind::hopf_full;
    if (s == "hopf-reduced") return ModelKind::hopf_reduced;
    if (s == "heisenberg") return ModelKind::heisenberg;
    if (s == "ou-geodesic") return ModelKind::ou_geodesic;
    if (s == "rotinv") return ModelKind::rotinv;
    return std::nullopt;
}

bool is_frame(ModelKind k) { return k == ModelKind::ou_geodesic || k == ModelKind::rotinv; }
bool is_hopf(ModelKind k) { return k == ModelKind::hopf_full || k == ModelKind::hopf_reduced; }

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    return out;
}

std::string join(const Eigen::VectorXd& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v(i));
    return out;
}

std::string join(const std::vector<double>& v) {
    return join(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()))));
}

using Reporter = std::function<void(const std::string& key, const std::string& msg)>;

void apply_defaults(ExperimentConfig& c) {
    if (c.times.empty()) {
        for (int i = 1; i <= 5; ++i) c.times.push_back(c.T * i / 5.0);
    }
    if (c.observables.empty()) c.observables = model_observables(c);
    if (is_frame(c.model) && c.e0.size() == 0) {
        c.e0 = Eigen::VectorXd::Zero(c.n);
        if (c.model == ModelKind::ou_geodesic) c.e0(0) = 1.0;
    }
    const int m = c.n * (c.n - 1) / 2;
    if (c.model == ModelKind::ou_geodesic && c.a0.size() == 0) c.a0 = Eigen::VectorXd::Zero(m);
    if (c.model == ModelKind::rotinv && c.sigma.size() == 0) {
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m, m);
        c.sigma = Eigen::Map<const Eigen::VectorXd>(id.data(), m * m);
    }
}

void check(const ExperimentConfig& c, const Reporter& fail) {
    if (c.epsilons.empty()) fail("epsilon", "at least one epsilon is required");
    for (double e : c.epsilons) {
        if (!(e > 0.0)) fail("epsilon", "invariant violated: epsilon > 0 (got " + format_double(e) + ")");
    }
    if (!(c.T > 0.0)) fail("T", "invariant violated: T > 0");
    if (!(c.h > 0.0) || c.h > engine::kMaxBaseStep) {
        fail("h", "invariant violated: h*epsilon <= epsilon/20, i.e. 0 < h <= 0.05 (got " + format_double(c.h) + ")");
    }
    if (c.paths < 1) fail("paths", "invariant violated: paths >= 1");
    double prev = 0.0;
    for (double t : c.times) {
        if (!(t > prev)) fail("times", "sample times must be positive and strictly increasing");
        if (t > c.T * (1.0 + 1e-12)) fail("times", "sample time " + format_double(t) + " exceeds T");
        prev = t;
    }
    const auto names = model_observables(c);
    for (std::size_t i = 0; i < c.observables.size(); ++i) {
        if (std::find(names.begin(), names.end(), c.observables[i]) == names.end()) {
            fail("observables", "unknown observable '" + c.observables[i] + "' for model " + to_string(c.model));
        }
        if (std::find(c.observables.begin(), c.observables.begin() + i, c.observables[i]) != c.observables.begin() + i) {
            fail("observables", "duplicate observable '" + c.observables[i] + "'");
        }
    }
    if (is_hopf(c.model) && c.c2 == 0.0 && c.c3 == 0.0) {
        fail("c2", "invariant violated: (c2, c3) != (0, 0) (hypoellipticity)");
    }
    if (is_frame(c.model)) {
        if (c.n != 2 && c.n != 3) fail("n", "sphere dimension must be 2 or 3");
        if (c.e0.size() != c.n) fail("e0", "e0 must have n components");
        if (c.model == ModelKind::ou_geodesic && !(std::abs(c.e0.norm() - 1.0) <= 1e-12)) {
            fail("e0", "invariant violated: |e0| = 1");
        }
        const int m = c.n * (c.n - 1) / 2;
        if (c.model == ModelKind::ou_geodesic && c.a0.size() != m) fail("a0", "a0 needs n(n-1)/2 coordinates");
        if (c.model == ModelKind::rotinv && c.sigma.size() != m * m) fail("sigma", "sigma needs m*m entries");
    }
}

engine::BatchResult dispatch(const ExperimentConfig& c, double eps, unsigned workers) {
    const engine::Clock clock(c.h, eps);
    const models::FastInit init = c.haar_init ? models::FastInit::haar : models::FastInit::identity;
    auto run = [&](const auto& model) {
        return engine::integrate_batch(model, c.paths, clock, c.seed, c.times, workers, 0);
    };
    switch (c.model) {
    case ModelKind::hopf_full:
    case ModelKind::hopf_reduced: {
        models::HopfConfig h;
        h.c2 = c.c2;
        h.c3 = c.c3;
        h.epsilon = eps;
        h.mode = c.model == ModelKind::hopf_full ? models::HopfMode::full : models::HopfMode::reduced;
        h.fast_init = init;
        return run(models::HopfModel(h));
    }
    case ModelKind::heisenberg: return run(models::HeisenbergModel({eps, c.vertical}));
    case ModelKind::ou_geodesic: {
        models::OUGeodesicConfig o;
        o.n = c.n;
        o.e0 = c.e0;
        o.epsilon = eps;
        o.fast_init = init;
        o.a0 = lie::OrthonormalBasis(lie::so_basis(c.n)).combine(c.a0).real();
        if (c.n == 2) return run(models::OUGeodesic<2>(o));
        return run(models::OUGeodesic<3>(o));
    }
    case ModelKind::rotinv: {
        models::RotInvConfig r;
        r.n = c.n;
        r.e0 = c.e0;
        r.epsilon = eps;
        r.fast_init = init;
        const int m = c.n * (c.n - 1) / 2;
        r.sigma = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            c.sigma.data(), m, m);
        if (c.n == 2) return run(models::RotInv<2>(r));
        return run(models::RotInv<3>(r));
    }
    }
    throw std::logic_error("unreachable model kind");
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string sanitize(std::string s) {
    for (char& ch : s) {
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    }
    return s;
}

} // namespace

std::string to_string(ModelKind k) {
    switch (k) {
    case ModelKind::hopf_full: return "hopf-full";
    case ModelKind::hopf_reduced: return "hopf-reduced";
    case ModelKind::heisenberg: return "heisenberg";
    case ModelKind::ou_geodesic: return "ou-geodesic";
    case ModelKind::rotinv: return "rotinv";
    }
    return "?";
}

std::vector<std::string> model_observables(const ExperimentConfig& cfg) {
    if (is_hopf(cfg.model)) return {"P1", "P2", "cos_g"};
    if (cfg.model == ModelKind::heisenberg) return models::HeisenbergModel({1.0, true}).observable_names();
    return {"P1", "P2"};
}

ExperimentConfig parse_config(std::string_view text) {
    struct Entry {
        std::string value;
        std::size_t line;
    };
    std::map<std::string, Entry> entries;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++lineno;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw parse_error(lineno, "expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw parse_error(lineno, "missing key");
        if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
            throw parse_error(lineno, "unknown key '" + key + "'");
        }
        if (entries.count(key)) {
            throw parse_error(lineno, "duplicate key '" + key + "' (first set on line " +
                                          std::to_string(entries[key].line) + ")");
        }
        if (value.empty()) throw parse_error(lineno, "empty value for '" + key + "'");
        entries[key] = {value, lineno};
    }
    const std::size_t end_line = lineno;

    auto line_of = [&](const std::string& key) { return entries.count(key) ? entries[key].line : end_line; };
    auto bad = [&](const std::string& key, const std::string& msg) -> void { throw parse_error(line_of(key), msg); };
    auto num = [&](const std::string& key) {
        const auto v = to_double(entries[key].value);
        if (!v) bad(key, "malformed number for '" + key + "': " + entries[key].value);
        return *v;
    };
    auto nums = [&](const std::string& key) {
        std::vector<double> out;
        for (const auto& item : split(entries[key].value, ',')) {
            const auto v = to_double(item);
            if (!v) bad(key, "malformed number in '" + key + "': " + item);
            out.push_back(*v);
        }
        return out;
    };
    auto vec = [&](const std::string& key) {
        const auto v = nums(key);
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    auto integer = [&](const std::string& key) {
        const auto v = to_u64(entries[key].value);
        if (!v) bad(key, "malformed unsigned integer for '" + key + "': " + entries[key].value);
        return *v;
    };
    auto boolean = [&](const std::string& key) {
        const std::string& v = entries[key].value;
        if (v == "true" || v == "on" || v == "1") return true;
        if (v == "false" || v == "off" || v == "0") return false;
        bad(key, "expected true or false for '" + key + "'");
        return false;
    };

    for (const char* req : {"model", "epsilon", "T", "seed"}) {
        if (!entries.count(req)) bad(req, std::string("missing required key '") + req + "'");
    }

    ExperimentConfig c;
    const auto kind = model_from(entries["model"].value);
    if (!kind) bad("model", "unknown model '" + entries["model"].value + "'");
    c.model = *kind;
    c.epsilons = nums("epsilon");
    c.T = num("T");
    c.seed = integer("seed");
    if (entries.count("h")) c.h = num("h");
    if (entries.count("paths")) c.paths = integer("paths");
    if (entries.count("times")) c.times = nums("times");
    if (entries.count("observables")) c.observables = split(entries["observables"].value, ',');
    if (entries.count("output")) c.output = entries["output"].value;
    if (entries.count("c2")) c.c2 = num("c2");
    if (entries.count("c3")) c.c3 = num("c3");
    if (entries.count("n")) c.n = static_cast<int>(std::min<std::uint64_t>(integer("n"), 1000));
    if (entries.count("e0")) c.e0 = vec("e0");
    if (entries.count("a0")) c.a0 = vec("a0");
    if (entries.count("sigma")) c.sigma = vec("sigma");
    if (entries.count("fast_init")) {
        const auto& v = entries["fast_init"].value;
        if (v != "haar" && v != "identity") bad("fast_init", "fast_init must be haar or identity");
        c.haar_init = v == "haar";
    }
    if (entries.count("vertical")) c.vertical = boolean("vertical");
    if (entries.count("workers")) c.workers = static_cast<unsigned>(std::min<std::uint64_t>(integer("workers"), 4096));

    // Keys that do not apply to the chosen model are rejected so configs stay unambiguous.
    auto only_for = [&](const char* key, bool ok) {
        if (entries.count(key) && !ok) bad(key, std::string("key '") + key + "' does not apply to model " + to_string(c.model));
    };
    only_for("c2", is_hopf(c.model));
    only_for("c3", is_hopf(c.model));
    only_for("n", is_frame(c.model));
    only_for("e0", is_frame(c.model));
    only_for("a0", c.model == ModelKind::ou_geodesic);
    only_for("sigma", c.model == ModelKind::rotinv);
    only_for("fast_init", c.model != ModelKind::heisenberg);
    only_for("vertical", c.model == ModelKind::heisenberg);

    if (is_frame(c.model) && c.n != 2 && c.n != 3) bad("n", "sphere dimension must be 2 or 3");
    apply_defaults(c);
    check(c, bad);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate(const ExperimentConfig& cfg) {
    check(cfg, [](const std::string& key, const std::string& msg) {
        throw std::invalid_argument(key + ": " + msg);
    });
}

std::string canonical_text(const ExperimentConfig& c) {
    std::string out;
    auto put = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
    put("model", to_string(c.model));
    put("epsilon", join(c.epsilons));
    put("T", format_double(c.T));
    put("h", format_double(c.h));
    put("paths", std::to_string(c.paths));
    put("seed", std::to_string(c.seed));
    put("times", join(c.times));
    put("observables", join(c.observables));
    if (is_hopf(c.model)) {
        put("c2", format_double(c.c2));
        put("c3", format_double(c.c3));
    }
    if (c.model == ModelKind::heisenberg) put("vertical", c.vertical ? "true" : "false");
    if (is_frame(c.model)) {
        put("n", std::to_string(c.n));
        put("e0", join(c.e0));
    }
    if (c.model == ModelKind::ou_geodesic) put("a0", join(c.a0));
    if (c.model == ModelKind::rotinv) put("sigma", join(c.sigma));
    if (c.model != ModelKind::heisenberg) put("fast_init", c.haar_init ? "haar" : "identity");
    return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical_text(cfg))));
    return buf;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string format_row(const ResultRow& r) {
    return r.model + "," + format_double(r.epsilon) + "," + format_double(r.t) + "," + r.observable + "," +
           format_double(r.mean) + "," + format_double(r.se) + "," + std::to_string(r.n) + "," +
           std::to_string(r.seed) + "," + r.config_hash;
}

engine::BatchResult run_batch(const ExperimentConfig& cfg, double epsilon, unsigned workers) {
    return dispatch(cfg, epsilon, workers);
}

RunOutcome compute_rows(const ExperimentConfig& cfg, unsigned workers) {
    validate(cfg);
    RunOutcome out;
    const std::string hash = config_hash(cfg);
    const std::string model = to_string(cfg.model);
    for (double eps : cfg.epsilons) {
        try {
            const auto batch = dispatch(cfg, eps, workers);
            const auto est = batch.estimates();
            for (const auto& e : est) {
                if (std::find(cfg.observables.begin(), cfg.observables.end(), e.name) == cfg.observables.end()) continue;
                out.rows.push_back({model, eps, e.t, e.name, e.mean, e.se, e.count, cfg.seed, hash});
            }
        } catch (const engine::BatchFailure& f) {
            out.failed = true;
            out.message = "epsilon " + format_double(eps) + ": " + f.what();
            out.rows.push_back({"FAILED", eps, f.time(), sanitize(f.what()), std::nan(""), std::nan(""), 0, cfg.seed, hash});
            break;
        }
    }
    return out;
}

std::string sidecar_path(const std::string& csv_path) { return csv_path + ".json"; }

namespace {

std::string expected_text(const RunOutcome& out, const ExperimentConfig&) {
    std::string s = std::string(kCsvHeader) + "\n";
    for (const auto& r : out.rows) s += format_row(r) + "\n";
    return s;
}

nlohmann::json sidecar(const ExperimentConfig& cfg, const RunOutcome& out, unsigned workers) {
    nlohmann::json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    j["compiler"] = __VERSION__;
    j["config_hash"] = config_hash(cfg);
    j["canonical_config"] = canonical_text(cfg);
    nlohmann::json kv = nlohmann::json::object();
    std::istringstream lines(canonical_text(cfg));
    for (std::string line; std::getline(lines, line);) {
        const auto eq = line.find(" = ");
        kv[line.substr(0, eq)] = line.substr(eq + 3);
    }
    kv["output"] = cfg.output;
    j["config"] = kv;
    j["workers"] = engine::resolve_workers(workers);
    j["rows"] = out.rows.size();
    j["failed"] = out.failed;
    if (out.failed) j["failure"] = out.message;
    nlohmann::json streams = nlohmann::json::array();
    for (double eps : cfg.epsilons) {
        streams.push_back({{"epsilon", format_double(eps)},
                           {"master_seed", cfg.seed},
                           {"first_stream", 0},
                           {"stream_count", cfg.paths}});
    }
    j["streams"] = streams;
    return j;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write to " + path + " failed");
}

std::string read_file(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(std::string("missing ") + what + ": " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

} // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg, const std::string& csv_path, unsigned workers) {
    RunOutcome out = compute_rows(cfg, workers);
    write_file(csv_path, expected_text(out, cfg));
    write_file(sidecar_path(csv_path), sidecar(cfg, out, workers).dump(2) + "\n");
    return out;
}

ReplayReport replay(const std::string& csv_path, unsigned workers) {
    const std::string csv = read_file(csv_path, "results file");
    const std::string side = read_file(sidecar_path(csv_path), "sidecar");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(side);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed sidecar " + sidecar_path(csv_path) + ": " + e.what());
    }
    if (!j.contains("canonical_config") || !j["canonical_config"].is_string()) {
        throw std::runtime_error("sidecar lacks canonical_config");
    }
    const ExperimentConfig cfg = parse_config(j["canonical_config"].get<std::string>());
    const RunOutcome out = compute_rows(cfg, workers);
    const auto want = lines_of(expected_text(out, cfg));
    const auto have = lines_of(csv);

    ReplayReport rep;
    const std::size_t n = std::max(want.size(), have.size());
    for (std::size_t i = 0; i < n; ++i) {
        const std::string w = i < want.size() ? want[i] : "<no row>";
        const std::string h = i < have.size() ? have[i] : "<no row>";
        if (w != h) {
            rep.first_mismatch = i + 1;
            rep.expected = w;
            rep.actual = h;
            rep.rows_checked = i;
            rep.message = "mismatch at line " + std::to_string(i + 1);
            return rep;
        }
    }
    rep.pass = true;
    rep.rows_checked = want.size() > 0 ? want.size() - 1 : 0;
    rep.message = "all " + std::to_string(rep.rows_checked) + " rows reproduced bit-exactly";
    return rep;
}

std::vector<RateRow> fit_rates(const std::vector<ResultRow>& rows, const std::string& observable) {
    std::vector<RateRow> out;
    std::map<double, std::vector<stats::ObservableEstimate>> by_eps;
    std::vector<double> order;
    for (const auto& r : rows) {
        if (r.observable != observable || r.model == "FAILED") continue;
        if (!by_eps.count(r.epsilon)) order.push_back(r.epsilon);
        stats::ObservableEstimate e;
        e.name = r.observable;
        e.t = r.t;
        e.mean = r.mean;
        e.se = r.se;
        e.count = r.n;
        e.epsilon = r.epsilon;
        by_eps[r.epsilon].push_back(e);
    }
    for (double eps : order) out.push_back({eps, stats::rate_fit(by_eps[eps])});
    return out;
}

} // namespace intertwine::io
