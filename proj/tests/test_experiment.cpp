#include <doctest.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "intertwine/errors.hpp"
#include "intertwine/experiment.hpp"

using namespace intertwine;
using namespace intertwine::io;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = "model = hopf-reduced\nepsilon = 0.1, 0.05\nT = 0.5\nseed = 7\n";

std::size_t error_line(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const parse_error& e) {
        return e.line();
    }
    return 0;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("intertwine_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ExperimentConfig small_config() {
    auto cfg = parse_config("model = heisenberg\nepsilon = 0.5, 0.25\nT = 0.25\nseed = 3\npaths = 40\n"
                            "observables = x2, area\n");
    return cfg;
}

} // namespace

TEST_CASE("minimal configuration takes the documented defaults") {
    const auto c = parse_config(kMinimal);
    CHECK(c.model == ModelKind::hopf_reduced);
    CHECK(c.epsilons == std::vector<double>{0.1, 0.05});
    CHECK(c.h == 0.05);
    CHECK(c.paths == 1000);
    CHECK(c.output == "results.csv");
    REQUIRE(c.times.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(c.times[i] == doctest::Approx(0.1 * (i + 1)));
    CHECK(c.observables == std::vector<std::string>{"P1", "P2", "cos_g"});
    CHECK(c.c2 == 1.0);
    CHECK(c.c3 == 0.0);
    CHECK(c.haar_init);
    CHECK_NOTHROW(validate(c));
}

TEST_CASE("comments, blank lines and whitespace are ignored") {
    const auto c = parse_config("# sweep\n\n  model=ou-geodesic   \nepsilon = 0.1 # one value\nT=1\nseed = 2\nn = 3\n"
                                "e0 = 0, 0, 1\na0 = 0.5, 0, 0\n");
    CHECK(c.model == ModelKind::ou_geodesic);
    CHECK(c.n == 3);
    CHECK(c.e0(2) == 1.0);
    CHECK(c.a0.size() == 3);
}

TEST_CASE("parse errors carry the offending line") {
    CHECK(error_line("model = hopf-reduced\nepsilon = -1\nT = 1\nseed = 1\n") == 2);
    CHECK(error_line("model = hopf-reduced\nepsilon = 0.1\nT = 1\nseed = 1\nseed = 2\n") == 5);
    CHECK(error_line("model = hopf-reduced\nepsilon = 0.1\nT = 1\nseed = 1\nbogus = 3\n") == 5);
    CHECK(error_line("model = hopf-reduced\nepsilon = 0.1\nT = one\nseed = 1\n") == 3);
    CHECK(error_line("model = hopf-reduced\nepsilon = 0.1\nT = 1\nseed = 1\nh = 0.1\n") == 5);
    CHECK(error_line("model = hopf-reduced\nepsilon = 0.1\nT = 1\nseed = 1\npaths = 0\n") == 5);
    CHECK(error_line("model = hopf-reduced\nepsilon = 0.1\nT = 1\nseed = 1\ntimes = 0.5, 0.2\n") == 5);
    CHECK(error_line("model = hopf-reduced\nepsilon = 0.1\nT = 1\nseed = 1\ntimes = 2\n") == 5);
    CHECK(error_line("model = hopf-reduced\nepsilon = 0.1\nT = 1\nseed = 1\nobservables = x2\n") == 5);
    CHECK(error_line("model = hopf-reduced\nepsilon = 0.1\nT = 1\nseed = 1\nc2 = 0\nc3 = 0\n") == 5);
    CHECK(error_line("model = hopf-reduced\nepsilon = 0.1\nT = 1\nseed = 1\nn = 3\n") == 5);
    CHECK(error_line("model = teapot\nepsilon = 0.1\nT = 1\nseed = 1\n") == 1);
    CHECK(error_line("model = hopf-reduced\nepsilon = 0.1\nT = 1\nseed\n") == 4);
    CHECK(error_line("model = hopf-reduced\nepsilon =\nT = 1\nseed = 1\n") == 2);
    CHECK(error_line("model = ou-geodesic\nepsilon = 0.1\nT = 1\nseed = 1\ne0 = 1, 1\n") == 5);
    CHECK(error_line("model = ou-geodesic\nepsilon = 0.1\nT = 1\nseed = 1\nn = 4\n") == 5);
    CHECK(error_line("model = rotinv\nepsilon = 0.1\nT = 1\nseed = 1\nsigma = 1, 2\n") == 5);
    // a missing required key points past the last line
    CHECK(error_line("model = hopf-reduced\nepsilon = 0.1\nT = 1\n") == 4);

    try {
        (void)parse_config("model = hopf-reduced\nepsilon = -1\nT = 1\nseed = 1\n");
    } catch (const parse_error& e) {
        CHECK(std::string(e.what()).find("epsilon > 0") != std::string::npos);
    }
}

TEST_CASE("canonical text and hash") {
    const auto a = parse_config(kMinimal);
    const auto b = parse_config(canonical_text(a));
    CHECK(canonical_text(a) == canonical_text(b));
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);

    auto c = a;
    c.output = "elsewhere.csv";
    c.workers = 7;
    CHECK(config_hash(c) == config_hash(a));
    c.seed = 8;
    CHECK(config_hash(c) != config_hash(a));
}

TEST_CASE("doubles are written in shortest round-trip form") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ud(-1e6, 1e6);
    for (int i = 0; i < 10000; ++i) {
        const double x = ud(rng) * std::pow(10.0, double(i % 21) - 10.0);
        const std::string s = format_double(x);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        REQUIRE(back == x);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("runs write a CSV and a sidecar and are reproducible") {
    const fs::path dir = scratch("run");
    const auto cfg = small_config();
    const std::string csv = (dir / "out.csv").string();
    const auto res = run_experiment(cfg, csv, 1);
    REQUIRE(!res.failed);
    CHECK(res.rows.size() == 2 * 5 * 2);

    const std::string text = slurp(csv);
    CHECK(text.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
    std::size_t lines = 0;
    for (char ch : text) lines += ch == '\n';
    CHECK(lines == 1 + res.rows.size());

    const auto side = nlohmann::json::parse(slurp(sidecar_path(csv)));
    CHECK(side["config_hash"] == config_hash(cfg));
    CHECK(side["canonical_config"] == canonical_text(cfg));
    CHECK(side["streams"].size() == 2);

    // byte-identical on a rerun and with another worker count
    const std::string csv2 = (dir / "out2.csv").string();
    run_experiment(cfg, csv2, 3);
    CHECK(slurp(csv2) == text);

    // every ε uses the same stream ids
    for (const auto& r : res.rows) {
        CHECK(r.n == 40);
        CHECK(r.seed == 3);
    }
}

TEST_CASE("replay") {
    const fs::path dir = scratch("replay");
    const auto cfg = small_config();
    const std::string csv = (dir / "r.csv").string();
    run_experiment(cfg, csv, 1);

    auto rep = replay(csv, 2);
    CHECK(rep.pass);
    CHECK(rep.rows_checked == 20);

    // perturb one mean in the last digit
    std::string text = slurp(csv);
    std::vector<std::string> lines;
    std::stringstream ss(text);
    for (std::string l; std::getline(ss, l);) lines.push_back(l);
    const std::size_t target = 6; // 1-based line
    std::vector<std::string> fields;
    std::stringstream ls(lines[target - 1]);
    for (std::string f; std::getline(ls, f, ',');) fields.push_back(f);
    fields[4] = format_double(std::nextafter(std::stod(fields[4]), 1e300));
    std::string edited;
    for (std::size_t i = 0; i < fields.size(); ++i) edited += (i ? "," : "") + fields[i];
    lines[target - 1] = edited;
    std::ofstream out(csv, std::ios::binary | std::ios::trunc);
    for (const auto& l : lines) out << l << "\n";
    out.close();

    rep = replay(csv, 1);
    CHECK(!rep.pass);
    REQUIRE(rep.first_mismatch);
    CHECK(*rep.first_mismatch == target);
    CHECK(rep.actual == edited);
    CHECK(rep.expected != edited);

    fs::remove(sidecar_path(csv));
    CHECK_THROWS_AS(replay(csv, 1), std::runtime_error);
    CHECK_THROWS_AS(replay((dir / "missing.csv").string(), 1), std::runtime_error);
}

TEST_CASE("rate fits from computed rows") {
    auto cfg = parse_config("model = ou-geodesic\nepsilon = 0.05\nT = 0.4\nseed = 11\npaths = 300\n");
    const auto out = compute_rows(cfg, 1);
    const auto rates = fit_rates(out.rows);
    REQUIRE(rates.size() == 1);
    CHECK(rates[0].epsilon == 0.05);
    CHECK(rates[0].fit.rate > 0.0);
    CHECK(rates[0].fit.se > 0.0);
}

TEST_CASE("every model runs through the batch driver") {
    for (const char* text :
         {"model = hopf-full\nepsilon = 0.2\nT = 0.1\nseed = 1\npaths = 4\n",
          "model = hopf-reduced\nepsilon = 0.2\nT = 0.1\nseed = 1\npaths = 4\nfast_init = identity\n",
          "model = heisenberg\nepsilon = 0.2\nT = 0.1\nseed = 1\npaths = 4\nvertical = false\n",
          "model = ou-geodesic\nepsilon = 0.2\nT = 0.1\nseed = 1\npaths = 4\nn = 3\ne0 = 0, 1, 0\n",
          "model = rotinv\nepsilon = 0.2\nT = 0.1\nseed = 1\npaths = 4\nn = 3\ne0 = 0.1, 0, 0\n"
          "sigma = 1, 0, 0, 0, 2, 0, 0, 0, 1\n"}) {
        const auto cfg = parse_config(text);
        const auto res = run_batch(cfg, 0.2, 1);
        CHECK(res.paths == 4);
        CHECK(res.names == model_observables(cfg));
    }
}
