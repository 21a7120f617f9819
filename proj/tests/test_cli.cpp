#include <doctest.h>

#include "qe/cli/commands.hpp"
#include "qe/cli/config.hpp"
#include "qe/cli/pipeline.hpp"
#include "qe/errors.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qe;
using namespace qe::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("qe_test_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int run_args(std::vector<std::string> args) {
    args.insert(args.begin(), "quench-entropy");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run(static_cast<int>(argv.size()), argv.data());
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("config: defaults, JSON overlay and validation") {
    ScenarioConfig d;
    CHECK_NOTHROW(d.validate());
    CHECK(d.cut() == 32);

    const auto j = nlohmann::json::parse(R"({"lambda": "gap:c=0.5", "N": 40, "kmax": 128, "outputs": ["szego"]})");
    const auto c = ScenarioConfig::from_json(j);
    CHECK(c.lambda_spec == "gap:c=0.5");
    CHECK(c.N == 40);
    CHECK(c.cut() == 20);
    CHECK(c.k_max == std::optional<std::size_t>(128));
    CHECK(c.outputs == std::set<Column>{Column::szego});
    CHECK(ScenarioConfig::from_json(nlohmann::json::parse(R"({"kmax": "auto"})"), c).k_max == std::nullopt);

    // round trip through the echo
    CHECK(ScenarioConfig::from_json(c.to_json()).to_json() == c.to_json());

    CHECK_THROWS_AS(ScenarioConfig::from_json(nlohmann::json::parse(R"({"bogus": 1})")), ConfigError);
    CHECK_THROWS_AS(ScenarioConfig::from_json(nlohmann::json::parse(R"({"N": -3})")), ConfigError);
    CHECK_THROWS_AS(ScenarioConfig::from_json(nlohmann::json::parse(R"({"outputs": ["entropy"]})")), ConfigError);

    ScenarioConfig bad;
    bad.n = 64;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.t1 = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.steps = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.beta_spec = "poly:0.5,1";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.lambda_spec = "gap:";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("time grid hits both ends") {
    ScenarioConfig c;
    c.t0 = 0.3;
    c.t1 = 0.7;
    c.steps = 5;
    const auto t = time_grid(c);
    REQUIRE(t.size() == 5);
    CHECK(t.front() == 0.3);
    CHECK(t.back() == 0.7);
    CHECK(t[2] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("series: stationary, uncoupled and column selection") {
    ScenarioConfig c;
    c.lambda_spec = "gap:c=1.5";
    c.beta_spec = "poly:1.5,-1";
    c.N = 16;
    c.t1 = 6.0;
    c.steps = 4;
    const auto st = run_series(c);
    for (const auto& r : st.rows) {
        CHECK(std::abs(*r.exact_entropy - *st.rows[0].exact_entropy) < 1e-8);
        CHECK(std::abs(*r.szego_sum - *st.rows[0].szego_sum) < 1e-8);
        CHECK(*r.exact_entropy >= *r.neg_log_purity - 1e-8);
        CHECK(*r.neg_log_purity >= *r.det_bound - 1e-8);
    }

    c.lambda_spec = "poly:4";
    c.beta_spec = "poly:2";
    for (const auto& r : run_series(c).rows) {
        CHECK(std::abs(*r.exact_entropy) < 1e-12);
        CHECK(std::abs(*r.neg_log_purity) < 1e-12);
        CHECK(std::abs(*r.det_bound) < 1e-12);
        CHECK(*r.szego_sum == 0.0);
        CHECK(*r.bk_bound == 0.0);
    }

    c.outputs = {Column::szego};
    const auto only = run_series(c);
    CHECK_FALSE(only.rows[0].exact_entropy.has_value());
    std::ostringstream os;
    write_csv(os, only);
    const auto lines = split_lines(os.str());
    CHECK(lines[0] == kCsvHeader);
    CHECK(lines[1] == "0,,,,0,");
}

TEST_CASE("dense columns are skipped above the size limit") {
    ScenarioConfig c;
    c.N = kDenseLimit + 1;
    c.steps = 2;
    c.t1 = 1.0;
    const auto s = run_series(c);
    CHECK_FALSE(s.warnings.empty());
    CHECK_FALSE(s.rows[1].exact_entropy.has_value());
    CHECK(s.rows[1].szego_sum.has_value());
}

TEST_CASE("parallel output equals serial output") {
    ScenarioConfig c;
    c.N = 24;
    c.t1 = 8.0;
    c.steps = 9;
    std::ostringstream a, b;
    write_csv(a, run_series(c));
    c.jobs = 4;
    write_csv(b, run_series(c));
    CHECK(a.str() == b.str());

    std::vector<int> hits(50, 0);
    parallel_for(50, 3, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, 2, [](std::size_t i) { if (i == 7) throw NumericalError("x"); }), NumericalError);
}

TEST_CASE("command line: exit codes") {
    const auto dir = scratch("exit");
    CHECK(run_args({"evolve", "-N", "16", "--t1", "2", "--steps", "3", "--out", (dir / "a.csv").string()}) == 0);
    CHECK(fs::exists(dir / "a.csv"));
    CHECK(fs::exists(dir / "a.csv.meta.json"));
    CHECK(split_lines(slurp(dir / "a.csv")).size() == 4);

    CHECK(run_args({"evolve", "--lambda", "gap:x"}) == kUsageError);
    CHECK(run_args({"evolve", "-N", "8", "-n", "8"}) == kUsageError);
    CHECK(run_args({"evolve", "--kmax", "many"}) == kUsageError);
    CHECK(run_args({"evolve", "--no-such-flag"}) == kUsageError);
    CHECK(run_args({}) == kUsageError);
    CHECK(run_args({"evolve", "--config", (dir / "missing.json").string()}) == kUsageError);
    CHECK(run_args({"sweep", "--param", "c", "--values", ""}) == kUsageError);
    CHECK(run_args({"sweep", "--param", "beta", "--values", "1"}) == kUsageError);
}

TEST_CASE("command line: config file with flag override and state dump") {
    const auto dir = scratch("config");
    {
        std::ofstream f(dir / "s.json");
        f << R"({"lambda": "gap:c=1.5", "N": 16, "t1": 3.0, "steps": 3, "outputs": ["szego", "bkbound"]})";
    }
    CHECK(run_args({"evolve", "--config", (dir / "s.json").string(), "--steps", "5", "--out",
                    (dir / "o.csv").string(), "--dump-state", (dir / "state.json").string()}) == 0);
    const auto lines = split_lines(slurp(dir / "o.csv"));
    CHECK(lines.size() == 6);
    CHECK(lines.back().rfind("3,,,,", 0) == 0);
    const auto meta = nlohmann::json::parse(slurp(dir / "o.csv.meta.json"));
    CHECK(meta["config"]["steps"] == 5);
    CHECK(meta["config"]["N"] == 16);
    const auto state = nlohmann::json::parse(slurp(dir / "state.json"));
    CHECK(state["N"] == 16);
    CHECK(state["t"] == 3.0);
    CHECK(state["re"].size() == 16);
}

TEST_CASE("sweep") {
    ScenarioConfig base;
    base.N = 16;
    base.t1 = 2.0;
    base.steps = 2;
    std::ostringstream out, log;
    CHECK(cmd_sweep("c", {0.5, 1.5}, base, std::nullopt, out, log) == 0);
    const auto lines = split_lines(out.str());
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == std::string("param_value,") + kCsvHeader);
    CHECK(lines[1].rfind("0.5,0,", 0) == 0);
    CHECK(lines[4].rfind("1.5,2,", 0) == 0);

    // matches a direct evolve run
    ScenarioConfig direct = base;
    direct.lambda_spec = "gap:c=1.5";
    std::ostringstream d;
    write_csv(d, run_series(direct));
    CHECK("1.5," + split_lines(d.str())[2] == lines[4]);

    CHECK_THROWS_AS(cmd_sweep("c", {}, base, std::nullopt, out, log), ConfigError);
    CHECK_THROWS_AS(cmd_sweep("N", {16.5}, base, std::nullopt, out, log), ConfigError);

    // finite-size convergence toward the Szegő value
    ScenarioConfig fixed;
    fixed.t0 = 0.0;
    fixed.t1 = 3.0;
    fixed.steps = 2;
    fixed.outputs = {Column::detbound, Column::szego};
    std::ostringstream sw;
    CHECK(cmd_sweep("N", {32, 64, 128}, fixed, std::nullopt, sw, log) == 0);
    const auto rows = split_lines(sw.str());
    std::vector<double> gaps;
    for (std::size_t i = 2; i < rows.size(); i += 2) {
        std::vector<std::string> f;
        std::stringstream ss(rows[i]);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        gaps.push_back(std::abs(std::stod(f[4]) - std::stod(f[5])));
    }
    REQUIRE(gaps.size() == 3);
    CHECK(gaps[1] < gaps[0]);
    CHECK(gaps[2] < gaps[1]);
}

TEST_CASE("verify quick passes and reports every family") {
    std::ostringstream rep, log;
    CHECK(cmd_verify(VerifyLevel::quick, 7, rep, log) == 0);
    const auto j = nlohmann::json::parse(rep.str());
    CHECK(j["passed"] == true);
    CHECK(j["suites"].size() == 5);
    for (const auto& s : j["suites"]) CHECK(s["checks"].get<int>() > 0);
}

TEST_CASE("binary: figure1 output is byte-identical across runs") {
    const char* bin = std::getenv("QE_BINARY");
    if (!bin) return;
    const auto a = scratch("fig_a"), b = scratch("fig_b");
    const std::string base = std::string("\"") + bin + "\" figure1 --steps 21 --out ";
    REQUIRE(std::system((base + a.string() + " 2>/dev/null").c_str()) == 0);
    REQUIRE(std::system((base + b.string() + " --jobs 2 2>/dev/null").c_str()) == 0);
    for (const char* f : {"figure1_c0.5.csv", "figure1_c1.0.csv", "figure1_c1.5.csv", "figure1_fits.json"}) {
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK_FALSE(slurp(a / f).empty());
    }
}
