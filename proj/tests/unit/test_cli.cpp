#include <doctest.h>

#include "excitrans/cli.hpp"
#include "excitrans/config.hpp"
#include "excitrans/csv.hpp"
#include "excitrans/scenarios.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace excitrans;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "excitrans");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

/// Fresh scratch directory that becomes the working directory for the test.
struct Scratch {
    fs::path root;
    fs::path previous;
    explicit Scratch(const std::string& name) : root(fs::temp_directory_path() / name), previous(fs::current_path()) {
        fs::remove_all(root);
        fs::create_directories(root);
        fs::current_path(root);
    }
    ~Scratch() {
        fs::current_path(previous);
        fs::remove_all(root);
    }
    [[nodiscard]] std::vector<std::string> entries() const {
        std::vector<std::string> names;
        for (const auto& e : fs::directory_iterator(root)) names.push_back(e.path().filename().string());
        return names;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

double printed(const std::string& text, const std::string& key) {
    const std::regex re("(^|\\n)" + key + " = ([-+0-9.eE]+)");
    std::smatch m;
    REQUIRE(std::regex_search(text, m, re));
    return std::stod(m[2].str());
}

}  // namespace

TEST_CASE("usage errors exit 2 with the machine-readable prefix") {
    Scratch s("excitrans_cli_usage");
    auto r = run({});
    CHECK(r.code == 2);
    CHECK(r.err.rfind("ERROR 2:", 0) == 0);
    r = run({"frobnicate"});
    CHECK(r.code == 2);
    r = run({"transmit", "--set", "Nope=3", "--out", "o"});
    CHECK(r.code == 2);
    CHECK(r.err.rfind("ERROR 2:", 0) == 0);
    CHECK(r.err.find("Nope") != std::string::npos);
    r = run({"transmit", "--threads", "0"});
    CHECK(r.code == 2);
    r = run({"scenario", "fig9z", "--out", "o"});
    CHECK(r.code == 2);
    r = run({"scenario", "--out", "o"});
    CHECK(r.code == 2);
    r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("scenario") != std::string::npos);
}

TEST_CASE("runtime failures exit 1") {
    Scratch s("excitrans_cli_runtime");
    // A packet that does not fit in an explicitly short lead.
    const auto r = run({"transmit", "--set", "M=5", "--set", "N=10", "--out", "o"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("ERROR 1:", 0) == 0);
}

TEST_CASE("transmit reproduces the headline transmission") {
    Scratch s("excitrans_cli_transmit");
    const auto r = run({"transmit", "--set", "N=50", "--set", "g=10", "--set", "Delta=69", "--set", "Jprime=10",
                        "--out", "o"});
    REQUIRE(r.code == 0);
    CHECK(printed(r.out, "T_ts") > 0.5);
    CHECK(printed(r.out, "t_s") == doctest::Approx(30.0));
    CHECK(printed(r.out, "t_l") == doctest::Approx(55.0));
    std::ifstream csv("o/transmit.csv");
    const auto rows = read_csv(csv);
    CHECK(rows.size() > 100);
    for (const CsvRow& row : rows) {
        CHECK(row.N == 50);
        CHECK(row.Delta == 69.0);
    }
}

TEST_CASE("analytic prints both polariton energies") {
    Scratch s("excitrans_cli_analytic");
    const auto r = run({"analytic", "--set", "N=100", "--set", "g=50", "--set", "q=1.5707963", "--out", "o"});
    REQUIRE(r.code == 0);
    CHECK(printed(r.out, "upper polariton omega_u") == doctest::Approx(50.0 * 10.0 - 1.0));
    CHECK(printed(r.out, "lower polariton omega_d") == doctest::Approx(-50.0 * 10.0 - 1.0));
}

TEST_CASE("overrides round-trip into metadata exactly") {
    Scratch s("excitrans_cli_meta");
    const std::vector<std::string> sets{"N=30", "g=0.2", "gamma_P=0.5", "gamma_out=2", "deltaJ=0.2", "seed=5"};
    std::vector<std::string> args{"steady", "--out", "o"};
    for (const auto& a : sets) {
        args.push_back("--set");
        args.push_back(a);
    }
    const auto r = run(args);
    REQUIRE(r.code == 0);
    const Json meta = Json::parse(slurp("o/steady.meta.json"));
    CHECK(meta["overrides"].get<std::vector<std::string>>() == sets);
    Config expected;
    for (const auto& a : sets) expected.set(a);
    for (const auto& [key, value] : expected.values().items()) CHECK(meta["resolved_parameters"][key] == value);
    CHECK(meta.contains("versions"));
    CHECK(meta.contains("wall_time_seconds"));
    CHECK(meta.contains("timestamp_utc"));
}

TEST_CASE("config file layer and seed flag") {
    Scratch s("excitrans_cli_file");
    {
        std::ofstream f("run.json");
        f << "{\n  // pumped chain\n  \"N\": 12, \"g\": 0.1, \"gamma_P\": 0.5, \"gamma_out\": 2.0, \"deltaJ\": 0.2\n}\n";
    }
    const auto r = run({"steady", "--config", "run.json", "--seed", "17", "--set", "g=0.3", "--out", "o"});
    REQUIRE(r.code == 0);
    const Json meta = Json::parse(slurp("o/steady.meta.json"));
    CHECK(meta["resolved_parameters"]["N"] == 12);
    CHECK(meta["resolved_parameters"]["g"] == 0.3);
    CHECK(meta["resolved_parameters"]["seed"] == 17);
    const auto missing = run({"steady", "--config", "absent.json", "--out", "o"});
    CHECK(missing.code == 2);
}

TEST_CASE("no subcommand writes outside the output directory") {
    Scratch s("excitrans_cli_confined");
    const std::string out = "nested/out";
    REQUIRE(run({"transmit", "--set", "N=10", "--set", "g=1", "--out", out}).code == 0);
    REQUIRE(run({"spectrum", "--set", "N=10", "--set", "g=2", "--set", "Delta_points=5", "--out", out}).code == 0);
    REQUIRE(run({"analytic", "--set", "N=10", "--set", "g=2", "--out", out}).code == 0);
    REQUIRE(run({"steady", "--set", "N=6", "--set", "gamma_P=0.5", "--set", "gamma_out=1", "--out", out}).code == 0);
    REQUIRE(run({"validate", "--out", out}).code == 0);
    REQUIRE(run({"scenario", "fig1b", "--set", "N=10", "--out", out}).code == 0);
    CHECK(s.entries() == std::vector<std::string>{"nested"});
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(out)) files.push_back(e.path().filename().string());
    std::sort(files.begin(), files.end());
    CHECK(files == std::vector<std::string>{"analytic.csv",  "analytic.meta.json", "fig1b.csv",
                                            "fig1b.meta.json", "shards",         "spectrum.csv",
                                            "spectrum.meta.json", "steady.csv",   "steady.meta.json",
                                            "transmit.csv",  "transmit.meta.json", "validate.json"});
}

TEST_CASE("scenario output is deterministic and resumable") {
    Scratch s("excitrans_cli_determinism");
    const auto a = run({"scenario", "fig3b", "--seed", "7", "--out", "a"});
    const auto b = run({"scenario", "fig3b", "--seed", "7", "--out", "b"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    const std::string csv_a = slurp("a/fig3b.csv");
    CHECK(csv_a == slurp("b/fig3b.csv"));
    CHECK(csv_a.find("timestamp") == std::string::npos);

    const auto again = run({"scenario", "fig3b", "--seed", "7", "--out", "a"});
    REQUIRE(again.code == 0);
    CHECK(again.out.find("(4 reused from shards)") != std::string::npos);
    CHECK(slurp("a/fig3b.csv") == csv_a);

    const auto other = run({"scenario", "fig3b", "--seed", "8", "--out", "a"});
    REQUIRE(other.code == 0);
    CHECK(other.out.find("(0 reused from shards)") != std::string::npos);
    CHECK(slurp("a/fig3b.csv") != csv_a);
}

TEST_CASE("every emitted row carries its scenario, seed and parameters") {
    Scratch s("excitrans_cli_rows");
    ScenarioOptions options;
    options.out = "o";
    options.layers.sets = {"seeds=3", "N_values=20,30,40,50", "g_values=0,0.2"};
    const ScenarioOutput result = run_scenario("fig3a", options);
    int means = 0;
    for (const CsvRow& row : result.rows) {
        CHECK(row.scenario == "fig3a");
        CHECK(row.deltaJ == 0.2);
        CHECK(row.M == 50);
        CHECK(row.Jprime > 0.0);
        if (row.seed == "mean") ++means;
    }
    CHECK(means == 2 * 4 * 3);  // T_ts, T_tl, in_cavity_tl per point
    // Re-running one row from its columns reproduces its value.
    const CsvRow* probe = nullptr;
    for (const CsvRow& row : result.rows) {
        if (row.seed == "2" && row.N == 40 && row.g == 0.2 && row.observable == "T_ts") probe = &row;
    }
    REQUIRE(probe != nullptr);
    Config c;
    c.merge(Json{{"N", 40}, {"g", 0.2}, {"Jprime", probe->Jprime}, {"Delta", probe->Delta}, {"deltaJ", 0.2}, {"seed", 2}},
            "test");
    const ResolvedRun r = resolve_packet_run(c);
    const double times[] = {*probe->t};
    const double again = run_packet({r.chain, r.packet, 0.0, PropagationMethod::Auto}, times).front().transmission;
    CHECK(again == doctest::Approx(probe->value).epsilon(1e-9));
}
