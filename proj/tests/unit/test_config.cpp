#include <doctest.h>

#include "excitrans/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace excitrans;
namespace fs = std::filesystem;

TEST_CASE("defaults are filled for every schema key") {
    const Config c;
    CHECK(c.integer("N") == 100);
    CHECK(c.number("J") == 1.0);
    CHECK(c.number("q") == doctest::Approx(std::acos(0.0)));
    CHECK_FALSE(c.has("M"));
    CHECK(c.text("boundary") == "open");
    for (const KeySpec& spec : Config::schema()) CHECK(c.values().contains(spec.key));
}

TEST_CASE("unknown keys and wrong types are rejected") {
    Config c;
    CHECK_THROWS_AS(c.merge(Json{{"Nx", 3}}, "test"), ConfigError);
    CHECK_THROWS_AS(c.merge(Json{{"N", 2.5}}, "test"), ConfigError);
    CHECK_THROWS_AS(c.merge(Json{{"boundary", "twisted"}}, "test"), ConfigError);
    CHECK_THROWS_AS(c.merge(Json{{"g", nullptr}}, "test"), ConfigError);
    CHECK_THROWS_AS(c.merge(Json::array(), "test"), ConfigError);
    CHECK_THROWS_AS(c.set("nokey=1"), ConfigError);
    CHECK_THROWS_AS(c.set("N"), ConfigError);
    CHECK_THROWS_AS(c.set("window=maybe"), ConfigError);
}

TEST_CASE("set parses JSON, bare lists and bare strings") {
    Config c;
    c.set("g=0.25");
    c.set("N_values=10,20,40");
    c.set("g_values=[0.1, 0.2]");
    c.set("kappa_values=3");
    c.set("hopping=dipolar_lr");
    c.set("M=null");
    c.set("window=true");
    CHECK(c.number("g") == 0.25);
    CHECK(c.numbers("N_values") == std::vector<double>{10, 20, 40});
    CHECK(c.numbers("g_values") == std::vector<double>{0.1, 0.2});
    CHECK(c.numbers("kappa_values") == std::vector<double>{3});
    CHECK(c.text("hopping") == "dipolar_lr");
    CHECK_FALSE(c.has("M"));
    CHECK(c.flag("window"));
    CHECK(c.overrides().size() == 7);
    CHECK(c.overrides().front() == "g=0.25");
    // An integer literal for a real-valued key is stored as a number.
    c.set("Delta=69");
    CHECK(c.values()["Delta"].is_number_float());
}

TEST_CASE("layers apply in order defaults, file, set, seed") {
    const fs::path dir = fs::temp_directory_path() / "excitrans_config_test";
    fs::create_directories(dir);
    const fs::path file = dir / "layer.json";
    {
        std::ofstream f(file);
        f << "// line comment\n{\n  \"N\": 60, /* block */\n  \"g\": 2.0,\n  \"seed\": 4\n}\n";
    }
    ConfigLayers layers;
    layers.file = file;
    layers.sets = {"g=3"};
    layers.seed = 9;
    const Config c = layered_config(Json{{"N", 50}, {"g", 1.0}, {"kappa", 0.5}}, layers);
    CHECK(c.integer("N") == 60);
    CHECK(c.number("g") == 3.0);
    CHECK(c.number("kappa") == 0.5);
    CHECK(c.unsigned_integer("seed") == 9);
    fs::remove_all(dir);
}

TEST_CASE("malformed files are configuration errors") {
    CHECK_THROWS_AS((void)parse_json_with_comments("{\"N\": }", "inline"), ConfigError);
    Config c;
    CHECK_THROWS_AS(c.merge_file("/nonexistent/excitrans.json"), ConfigError);
}

TEST_CASE("packet run defaults are derived and recorded") {
    Config c;
    c.merge(Json{{"N", 100}, {"g", 50.0}, {"Jprime_factor", 4.0}}, "test");
    const ResolvedRun r = resolve_packet_run(c);
    const double scale = std::pow(2.0 * std::log(2.0), 0.25) * std::sqrt(100.0 / 10.0);
    CHECK(r.chain.Jprime == doctest::Approx(4.0 * scale).epsilon(1e-12));
    CHECK(r.chain.Jprime == doctest::Approx(13.7254).epsilon(1e-5));
    CHECK(r.chain.M == 50);
    CHECK(r.chain.delta() == doctest::Approx(499.0));
    CHECK(r.notes.size() >= 2);

    Config wide;
    wide.merge(Json{{"delta", 10.0}, {"delta_x", 40.0}}, "test");
    CHECK(resolve_packet_run(wide).chain.M == 90);

    Config alt;
    alt.merge(Json{{"N", 100}, {"Jprime_alt_factor", 1.5}}, "test");
    CHECK(resolve_packet_run(alt).chain.Jprime == doctest::Approx(1.5 * std::sqrt(200.0 / 5.0)));

    Config plain;
    CHECK(resolve_packet_run(plain).chain.Jprime == 1.0);
}

TEST_CASE("conflicting keys are refused") {
    Config both;
    both.merge(Json{{"Jprime", 2.0}, {"Jprime_factor", 4.0}}, "test");
    CHECK_THROWS_AS((void)resolve_packet_run(both), ConfigError);

    Config disorder;
    disorder.merge(Json{{"deltaJ", 0.2}, {"sigma_pos", 0.05}}, "test");
    CHECK_THROWS_AS((void)resolve_packet_run(disorder), ConfigError);
}

TEST_CASE("pumped run has no leads and uses the rates") {
    Config c;
    c.merge(Json{{"N", 20}, {"g", 0.2}, {"gamma_P", 0.5}, {"gamma_out", 2.0}, {"deltaJ", 0.2}, {"seed", 3}}, "test");
    const ResolvedRun r = resolve_pumped_run(c);
    CHECK(r.chain.M == 0);
    CHECK(r.chain.N == 20);
    CHECK(r.rates.gamma_P == 0.5);
    CHECK(r.rates.gamma_out == 2.0);
    CHECK(r.chain.disorder.seed == 3);
}

TEST_CASE("the shipped example configuration covers every key and resolves") {
    Config c;
    c.merge_file(fs::path(EXCITRANS_SOURCE_DIR) / "configs" / "example_config.json");
    const Json file = parse_json_with_comments(
        [] {
            std::ifstream in(fs::path(EXCITRANS_SOURCE_DIR) / "configs" / "example_config.json");
            return std::string(std::istreambuf_iterator<char>(in), {});
        }(),
        "example");
    for (const KeySpec& spec : Config::schema()) CHECK_MESSAGE(file.contains(spec.key), spec.key);
    const ResolvedRun r = resolve_packet_run(c);
    CHECK(r.chain.delta() == doctest::Approx(499.0));
}
