#include "excitrans/cli.hpp"

#include "excitrans/config.hpp"
#include "excitrans/scattering.hpp"
#include "excitrans/scenarios.hpp"
#include "excitrans/validation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <thread>

#ifndef EXCITRANS_VERSION
#define EXCITRANS_VERSION "0.0.0"
#endif

namespace excitrans {

namespace {

namespace fs = std::filesystem;

struct Common {
    std::string config;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::string out = "excitrans-out";
    bool deep = false;
    int threads = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));

    [[nodiscard]] ConfigLayers layers() const {
        ConfigLayers l;
        if (!config.empty()) l.file = config;
        l.sets = sets;
        l.seed = seed;
        return l;
    }
};

class ValidationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "JSON config file (comments allowed, unknown keys rejected)")
        ->check(CLI::ExistingFile);
    sub->add_option("--set", c.sets, "override one key, key=value (repeatable)")->take_all()->allow_extra_args(false);
    sub->add_option("--seed", c.seed, "base seed");
    sub->add_option("--out", c.out, "output directory")->capture_default_str();
    sub->add_flag("--deep", c.deep, "long-run settings");
    sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

Json run_metadata(const std::string& command, const Config& config, const Common& c,
                  const std::vector<std::string>& notes) {
    Json meta;
    meta["command"] = command;
    meta["caption"] = nullptr;
    meta["config_file"] = c.config.empty() ? Json(nullptr) : Json(c.config);
    meta["overrides"] = c.sets;
    meta["seed_flag"] = c.seed ? Json(*c.seed) : Json(nullptr);
    meta["resolved_parameters"] = config.values();
    meta["notes"] = notes;
    return meta;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::optional<double> value_of(const std::vector<CsvRow>& rows, const std::string& observable) {
    for (const CsvRow& r : rows) {
        if (r.observable == observable) return r.value;
    }
    return std::nullopt;
}

void print_outputs(std::ostream& out, const fs::path& csv, const fs::path& meta) {
    out << "csv: " << csv.string() << "\nmetadata: " << meta.string() << "\n";
}

int cmd_transmit(const Common& c, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const Config config = layered_config(Json::object(), c.layers());
    const ResolvedRun run = resolve_packet_run(config);
    std::vector<std::string> notes = run.notes;
    if (!packet_fits_lead(run.packet, run.chain)) notes.push_back("warning: packet tail reaches the outer lead end");
    const auto method = propagation_method(config);
    auto rows = trajectory_rows("transmit", run, config.number("dt"), config.maybe_number("t_end"),
                                config.flag("window"), method);
    if (const auto t = config.maybe_number("t")) {
        const double times[] = {*t};
        const auto sample = run_packet({run.chain, run.packet, run.rates.kappa, method}, times).front();
        rows.push_back(make_row("transmit", std::to_string(run.seed), run.chain, run.rates, "T_t", *t, sample.transmission));
    }
    fs::path csv, meta;
    (void)write_outputs(c.out, "transmit", rows, run_metadata("transmit", config, c, notes), seconds_since(start), &csv, &meta);
    out << std::setprecision(10);
    for (const char* name : {"t_s", "t_l", "T_ts", "T_tl", "in_cavity_tl", "T_window_max|window=0.8-1.2t_s", "T_t"}) {
        if (const auto v = value_of(rows, name)) out << name << " = " << *v << "\n";
    }
    for (const std::string& n : notes) out << "note: " << n << "\n";
    print_outputs(out, csv, meta);
    return 0;
}

int cmd_spectrum(const Common& c, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const Config config = layered_config(Json::object(), c.layers());
    const ResolvedRun run = resolve_packet_run(config);
    const double G = run.chain.collective_coupling();
    const double w = run.chain.Jprime * run.chain.Jprime / (run.chain.N * std::abs(2.0 * run.chain.J * std::sin(run.packet.q0)));
    const double centre = G > 0.0 ? G - run.chain.inner_hopping() : 0.0;
    const double half = G > 0.0 ? std::max(6.0, 10.0 * w) : 3.0 * run.chain.J;
    const double lo = config.maybe_number("Delta_min").value_or(centre - half);
    const double hi = config.maybe_number("Delta_max").value_or(centre + half);
    const int points = config.integer("Delta_points");
    if (points < 2 || !(hi > lo)) throw ConfigError("spectrum needs Delta_max > Delta_min and Delta_points >= 2");
    std::vector<double> deltas;
    for (int i = 0; i < points; ++i) deltas.push_back(lo + (hi - lo) * i / (points - 1));

    const auto method = propagation_method(config);
    std::vector<std::vector<CsvRow>> parts(deltas.size());
    parallel_for(deltas.size(), c.threads, [&](std::size_t i) {
        parts[i] = spectrum_rows("spectrum", run, std::span<const double>(&deltas[i], 1), method);
        if (const auto t = config.maybe_number("t")) {
            PacketRun pr{run.chain, run.packet, run.rates.kappa, method};
            set_detuning(pr.chain, deltas[i]);
            const double times[] = {*t};
            parts[i].push_back(make_row("spectrum", std::to_string(run.seed), pr.chain, run.rates, "T_t", *t,
                                        run_packet(pr, times).front().transmission));
        }
    });
    std::vector<CsvRow> rows;
    for (auto& p : parts) rows.insert(rows.end(), p.begin(), p.end());

    std::vector<std::string> notes = run.notes;
    notes.push_back("Delta grid [" + format_number(lo) + ", " + format_number(hi) + "], " + std::to_string(points) + " points");
    fs::path csv, meta;
    (void)write_outputs(c.out, "spectrum", rows, run_metadata("spectrum", config, c, notes), seconds_since(start), &csv, &meta);

    const CsvRow* best = nullptr;
    for (const CsvRow& r : rows) {
        if (r.observable == "T_ts" && (!best || r.value > best->value)) best = &r;
    }
    out << std::setprecision(10);
    if (best) out << "max T_ts = " << best->value << " at Delta = " << best->Delta << "\n";
    for (const std::string& n : notes) out << "note: " << n << "\n";
    print_outputs(out, csv, meta);
    return 0;
}

int cmd_analytic(const Common& c, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const Config config = layered_config(Json::object(), c.layers());
    const ResolvedRun run = resolve_packet_run(config);
    if (!std::holds_alternative<NearestNeighbor>(run.chain.hopping)) {
        throw ConfigError("analytic needs hopping = nearest_neighbor");
    }
    const double q = run.packet.q0;
    const ScatterParams p = scatter_params_from(run.chain, q);
    const PolaritonSpectrum spectrum = polariton_energies(p);
    const std::string seed = std::to_string(run.seed);
    std::vector<CsvRow> rows;
    auto add = [&](const std::string& name, double value) {
        rows.push_back(make_row("analytic", seed, run.chain, run.rates, name, std::nullopt, value));
    };
    add("omega_u", spectrum.omega_u);
    add("omega_d", spectrum.omega_d);
    add("w_quoted", fwhm(p));
    add("fwhm_lorentzian", 4.0 * fwhm(p));
    bool at_pole = false;
    try {
        const ScatteringAmplitudes a = transmission_exact(p);
        add("T_q", a.T);
        at_pole = a.at_pole;
    } catch (const PoleProximityError& e) {
        at_pole = true;
        add("T_q", 1.0);
    }
    add("T_packet_averaged", packet_averaged_transmission(p, q, run.packet.delta));
    if (run.chain.boundary == Boundary::Open && std::holds_alternative<NoDisorder>(run.chain.disorder.kind)) {
        add("T_obc", transmission_obc(run.chain, q));
        add("T_obc_packet_averaged", packet_averaged_obc(run.chain, q, run.packet.delta));
    }
    std::vector<std::string> notes = run.notes;
    if (at_pole) notes.push_back("omega_q sits on a pole of beta; T_q = 1 reported");
    fs::path csv, meta;
    (void)write_outputs(c.out, "analytic", rows, run_metadata("analytic", config, c, notes), seconds_since(start), &csv, &meta);
    out << std::setprecision(10);
    out << "upper polariton omega_u = " << spectrum.omega_u << "  (Delta = g sqrt(N) - J)\n";
    out << "lower polariton omega_d = " << spectrum.omega_d << "  (Delta = -g sqrt(N) - J)\n";
    for (const CsvRow& r : rows) {
        if (r.observable != "omega_u" && r.observable != "omega_d") out << r.observable << " = " << r.value << "\n";
    }
    out << "Delta = " << run.chain.delta() << ", q = " << q << "\n";
    for (const std::string& n : notes) out << "note: " << n << "\n";
    print_outputs(out, csv, meta);
    return 0;
}

int cmd_steady(const Common& c, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const Config config = layered_config(Json::object(), c.layers());
    const ResolvedRun run = resolve_pumped_run(config);
    const SteadyResult s = steady_current(run.chain, run.rates);
    const std::string seed = std::to_string(run.seed);
    std::vector<CsvRow> rows;
    auto add = [&](const std::string& name, double value) {
        rows.push_back(make_row("steady", seed, run.chain, run.rates, name, std::nullopt, value));
    };
    add("I_out", s.current);
    add("drain_population", s.drain_population);
    add("cavity_population", s.cavity_population);
    add("continuity_residual", s.continuity_residual);
    fs::path csv, meta;
    (void)write_outputs(c.out, "steady", rows, run_metadata("steady", config, c, run.notes), seconds_since(start), &csv, &meta);
    out << std::setprecision(10);
    for (const CsvRow& r : rows) out << r.observable << " = " << r.value << "\n";
    print_outputs(out, csv, meta);
    return 0;
}

int cmd_scenario(const Common& c, const std::string& id, bool list, std::ostream& out) {
    if (list) {
        for (const ScenarioDefinition& s : scenario_catalog()) out << s.id << "  " << s.description << "\n";
        return 0;
    }
    if (id.empty()) throw CLI::ValidationError("scenario", "a scenario id is required (see --list)");
    ScenarioOptions options;
    options.out = c.out;
    options.threads = c.threads;
    options.deep = c.deep;
    options.layers = c.layers();
    const ScenarioOutput result = run_scenario(id, options);
    out << "scenario " << id << ": " << result.rows.size() << " rows, " << result.jobs_total << " jobs ("
        << result.jobs_reused << " reused from shards)\n";
    out << result.summary.dump(2) << "\n";
    print_outputs(out, result.csv_path, result.metadata_path);
    return 0;
}

int cmd_validate(const Common& c, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t seed = c.seed.value_or(1);
    const auto checks = run_invariants(c.deep ? ValidationScale{} : quick_validation(), seed);
    Json report = Json::array();
    int failed = 0;
    out << std::setprecision(3) << std::scientific;
    for (const CheckResult& r : checks) {
        out << (r.pass ? "PASS " : "FAIL ") << r.name << "  " << r.measured << " < " << r.tolerance << "  (" << r.detail
            << ")\n";
        report.push_back({{"name", r.name}, {"measured", r.measured}, {"tolerance", r.tolerance}, {"pass", r.pass},
                          {"detail", r.detail}});
        failed += r.pass ? 0 : 1;
    }
    fs::create_directories(c.out);
    const fs::path path = fs::path(c.out) / "validate.json";
    std::ofstream f(path);
    f << Json{{"seed", seed}, {"deep", c.deep}, {"checks", report}, {"versions", version_info()},
              {"wall_time_seconds", seconds_since(start)}}
             .dump(2)
      << "\n";
    out << "report: " << path.string() << "\n";
    if (failed > 0) throw ValidationFailure(std::to_string(failed) + " invariant check(s) failed");
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Single-excitation transport through a chain coupled to a cavity mode", "excitrans"};
    app.set_version_flag("--version", EXCITRANS_VERSION);
    app.require_subcommand(1);

    Common common;
    std::string scenario_id;
    bool list = false;
    auto* transmit = app.add_subcommand("transmit", "wave-packet run: trajectory and T at t_s, t_l");
    auto* spectrum = app.add_subcommand("spectrum", "T_ts, T_tl and closed forms versus Delta");
    auto* analytic = app.add_subcommand("analytic", "polariton energies, peak width and closed-form T_q");
    auto* steady = app.add_subcommand("steady", "steady-state current of the pumped chain");
    auto* scenario = app.add_subcommand("scenario", "run a figure scenario");
    auto* validate = app.add_subcommand("validate", "invariant suite");
    for (auto* sub : {transmit, spectrum, analytic, steady, scenario, validate}) add_common(sub, common);
    scenario->add_option("id", scenario_id, "scenario id");
    scenario->add_flag("--list", list, "list scenario ids");

    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << EXCITRANS_VERSION << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "ERROR 2: " << e.what() << "\n";
        return 2;
    }

    try {
        if (transmit->parsed()) return cmd_transmit(common, out);
        if (spectrum->parsed()) return cmd_spectrum(common, out);
        if (analytic->parsed()) return cmd_analytic(common, out);
        if (steady->parsed()) return cmd_steady(common, out);
        if (scenario->parsed()) return cmd_scenario(common, scenario_id, list, out);
        return cmd_validate(common, out);
    } catch (const CLI::ParseError& e) {
        err << "ERROR 2: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "ERROR 2: " << e.what() << "\n";
        return 2;
    } catch (const ValidationFailure& e) {
        err << "ERROR 1: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "ERROR 1: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace excitrans
