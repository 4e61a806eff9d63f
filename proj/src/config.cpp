#include "excitrans/config.hpp"

#include "excitrans/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace excitrans {

namespace {

std::vector<KeySpec> build_schema() {
    using K = ValueKind;
    const Json null = nullptr;
    return {
        // Chain.
        {"N", K::Integer, 100, false, "cavity-coupled sites", {}},
        {"M", K::Integer, null, true, "sites per lead; null = max(50, delta_x + 5 delta)", {}},
        {"J", K::Number, 1.0, false, "lead and reference tunneling (energy unit)", {}},
        {"J_cavity", K::Number, null, true, "tunneling inside the cavity region; null = J", {}},
        {"Jprime", K::Number, null, true, "entrance/exit tunneling; null = J unless Jprime_factor is set", {}},
        {"Jprime_factor", K::Number, null, true, "J' = factor (2 ln 2)^{1/4} sqrt(N / (2 delta)) J", {}},
        {"Jprime_alt_factor", K::Number, null, true, "J' = factor sqrt(2 N / delta) (peak-width study convention)", {}},
        {"g", K::Number, 0.0, false, "uniform cavity coupling", {}},
        {"g_per_site", K::NumberList, null, true, "site-dependent couplings, length N", {}},
        {"Delta", K::Number, null, true, "lead detuning omega - omega0; null = g sqrt(N) - J", {}},
        {"omega0", K::Number, 0.0, false, "level spacing inside the cavity region", {}},
        {"omega_c", K::Number, null, true, "photon energy; null = omega0", {}},
        {"boundary", K::Text, "open", false, "cavity-region boundary", {"open", "periodic"}},
        {"hopping",
         K::Text,
         "nearest_neighbor",
         false,
         "hopping model",
         {"nearest_neighbor", "dipolar_nn", "dipolar_lr", "all_to_all", "effective_cavity"}},
        {"Jbar", K::Number, -1.0, false, "dipolar amplitude Jbar / r^3", {}},
        {"Jinf", K::Number, 5.0, false, "all-to-all coupling inside the cavity region", {}},
        {"deltaJ", K::Number, 0.0, false, "standard deviation of tunneling disorder", {}},
        {"sigma_pos", K::Number, 0.0, false, "positional disorder, fraction of the lattice constant (dipolar)", {}},
        // Wave packet.
        {"q", K::Number, std::numbers::pi / 2.0, false, "quasi-momentum of the packet or scattering state", {}},
        {"delta", K::Number, 5.0, false, "packet standard deviation in sites", {}},
        {"delta_x", K::Number, 20.0, false, "initial distance M - j0 from the cavity entrance", {}},
        // Dissipation.
        {"kappa", K::Number, 0.0, false, "cavity decay", {}},
        {"gamma_P", K::Number, 0.0, false, "pump into site 1", {}},
        {"gamma_out", K::Number, 0.0, false, "drain from site N", {}},
        {"gamma_sp", K::Number, 0.0, false, "spontaneous emission per site", {}},
        {"gamma_deph", K::Number, 0.0, false, "dephasing per site", {}},
        // Run control.
        {"seed", K::Integer, 1, false, "base seed; ensembles use seed, seed+1, ...", {}},
        {"seeds", K::Integer, null, true, "ensemble size; null = scenario default", {}},
        {"dt", K::Number, 0.5, false, "snapshot spacing of trajectories", {}},
        {"t", K::Number, null, true, "evaluation time; null = t_s", {}},
        {"t_end", K::Number, null, true, "trajectory length; null = 1.2 t_l", {}},
        {"window", K::Boolean, false, false, "also report max T over [0.8 t_s, 1.2 t_s]", {}},
        {"t_long_max_N", K::Integer, 1600, false, "ensemble scans skip T at t_l above this N", {}},
        {"method", K::Text, "auto", false, "propagation route", {"auto", "spectral", "chebyshev"}},
        {"Delta_min", K::Number, null, true, "spectrum sweep start; null = automatic", {}},
        {"Delta_max", K::Number, null, true, "spectrum sweep end; null = automatic", {}},
        {"Delta_points", K::Integer, 201, false, "spectrum sweep points", {}},
        // Scenario sweeps (null = scenario default).
        {"N_values", K::NumberList, null, true, "sweep over N", {}},
        {"g_values", K::NumberList, null, true, "sweep over g", {}},
        {"g_over_sqrtN_values", K::NumberList, null, true, "sweep over g / sqrt(N)", {}},
        {"kappa_values", K::NumberList, null, true, "sweep over kappa", {}},
        {"gamma_P_values", K::NumberList, null, true, "sweep over gamma_P", {}},
    };
}

bool matches(const Json& value, const KeySpec& spec) {
    if (value.is_null()) return spec.nullable;
    switch (spec.kind) {
        case ValueKind::Integer: return value.is_number_integer();
        case ValueKind::Number: return value.is_number();
        case ValueKind::Boolean: return value.is_boolean();
        case ValueKind::Text:
            return value.is_string() &&
                   (spec.choices.empty() ||
                    std::find(spec.choices.begin(), spec.choices.end(), value.get<std::string>()) != spec.choices.end());
        case ValueKind::NumberList:
            return value.is_array() && std::all_of(value.begin(), value.end(), [](const Json& v) { return v.is_number(); });
    }
    return false;
}

std::string kind_name(ValueKind kind) {
    switch (kind) {
        case ValueKind::Integer: return "integer";
        case ValueKind::Number: return "number";
        case ValueKind::Boolean: return "boolean";
        case ValueKind::Text: return "string";
        case ValueKind::NumberList: return "list of numbers";
    }
    return "value";
}

}  // namespace

const std::vector<KeySpec>& Config::schema() {
    static const std::vector<KeySpec> keys = build_schema();
    return keys;
}

const KeySpec& Config::spec_of(const std::string& key) {
    for (const KeySpec& spec : schema()) {
        if (spec.key == key) return spec;
    }
    throw ConfigError("unknown key '" + key + "'");
}

Config::Config() : values_(Json::object()) {
    for (const KeySpec& spec : schema()) values_[spec.key] = spec.fallback;
}

void Config::assign(const std::string& key, const Json& value, const std::string& origin) {
    const KeySpec* spec = nullptr;
    for (const KeySpec& s : schema()) {
        if (s.key == key) spec = &s;
    }
    if (!spec) {
        throw ConfigError(origin + ": unknown key '" + key + "'");
    }
    Json stored = value;
    if (spec->kind == ValueKind::Number && value.is_number_integer()) stored = value.get<double>();
    if (!matches(stored, *spec)) {
        std::string expected = kind_name(spec->kind);
        if (!spec->choices.empty()) {
            expected += " (one of";
            for (const auto& c : spec->choices) expected += " " + c;
            expected += ")";
        }
        throw ConfigError(origin + ": key '" + key + "' expects " + expected + (spec->nullable ? " or null" : "") +
                          ", got " + value.dump());
    }
    values_[key] = stored;
}

void Config::merge(const Json& object, const std::string& origin) {
    if (!object.is_object()) {
        throw ConfigError(origin + ": configuration must be a JSON object");
    }
    for (const auto& [key, value] : object.items()) assign(key, value, origin);
}

Json parse_json_with_comments(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text, nullptr, true, true);
    } catch (const Json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

void Config::merge_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    merge(parse_json_with_comments(buffer.str(), path.string()), path.string());
}

void Config::set(const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("--set expects key=value, got '" + assignment + "'");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    const KeySpec& spec = [&]() -> const KeySpec& {
        try {
            return spec_of(key);
        } catch (const ConfigError&) {
            throw ConfigError("--set: unknown key '" + key + "'");
        }
    }();
    Json value;
    try {
        value = Json::parse(raw);
    } catch (const Json::parse_error&) {
        if (spec.kind == ValueKind::NumberList) {
            value = Json::array();
            std::stringstream items(raw);
            std::string item;
            while (std::getline(items, item, ',')) {
                try {
                    value.push_back(parse_number(item));
                } catch (const CsvSchemaError&) {
                    throw ConfigError("--set: '" + item + "' in " + key + " is not a number");
                }
            }
        } else {
            value = raw;
        }
    }
    if (spec.kind == ValueKind::NumberList && value.is_number()) value = Json::array({value});
    if (spec.kind == ValueKind::Text && !value.is_string() && !value.is_null()) value = raw;
    assign(key, value, "--set " + assignment);
    overrides_.push_back(assignment);
}

bool Config::has(const std::string& key) const {
    (void)spec_of(key);
    return !values_.at(key).is_null();
}

double Config::number(const std::string& key) const {
    if (!has(key)) throw ConfigError("key '" + key + "' is not set");
    return values_.at(key).get<double>();
}

int Config::integer(const std::string& key) const {
    if (!has(key)) throw ConfigError("key '" + key + "' is not set");
    return values_.at(key).get<int>();
}

std::uint64_t Config::unsigned_integer(const std::string& key) const {
    if (!has(key)) throw ConfigError("key '" + key + "' is not set");
    const Json& v = values_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    const auto s = v.get<std::int64_t>();
    if (s < 0) throw ConfigError("key '" + key + "' must be >= 0");
    return static_cast<std::uint64_t>(s);
}

bool Config::flag(const std::string& key) const { return has(key) && values_.at(key).get<bool>(); }

std::string Config::text(const std::string& key) const {
    if (!has(key)) throw ConfigError("key '" + key + "' is not set");
    return values_.at(key).get<std::string>();
}

std::vector<double> Config::numbers(const std::string& key) const {
    if (!has(key)) throw ConfigError("key '" + key + "' is not set");
    return values_.at(key).get<std::vector<double>>();
}

std::optional<double> Config::maybe_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return values_.at(key).get<double>();
}

Config layered_config(const Json& defaults, const ConfigLayers& layers) {
    Config config;
    config.merge(defaults, "defaults");
    if (layers.file) config.merge_file(*layers.file);
    for (const std::string& assignment : layers.sets) config.set(assignment);
    if (layers.seed) config.merge(Json{{"seed", *layers.seed}}, "--seed");
    return config;
}

double impedance_scale(int N, double delta, double J) {
    return std::pow(2.0 * std::log(2.0), 0.25) * std::sqrt(static_cast<double>(N) / (2.0 * delta)) * J;
}

int default_lead_length(const WavePacketSpec& packet) {
    return std::max(50, static_cast<int>(std::ceil(packet.delta_x + 5.0 * packet.delta)));
}

namespace {

HoppingModel hopping_from(const Config& c) {
    const std::string name = c.text("hopping");
    if (name == "dipolar_nn") return DipolarLongRange{c.number("Jbar"), true};
    if (name == "dipolar_lr") return DipolarLongRange{c.number("Jbar"), false};
    if (name == "all_to_all") return AllToAll{c.number("Jinf")};
    if (name == "effective_cavity") {
        if (!(c.number("kappa") > 0.0)) {
            throw ConfigError("hopping=effective_cavity needs kappa > 0");
        }
        return EffectiveCavity{c.number("g"), c.number("kappa")};
    }
    return NearestNeighbor{};
}

void fill_common(const Config& c, ResolvedRun& run) {
    ChainSpec& s = run.chain;
    s.N = c.integer("N");
    s.J = c.number("J");
    s.J_cavity = c.maybe_number("J_cavity");
    s.omega0 = c.number("omega0");
    s.omega = s.omega0;
    s.omega_c = c.maybe_number("omega_c");
    s.boundary = c.text("boundary") == "periodic" ? Boundary::Periodic : Boundary::Open;
    s.hopping = hopping_from(c);
    const bool collective = std::holds_alternative<AllToAll>(s.hopping) ||
                            std::holds_alternative<EffectiveCavity>(s.hopping);
    s.g = collective ? 0.0 : c.number("g");
    if (c.has("g_per_site")) s.g_per_site = c.numbers("g_per_site");
    run.seed = c.unsigned_integer("seed");
    const double dJ = c.number("deltaJ");
    const double sp = c.number("sigma_pos");
    if (dJ > 0.0 && sp > 0.0) {
        throw ConfigError("deltaJ and sigma_pos cannot both be set");
    }
    if (dJ > 0.0) s.disorder = {TunnelingGaussian{dJ}, run.seed};
    if (sp > 0.0) s.disorder = {Positional{sp}, run.seed};

    run.rates.kappa = c.number("kappa");
    run.rates.gamma_P = c.number("gamma_P");
    run.rates.gamma_out = c.number("gamma_out");
    run.rates.gamma_sp = c.number("gamma_sp");
    run.rates.gamma_deph = c.number("gamma_deph");
    run.rates.validate();
}

}  // namespace

ResolvedRun resolve_packet_run(const Config& c) {
    ResolvedRun run;
    fill_common(c, run);
    run.packet = {c.number("q"), c.number("delta"), c.number("delta_x")};
    run.packet.validate();
    ChainSpec& s = run.chain;
    if (c.has("M")) {
        s.M = c.integer("M");
    } else {
        s.M = default_lead_length(run.packet);
        run.notes.push_back("M defaulted to max(50, delta_x + 5 delta) = " + std::to_string(s.M));
    }
    if (static_cast<int>(c.has("Jprime")) + static_cast<int>(c.has("Jprime_factor")) +
            static_cast<int>(c.has("Jprime_alt_factor")) > 1) {
        throw ConfigError("set at most one of Jprime, Jprime_factor and Jprime_alt_factor");
    }
    if (c.has("Jprime")) {
        s.Jprime = c.number("Jprime");
    } else if (c.has("Jprime_factor")) {
        s.Jprime = c.number("Jprime_factor") * impedance_scale(s.N, run.packet.delta, s.J);
        run.notes.push_back("Jprime = Jprime_factor * J~_N = " + format_number(s.Jprime));
    } else if (c.has("Jprime_alt_factor")) {
        s.Jprime = c.number("Jprime_alt_factor") * std::sqrt(2.0 * s.N / run.packet.delta);
        run.notes.push_back("Jprime = Jprime_alt_factor * sqrt(2 N / delta) = " + format_number(s.Jprime));
    } else {
        s.Jprime = s.J;
        run.notes.push_back("Jprime defaulted to J");
    }
    double delta = 0.0;
    if (c.has("Delta")) {
        delta = c.number("Delta");
    } else {
        delta = s.collective_coupling() - s.J;
        run.notes.push_back("Delta defaulted to g sqrt(N) - J = " + format_number(delta));
    }
    set_detuning(s, delta);
    s.validate();
    return run;
}

ResolvedRun resolve_pumped_run(const Config& c) {
    ResolvedRun run;
    fill_common(c, run);
    run.chain.M = 0;
    run.chain.Jprime = run.chain.J;
    run.chain.validate();
    return run;
}

}  // namespace excitrans
