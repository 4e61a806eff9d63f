// config.hpp - flat run configuration with a strict schema.
//
// A configuration is one JSON object (comments allowed) whose keys all come
// from schema(). Unknown keys and wrongly typed values are rejected. Layers
// are merged in order: built-in defaults, scenario defaults, --config file,
// --set overrides. A null value means "derive it" (for example Delta or M).

#pragma once

#include "excitrans/chain.hpp"
#include "excitrans/dynamics.hpp"
#include "excitrans/open_system.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace excitrans {

using Json = nlohmann::ordered_json;

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class ValueKind { Integer, Number, Boolean, Text, NumberList };

struct KeySpec {
    std::string key;
    ValueKind kind;
    Json fallback;  ///< built-in default (null = derived or unused)
    bool nullable;
    std::string help;
    std::vector<std::string> choices;  ///< allowed values for Text keys
};

class Config {
public:
    Config();

    [[nodiscard]] static const std::vector<KeySpec>& schema();
    [[nodiscard]] static const KeySpec& spec_of(const std::string& key);

    /// Merge a JSON object; `origin` names the layer in error messages.
    void merge(const Json& object, const std::string& origin);
    void merge_file(const std::filesystem::path& path);
    /// Apply "key=value". The value is read as JSON when possible, then as a
    /// comma-separated number list for list keys, then as a plain string.
    void set(const std::string& assignment);

    [[nodiscard]] bool has(const std::string& key) const;  ///< non-null
    [[nodiscard]] double number(const std::string& key) const;
    [[nodiscard]] int integer(const std::string& key) const;
    [[nodiscard]] std::uint64_t unsigned_integer(const std::string& key) const;
    [[nodiscard]] bool flag(const std::string& key) const;
    [[nodiscard]] std::string text(const std::string& key) const;
    [[nodiscard]] std::vector<double> numbers(const std::string& key) const;
    [[nodiscard]] std::optional<double> maybe_number(const std::string& key) const;

    [[nodiscard]] const Json& values() const noexcept { return values_; }
    /// The --set assignments in the order given, verbatim.
    [[nodiscard]] const std::vector<std::string>& overrides() const noexcept { return overrides_; }

private:
    void assign(const std::string& key, const Json& value, const std::string& origin);

    Json values_;
    std::vector<std::string> overrides_;
};

/// User-supplied layers on top of built-in and scenario defaults, applied in
/// this order: file, --set assignments, --seed.
struct ConfigLayers {
    std::optional<std::filesystem::path> file;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
};

[[nodiscard]] Config layered_config(const Json& defaults, const ConfigLayers& layers);

/// Parse JSON that may contain // and /* */ comments.
[[nodiscard]] Json parse_json_with_comments(const std::string& text, const std::string& origin);

struct ResolvedRun {
    ChainSpec chain;
    WavePacketSpec packet;
    DissipationRates rates;
    std::uint64_t seed = 1;
    std::vector<std::string> notes;  ///< every derived default, for run metadata
};

/// J~_N = (2 ln 2)^{1/4} sqrt(N / (2 delta)) J.
[[nodiscard]] double impedance_scale(int N, double delta, double J = 1.0);

/// Default lead length max(50, ceil(delta_x + 5 delta)).
[[nodiscard]] int default_lead_length(const WavePacketSpec& packet);

/// Wave-packet geometry: M from the lead rule when unset, Delta = g sqrt(N) - J
/// when unset, J' = J unless Jprime, Jprime_factor or Jprime_alt_factor is given.
[[nodiscard]] ResolvedRun resolve_packet_run(const Config& config);

/// Pumped chain: M = 0, all N sites in the cavity, no detuning.
[[nodiscard]] ResolvedRun resolve_pumped_run(const Config& config);

}  // namespace excitrans
