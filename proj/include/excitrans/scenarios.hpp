// scenarios.hpp - the figure scenarios as seeded, resumable sweeps.
//
// A scenario turns a layered Config into a list of independent jobs. Each job
// writes a shard under <out>/shards/<id>/ named by a hash of its inputs, so an
// interrupted run resumes where it stopped. Shards are merged in job order
// into <out>/<id>.csv; ensemble scenarios append one "mean" and one "stderr"
// row per parameter point. The JSON sidecar <out>/<id>.meta.json carries the
// resolved parameters, the caption quote, fitted summaries, versions, the
// wall time and the only timestamp.

#pragma once

#include "excitrans/config.hpp"
#include "excitrans/csv.hpp"
#include "excitrans/experiments.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace excitrans {

struct ScenarioJob {
    std::string label;  ///< human-readable parameter tuple, part of the shard hash
    std::function<std::vector<CsvRow>()> run;
};

struct ScenarioPlan {
    std::vector<ScenarioJob> jobs;
    bool ensemble = false;           ///< append mean / stderr rows per parameter point
    std::vector<std::string> notes;  ///< derived defaults and conventions
};

struct ScenarioDefinition {
    std::string id;
    std::string caption;      ///< quote from the figure caption the defaults follow
    std::string description;  ///< what the CSV contains
    Json defaults;            ///< scenario layer on top of the built-in defaults
    Json deep_defaults;       ///< extra layer for --deep
    std::function<ScenarioPlan(const Config&)> plan;
    std::function<Json(const std::vector<CsvRow>&, const Config&)> summarize;
};

[[nodiscard]] const std::vector<ScenarioDefinition>& scenario_catalog();
/// Throws ConfigError for an unknown id.
[[nodiscard]] const ScenarioDefinition& find_scenario(const std::string& id);

struct ScenarioOptions {
    std::filesystem::path out = "excitrans-out";
    int threads = 1;
    bool deep = false;
    ConfigLayers layers;
};

struct ScenarioOutput {
    std::vector<CsvRow> rows;
    Json summary;
    Json metadata;
    std::filesystem::path csv_path;
    std::filesystem::path metadata_path;
    int jobs_total = 0;
    int jobs_reused = 0;
};

[[nodiscard]] Config scenario_config(const ScenarioDefinition& scenario, const ScenarioOptions& options);
ScenarioOutput run_scenario(const std::string& id, const ScenarioOptions& options);

/// Per-point mean and stderr rows for every group of rows that share all
/// columns except seed and value. Rows whose seed is not an integer are ignored.
[[nodiscard]] std::vector<CsvRow> aggregate_rows(const std::vector<CsvRow>& rows);

/// Power-law fits of max_T_ts rows (fig2c layout) restricted to
/// g / sqrt(N) in [x_lo, x_hi]: per-N exponent in g, a joint fit in (g, N)
/// and the relative spread across N at every shared g / sqrt(N).
[[nodiscard]] Json fig2c_scaling(const std::vector<CsvRow>& rows, const std::vector<int>& Ns, double x_lo, double x_hi);

// Row builders shared with the CLI -------------------------------------------

/// One row with the chain, rates and disorder columns filled in.
[[nodiscard]] CsvRow make_row(const std::string& scenario, const std::string& seed, const ChainSpec& chain,
                              const DissipationRates& rates, const std::string& observable,
                              std::optional<double> t, double value);

/// Trajectory rows (T, cavity_occupation, in_cavity on the dt grid up to
/// t_end) plus T_ts, T_tl, t_s, t_l and, with `window`, T_window_max.
[[nodiscard]] std::vector<CsvRow> trajectory_rows(const std::string& scenario, const ResolvedRun& run, double dt,
                                                  std::optional<double> t_end, bool window,
                                                  PropagationMethod method = PropagationMethod::Auto);

/// Detuning sweep rows: T_ts, T_tl, T_analytic (packet-averaged periodic
/// closed form), T_q (closed form at q0) and T_obc (packet-averaged exact
/// open-boundary transmission, nearest-neighbour and all-to-all models).
[[nodiscard]] std::vector<CsvRow> spectrum_rows(const std::string& scenario, const ResolvedRun& run,
                                                std::span<const double> deltas,
                                                PropagationMethod method = PropagationMethod::Auto);

/// Write <out>/<name>.csv and <out>/<name>.meta.json. `metadata` gains the
/// versions, wall time and timestamp fields; the completed metadata is returned.
Json write_outputs(const std::filesystem::path& out, const std::string& name, const std::vector<CsvRow>& rows,
                   Json metadata, double wall_seconds, std::filesystem::path* csv_path = nullptr,
                   std::filesystem::path* metadata_path = nullptr);

/// Library, Eigen, Boost and compiler versions.
[[nodiscard]] Json version_info();

[[nodiscard]] PropagationMethod propagation_method(const Config& config);

}  // namespace excitrans
