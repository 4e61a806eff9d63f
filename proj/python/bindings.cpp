#include "excitrans/config.hpp"
#include "excitrans/csv.hpp"
#include "excitrans/experiments.hpp"
#include "excitrans/fitting.hpp"
#include "excitrans/scattering.hpp"
#include "excitrans/scenarios.hpp"
#include "excitrans/validation.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace excitrans;

namespace {

Config config_from(const std::vector<std::string>& sets, std::optional<std::uint64_t> seed) {
    ConfigLayers layers;
    layers.sets = sets;
    layers.seed = seed;
    return layered_config(Json::object(), layers);
}

py::dict parameters(const ResolvedRun& r) {
    py::dict d;
    d["N"] = r.chain.N;
    d["M"] = r.chain.M;
    d["g"] = r.chain.g;
    d["Jprime"] = r.chain.Jprime;
    d["Delta"] = r.chain.delta();
    d["seed"] = r.seed;
    d["notes"] = r.notes;
    return d;
}

py::object json_to_python(const Json& j) {
    const py::module_ json = py::module_::import("json");
    return json.attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Compiled core of the excitrans package";
    m.attr("__version__") = EXCITRANS_VERSION;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<CsvSchemaError>(m, "CsvSchemaError", PyExc_ValueError);

    m.def("csv_columns", [] {
        std::vector<std::string> cols(kCsvColumns.begin(), kCsvColumns.end());
        return cols;
    });

    m.def(
        "polariton_energies",
        [](int N, double g, double J, double omega0) {
            ScatterParams p;
            p.N = N;
            p.g = g;
            p.J = J;
            p.omega0 = omega0;
            const PolaritonSpectrum s = polariton_energies(p);
            return py::make_tuple(s.omega_u, s.omega_d);
        },
        py::arg("N"), py::arg("g"), py::arg("J") = 1.0, py::arg("omega0") = 0.0,
        "Upper and lower polariton energies omega0 - J +- g sqrt(N).");

    m.def(
        "transmission_q",
        [](int N, double g, double Jprime, double Delta, double q, double J) {
            ScatterParams p;
            p.N = N;
            p.g = g;
            p.Jprime = Jprime;
            p.omega = Delta;
            p.q = q;
            p.J = J;
            const ScatteringAmplitudes a = transmission_exact(p);
            py::dict d;
            d["T"] = a.T;
            d["t"] = a.t;
            d["r"] = a.r;
            d["at_pole"] = a.at_pole;
            return d;
        },
        py::arg("N"), py::arg("g"), py::arg("Jprime"), py::arg("Delta"), py::arg("q"), py::arg("J") = 1.0,
        "Closed-form scattering amplitudes at quasi-momentum q.");

    m.def(
        "transmit",
        [](const std::vector<std::string>& sets, std::optional<std::uint64_t> seed) {
            const Config c = config_from(sets, seed);
            const ResolvedRun r = resolve_packet_run(c);
            const TwoTimescales two = [&] {
                py::gil_scoped_release release;
                return run_two_timescales({r.chain, r.packet, r.rates.kappa, propagation_method(c)});
            }();
            py::dict d = parameters(r);
            d["t_s"] = two.scales.t_short;
            d["t_l"] = two.scales.t_long;
            d["T_ts"] = two.at_short.transmission;
            d["T_tl"] = two.at_long.transmission;
            d["cavity_ts"] = two.at_short.cavity;
            return d;
        },
        py::arg("sets"), py::arg("seed") = py::none(),
        "Wave-packet run: T at t_s and t_l. `sets` holds key=value overrides.");

    m.def(
        "steady",
        [](const std::vector<std::string>& sets, std::optional<std::uint64_t> seed) {
            const Config c = config_from(sets, seed);
            const ResolvedRun r = resolve_pumped_run(c);
            const SteadyResult s = steady_current(r.chain, r.rates);
            py::dict d = parameters(r);
            d["I_out"] = s.current;
            d["drain_population"] = s.drain_population;
            d["cavity_population"] = s.cavity_population;
            d["continuity_residual"] = s.continuity_residual;
            return d;
        },
        py::arg("sets"), py::arg("seed") = py::none(), "Steady-state current of the pumped chain.");

    m.def(
        "scenario",
        [](const std::string& id, const std::filesystem::path& out, const std::vector<std::string>& sets,
           std::optional<std::uint64_t> seed, bool deep, int threads) {
            ScenarioOptions options;
            options.out = out;
            options.layers.sets = sets;
            options.layers.seed = seed;
            options.deep = deep;
            options.threads = threads;
            ScenarioOutput result;
            {
                py::gil_scoped_release release;
                result = run_scenario(id, options);
            }
            py::dict d;
            d["csv"] = result.csv_path;
            d["metadata"] = result.metadata_path;
            d["rows"] = result.rows.size();
            d["summary"] = json_to_python(result.summary);
            return d;
        },
        py::arg("id"), py::arg("out"), py::arg("sets") = std::vector<std::string>{}, py::arg("seed") = py::none(),
        py::arg("deep") = false, py::arg("threads") = 1, "Run a figure scenario and return its summary.");

    m.def("scenario_ids", [] {
        std::vector<std::string> ids;
        for (const ScenarioDefinition& s : scenario_catalog()) ids.push_back(s.id);
        return ids;
    });

    m.def(
        "fit_scaling",
        [](const std::vector<double>& xs, const std::vector<double>& ys, const std::string& model) {
            ScalingModel kind;
            if (model == "power_law" || model == "powerlaw") {
                kind = ScalingModel::PowerLaw;
            } else if (model == "exponential") {
                kind = ScalingModel::Exponential;
            } else {
                throw py::value_error("model must be 'power_law' or 'exponential'");
            }
            const ScalingFit f = fit_scaling(xs, ys, kind);
            py::dict d;
            d["slope"] = f.slope;
            d["intercept"] = f.intercept;
            d["r_squared"] = f.r_squared;
            d["points"] = f.points;
            return d;
        },
        py::arg("xs"), py::arg("ys"), py::arg("model"), "Least-squares scaling fit in log space.");

    m.def(
        "validate",
        [](std::uint64_t seed) {
            py::list out;
            for (const CheckResult& r : run_invariants(quick_validation(), seed)) {
                py::dict d;
                d["name"] = r.name;
                d["measured"] = r.measured;
                d["tolerance"] = r.tolerance;
                d["pass"] = r.pass;
                out.append(d);
            }
            return out;
        },
        py::arg("seed") = 1, "Quick invariant suite.");
}
