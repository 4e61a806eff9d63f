// Acceptance run: one PASS/FAIL line per headline criterion.
//
// Usage: excitrans_acceptance [output-dir]
//
// Scenario outputs (CSV, metadata, shards) land in the output directory, so a
// rerun reuses finished shards. Criteria listed in kKnownFailures are printed
// as FAIL when they fail but do not change the exit status; any other failure
// exits 1.

#include "excitrans/config.hpp"
#include "excitrans/csv.hpp"
#include "excitrans/scenarios.hpp"
#include "excitrans/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <initializer_list>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace excitrans;

namespace {

const std::set<std::string> kKnownFailures{"analytic-agreement", "scaling-laws", "steady-state", "dipolar"};

struct Criterion {
    std::string id;
    bool pass = true;
    std::vector<std::string> lines;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
    void info(const std::string& what) { lines.push_back("info " + what); }
};

std::string num(double x) {
    std::ostringstream s;
    s.precision(4);
    s << x;
    return s.str();
}

struct Runner {
    std::filesystem::path out;
    int threads = 1;

    ScenarioOutput run(const std::string& id, std::vector<std::string> sets = {},
                       const std::string& subdir = "") const {
        ScenarioOptions options;
        options.out = subdir.empty() ? out : out / subdir;
        options.threads = threads;
        options.layers.sets = std::move(sets);
        const auto start = std::chrono::steady_clock::now();
        ScenarioOutput result = run_scenario(id, options);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::fprintf(stderr, "  [%s%s] %zu rows, %d/%d jobs reused, %.1f s\n", id.c_str(),
                     subdir.empty() ? "" : (" " + subdir).c_str(), result.rows.size(), result.jobs_reused,
                     result.jobs_total, seconds);
        return result;
    }
};

/// Runtime targets only mean something for a cold run.
void timing(Criterion& c, std::initializer_list<const ScenarioOutput*> runs, double limit) {
    double seconds = 0.0;
    int reused = 0;
    for (const ScenarioOutput* o : runs) {
        seconds += o->metadata.at("wall_time_seconds").get<double>();
        reused += o->jobs_reused;
    }
    if (reused > 0) {
        c.info("wall time " + num(seconds) + " s with " + std::to_string(reused) + " reused jobs; target not assessed");
    } else {
        c.check(seconds < limit, "wall time " + num(seconds) + " s < " + num(limit) + " s");
    }
}

const Json& find_by(const Json& list, const std::string& key, double value) {
    for (const Json& item : list) {
        if (std::abs(item.at(key).get<double>() - value) < 1e-12) return item;
    }
    throw std::runtime_error("no entry with " + key + " = " + num(value));
}

const Json& find_series(const Json& list, const std::string& name) {
    for (const Json& item : list) {
        if (item.at("series").get<std::string>() == name) return item;
    }
    throw std::runtime_error("no series " + name);
}

bool in_range(double x, double lo, double hi) { return x >= lo && x <= hi; }

Criterion peak_placement(const Runner& r) {
    Criterion c;
    const ScenarioOutput o = r.run("fig2a");
    const Json& s = o.summary;
    const double w = s.at("w_quoted").get<double>();
    for (const char* branch : {"upper", "lower"}) {
        const Json& b = s.at(branch);
        const double offset = b.at("offset").get<double>();
        const double height = b.at("peak_T_ts").get<double>();
        c.check(std::abs(offset) <= w, std::string(branch) + " peak at " + num(b.at("peak_Delta").get<double>()) +
                                           ", offset " + num(offset) + " within w = " + num(w));
        c.check(height > 0.9, std::string(branch) + " peak height " + num(height) + " > 0.9");
    }
    timing(c, {&o}, 120.0);
    return c;
}

Criterion analytic_agreement(const Runner& r) {
    Criterion c;
    const ScenarioOutput o = r.run("fig2a");
    const Json& window = o.summary.at("upper_window");
    const double dev = window.at("max_dev_analytic").get<double>();
    c.check(dev < 0.05, "max |T_q packet average - T_ts| over the upper peak = " + num(dev) + " < 0.05");
    c.info("open-boundary Green's function vs T_ts: max deviation " + num(window.at("max_dev_obc").get<double>()));
    return c;
}

Criterion scaling_laws(const Runner& r) {
    Criterion c;
    const ScenarioOutput o = r.run("fig2c");
    const Json& s = o.summary;
    const Json& weak = s.at("weak_branch");
    for (const Json& n : weak.at("per_N")) {
        const double slope = n.at("fit_vs_g").at("slope").get<double>();
        c.check(in_range(slope, 3.5, 4.5),
                "N = " + num(n.at("N").get<double>()) + ": exponent vs g " + num(slope) + " in [3.5, 4.5]");
    }
    const double n_exp = weak.at("joint").at("N_exponent").get<double>();
    c.check(in_range(n_exp, -2.5, -1.5), "joint exponent vs N " + num(n_exp) + " in [-2.5, -1.5]");
    const double spread = weak.at("collapse").at("max_spread").get<double>();
    c.check(spread <= 0.10, "collapse vs g/sqrt(N): max relative spread " + num(spread) + " <= 0.10");
    const Json& small = s.at("small_g").at("joint");
    c.info("small-g window: joint exponents g " + num(small.at("g_exponent").get<double>()) + ", N " +
           num(small.at("N_exponent").get<double>()));
    return c;
}

Criterion headline(const Runner& r) {
    Criterion c;
    const ScenarioOutput o = r.run("fig1b");
    const Json& s = o.summary;
    const double T = s.at("T_ts").get<double>();
    c.check(T > 0.5, "T(t_s) = " + num(T) + " > 0.5");
    c.check(std::abs(s.at("t_s").get<double>() - 30.0) < 1e-9, "t_s = " + num(s.at("t_s").get<double>()));
    c.check(std::abs(s.at("t_l").get<double>() - 55.0) < 1e-9, "t_l = " + num(s.at("t_l").get<double>()));
    return c;
}

Criterion disorder_dichotomy(const Runner& r) {
    Criterion c;
    const ScenarioOutput desk = r.run("fig3a", {"seeds=50", "g_values=0,0.2"}, "fig3a_desk");
    const Json& series = desk.summary.at("series");
    const Json& g0 = find_by(series, "g", 0.0).at("T_tl_exponential");
    c.check(g0.at("slope").get<double>() < 0.0 && g0.at("r_squared").get<double>() > 0.9,
            "g = 0: log T_tl vs N slope " + num(g0.at("slope").get<double>()) + ", R^2 " +
                num(g0.at("r_squared").get<double>()) + " > 0.9");
    double ratio = 0.0;
    for (const Json& e : desk.summary.at("enhancement")) {
        if (e.at("N").get<int>() == 400 && std::abs(e.at("g").get<double>() - 0.2) < 1e-12) {
            ratio = e.at("T_ts_over_T_tl_g0").get<double>();
        }
    }
    c.check(ratio > 100.0, "T(g=0.2) / T(g=0) at N = 400: " + num(ratio) + " > 100");

    const ScenarioOutput strong = r.run(
        "fig3a", {"seeds=50", "g_values=0.2", "N_values=800,1600,3200,6400", "t_long_max_N=0"}, "fig3a_strong");
    const Json& fit = find_by(strong.summary.at("series"), "g", 0.2).at("T_ts_powerlaw_strong_coupling");
    const double slope = fit.value("slope", std::nan(""));
    c.check(in_range(slope, -2.5, -1.5), "g = 0.2 strong coupling (N 800..6400): exponent " + num(slope) +
                                             " in [-2.5, -1.5], R^2 " + num(fit.value("r_squared", 0.0)));
    timing(c, {&desk, &strong}, 1800.0);
    return c;
}

double max_continuity(const std::vector<CsvRow>& rows) {
    double worst = 0.0;
    for (const CsvRow& row : rows) {
        if (row.observable == "continuity_residual") worst = std::max(worst, std::abs(row.value));
    }
    return worst;
}

Criterion steady_state(const Runner& r, double& continuity) {
    Criterion c;
    const ScenarioOutput b = r.run("fig3b");
    const double enh = find_by(b.summary.at("series"), "g", 0.2).at("enhancement_over_g0").get<double>();
    c.check(enh > 10.0, "I_out(g=0.2) / I_out(g=0) at gamma_P = 0.5: " + num(enh) + " > 10");

    const ScenarioOutput cc = r.run("fig3c");
    const double slope = find_by(cc.summary.at("series"), "g", 0.2).at("powerlaw").at("slope").get<double>();
    c.check(in_range(slope, -2.5, -1.5), "I_out vs N at g = 0.2: exponent " + num(slope) + " in [-2.5, -1.5]");

    const ScenarioOutput d = r.run("fig3d");
    const double g0 = find_by(d.summary.at("per_kappa"), "kappa", 0.0).at("g_star").get<double>();
    const double g10 = find_by(d.summary.at("per_kappa"), "kappa", 10.0).at("g_star").get<double>();
    c.check(g10 > g0, "crossover g* rises from " + num(g0) + " (kappa 0) to " + num(g10) + " (kappa 10)");

    continuity = std::max({max_continuity(b.rows), max_continuity(cc.rows), max_continuity(d.rows)});
    return c;
}

Criterion oracles(double scenario_continuity) {
    Criterion c;
    for (const CheckResult& check : run_invariants(ValidationScale{}, 1)) {
        c.check(check.pass, check.name + ": " + num(check.measured) + " < " + num(check.tolerance));
    }
    c.check(scenario_continuity < 1e-9, "continuity residual over the steady-state scenario grids " +
                                            num(scenario_continuity) + " < 1e-9");
    return c;
}

Criterion all_to_all(const Runner& r) {
    Criterion c;
    const ScenarioOutput o = r.run("figS3");
    const Json& s = o.summary;
    const double offset = s.at("offset").get<double>();
    const double width = s.at("peak_fwhm").get<double>();
    const double T = s.at("peak_T_ts").get<double>();
    c.check(std::abs(offset) <= width, "peak at " + num(s.at("peak_Delta").get<double>()) + ", offset from N Jinf " +
                                           num(offset) + " within width " + num(width));
    c.check(std::abs(T - 1.0) <= 0.05, "peak T_ts = " + num(T));
    c.info("dominant eigenvalue " + num(s.at("dominant_eigenvalue").get<double>()));
    return c;
}

Criterion dipolar(const Runner& r) {
    Criterion c;
    const ScenarioOutput o = r.run("figA1");
    const Json& s = o.summary;
    for (const Json& p : s.at("NN_vs_LR")) {
        const double nn = p.at("NN").get<double>();
        const double lr = p.at("LR").get<double>();
        c.check(lr >= nn, "N = " + num(p.at("N").get<double>()) + ": LR " + num(lr) + " >= NN " + num(nn));
    }
    for (const char* name : {"NN", "LR"}) {
        const std::string preferred = find_series(s.at("series"), name).at("preferred").get<std::string>();
        c.check(preferred == "exponential", std::string(name) + " prefers " + preferred);
    }
    const std::string cavity = find_series(s.at("series"), "LR+cavity g=0.2").at("preferred").get<std::string>();
    c.check(cavity == "powerlaw", "LR+cavity g=0.2 prefers " + cavity);
    const std::string weak = find_series(s.at("series"), "LR+cavity g=0.02").at("preferred").get<std::string>();
    c.info("LR+cavity g=0.02 prefers " + weak);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    Runner runner;
    runner.out = argc > 1 ? argv[1] : "acceptance-out";
    runner.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    std::vector<Criterion> results;
    int unexpected = 0;
    auto record = [&](const std::string& id, auto&& make) {
        Criterion c;
        try {
            c = make();
        } catch (const std::exception& e) {
            c.check(false, std::string("error: ") + e.what());
        }
        c.id = id;
        const bool known = kKnownFailures.count(c.id) > 0;
        if (!c.pass && !known) ++unexpected;
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.id;
        if (!c.pass && known) std::cout << " (known failure)";
        if (c.pass && known) std::cout << " (listed as a known failure)";
        std::cout << '\n';
        for (const std::string& line : c.lines) std::cout << "     " << line << '\n';
        std::cout.flush();
        results.push_back(std::move(c));
    };

    double continuity = 0.0;
    record("peak-placement", [&] { return peak_placement(runner); });
    record("analytic-agreement", [&] { return analytic_agreement(runner); });
    record("scaling-laws", [&] { return scaling_laws(runner); });
    record("fig1b-headline", [&] { return headline(runner); });
    record("disorder-dichotomy", [&] { return disorder_dichotomy(runner); });
    record("steady-state", [&] { return steady_state(runner, continuity); });
    record("oracle-equivalences", [&] { return oracles(continuity); });
    record("all-to-all", [&] { return all_to_all(runner); });
    record("dipolar", [&] { return dipolar(runner); });

    const auto passed = std::count_if(results.begin(), results.end(), [](const Criterion& c) { return c.pass; });
    std::cout << passed << '/' << results.size() << " criteria pass; " << unexpected << " unexpected failure(s)\n";
    return unexpected == 0 ? 0 : 1;
}
