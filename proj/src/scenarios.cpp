#include "excitrans/scenarios.hpp"

#include "excitrans/fitting.hpp"
#include "excitrans/scattering.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#ifndef EXCITRANS_VERSION
#define EXCITRANS_VERSION "0.0.0"
#endif

namespace excitrans {

namespace fs = std::filesystem;

namespace {

// Small utilities -------------------------------------------------------------

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, n > 1 ? static_cast<double>(i) / (n - 1) : 0.0);
    }
    return out;
}

std::vector<double> linear_grid(double lo, double hi, double step) {
    std::vector<double> out;
    const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    for (int i = 0; i <= n; ++i) out.push_back(lo + step * i);
    return out;
}

Json json_list(const std::vector<double>& values) {
    Json out = Json::array();
    for (double v : values) out.push_back(v);
    return out;
}

std::vector<int> integer_values(const Config& c, const std::string& key) {
    std::vector<int> out;
    for (double v : c.numbers(key)) out.push_back(static_cast<int>(std::lround(v)));
    return out;
}

std::string tagged(const std::string& name, const std::string& key, const std::string& value) {
    return name + "|" + key + "=" + value;
}

Config patched(const Config& base, const Json& patch) {
    Config c = base;
    c.merge(patch, "scenario grid");
    return c;
}

PacketRun packet_run(const ResolvedRun& r, PropagationMethod method) {
    return {r.chain, r.packet, r.rates.kappa, method};
}

double upper_polariton_detuning(const ChainSpec& c) { return c.collective_coupling() - c.inner_hopping(); }

double quoted_w(const ChainSpec& c, double q) { return c.Jprime * c.Jprime / (c.N * std::abs(2.0 * c.J * std::sin(q))); }

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

Json fit_json(const std::vector<double>& xs, const std::vector<double>& ys, ScalingModel model) {
    try {
        const ScalingFit f = fit_scaling(xs, ys, model);
        return {{"model", model_name(model)}, {"slope", f.slope}, {"intercept", f.intercept},
                {"r_squared", f.r_squared}, {"points", f.points}};
    } catch (const std::invalid_argument& e) {
        return {{"model", model_name(model)}, {"error", e.what()}, {"points", static_cast<int>(xs.size())}};
    }
}

bool is_integer_seed(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
}

/// Rows with the given observable, taking the "mean" row when one exists.
std::vector<const CsvRow*> pick(const std::vector<CsvRow>& rows, const std::string& observable,
                                const std::function<bool(const CsvRow&)>& extra = {}) {
    bool has_mean = false;
    for (const CsvRow& r : rows) {
        if (r.observable == observable && r.seed == "mean") has_mean = true;
    }
    std::vector<const CsvRow*> out;
    for (const CsvRow& r : rows) {
        if (r.observable != observable) continue;
        if (has_mean ? r.seed != "mean" : !is_integer_seed(r.seed)) continue;
        if (extra && !extra(r)) continue;
        out.push_back(&r);
    }
    return out;
}

std::optional<double> first_value(const std::vector<CsvRow>& rows, const std::string& observable,
                                  const std::function<bool(const CsvRow&)>& extra = {}) {
    const auto found = pick(rows, observable, extra);
    if (found.empty()) return std::nullopt;
    return found.front()->value;
}

Json optional_json(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

bool same(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a) + std::abs(b)); }

// Packet runs ----------------------------------------------------------------------

struct PeakScan {
    Maximum peak;
    std::optional<double> fwhm;
};

PeakScan scan_peak(const PacketRun& base, double t, double centre, double half_window, int coarse,
                   double fwhm_step, double fwhm_reach) {
    const auto f = transmission_vs_detuning(base, t);
    PeakScan s;
    s.peak = maximize_scan(f, centre - half_window, centre + half_window, coarse, 1e-4);
    if (fwhm_step > 0.0) s.fwhm = numeric_fwhm(f, s.peak, fwhm_step, fwhm_reach);
    return s;
}

std::vector<CsvRow> peak_rows(const std::string& id, const std::string& seed, const ResolvedRun& r,
                              const PeakScan& scan, const std::string& tag_key, const std::string& tag_value) {
    ChainSpec at = r.chain;
    set_detuning(at, scan.peak.x);
    auto name = [&](const std::string& base) { return tag_key.empty() ? base : tagged(base, tag_key, tag_value); };
    std::vector<CsvRow> rows;
    const double t_s = timescales(r.packet, at).t_short;
    rows.push_back(make_row(id, seed, at, r.rates, name("peak_Delta"), std::nullopt, scan.peak.x));
    rows.push_back(make_row(id, seed, at, r.rates, name("peak_T_ts"), t_s, scan.peak.value));
    rows.push_back(make_row(id, seed, at, r.rates, name("peak_fwhm"), std::nullopt,
                            scan.fwhm ? *scan.fwhm : std::nan("")));
    return rows;
}

// Scenario bodies -------------------------------------------------------------------

ScenarioPlan plan_fig1b(const Config& c) {
    ScenarioPlan plan;
    const ResolvedRun r = resolve_packet_run(c);
    plan.notes = r.notes;
    if (!packet_fits_lead(r.packet, r.chain)) plan.notes.push_back("warning: packet tail reaches the outer lead end");
    const double dt = c.number("dt");
    const auto t_end = c.maybe_number("t_end");
    const bool window = c.flag("window");
    const auto method = propagation_method(c);
    plan.jobs.push_back({"trajectory", [=] { return trajectory_rows("fig1b", r, dt, t_end, window, method); }});
    return plan;
}

Json summarize_fig1b(const std::vector<CsvRow>& rows, const Config&) {
    const auto ts = first_value(rows, "T_ts");
    return {{"T_ts", optional_json(ts)},
            {"T_tl", optional_json(first_value(rows, "T_tl"))},
            {"t_s", optional_json(first_value(rows, "t_s"))},
            {"t_l", optional_json(first_value(rows, "t_l"))},
            {"T_ts_above_half", ts && *ts > 0.5}};
}

ScenarioPlan plan_fig2a(const Config& c) {
    ScenarioPlan plan;
    const ResolvedRun r = resolve_packet_run(c);
    plan.notes = r.notes;
    plan.notes.push_back("T_analytic is the periodic closed form averaged over the packet momenta (std 1/(2 delta))");
    plan.notes.push_back("T_obc is the exact open-boundary stationary transmission with the same averaging");
    const auto method = propagation_method(c);
    const double G = r.chain.collective_coupling();
    const double Jin = r.chain.inner_hopping();
    std::vector<std::pair<std::string, std::vector<double>>> windows = {
        {"lower", linear_grid(-G - Jin - 6.0, -G - Jin + 6.0, 0.1)},
        {"centre", linear_grid(-6.0, 6.0, 0.25)},
        {"upper", linear_grid(G - Jin - 6.0, G - Jin + 6.0, 0.1)},
    };
    for (const auto& [name, deltas] : windows) {
        for (std::size_t start = 0; start < deltas.size(); start += 40) {
            std::vector<double> chunk(deltas.begin() + static_cast<std::ptrdiff_t>(start),
                                      deltas.begin() + static_cast<std::ptrdiff_t>(std::min(start + 40, deltas.size())));
            plan.jobs.push_back({"sweep " + name + " " + std::to_string(start),
                                 [=] { return spectrum_rows("fig2a", r, chunk, method); }});
        }
    }
    for (const auto& [branch, centre] : {std::pair<std::string, double>{"upper", G - Jin}, {"lower", -G - Jin}}) {
        plan.jobs.push_back({"peak " + branch, [=, branch = branch, centre = centre] {
                                 const PacketRun pr = packet_run(r, method);
                                 const double t_s = timescales(r.packet, r.chain).t_short;
                                 const PeakScan scan = scan_peak(pr, t_s, centre, 4.0, 33, 0.1, 20.0);
                                 return peak_rows("fig2a", std::to_string(r.seed), r, scan, "branch", branch);
                             }});
    }
    return plan;
}

Json summarize_fig2a(const std::vector<CsvRow>& rows, const Config& c) {
    const ResolvedRun r = resolve_packet_run(c);
    const double G = r.chain.collective_coupling();
    const double Jin = r.chain.inner_hopping();
    const double w = quoted_w(r.chain, r.packet.q0);
    Json out;
    out["w_quoted"] = w;
    out["fwhm_lorentzian"] = 4.0 * w;
    for (const auto& [branch, expected] : {std::pair<std::string, double>{"upper", G - Jin}, {"lower", -G - Jin}}) {
        const auto x = first_value(rows, tagged("peak_Delta", "branch", branch));
        const auto t = first_value(rows, tagged("peak_T_ts", "branch", branch));
        const auto fw = first_value(rows, tagged("peak_fwhm", "branch", branch));
        Json b{{"expected_Delta", expected}, {"peak_Delta", optional_json(x)}, {"peak_T_ts", optional_json(t)},
               {"peak_fwhm_numeric", optional_json(fw)}};
        if (x) {
            b["offset"] = *x - expected;
            b["offset_over_w"] = (*x - expected) / w;
        }
        out[branch] = b;
    }
    // Deviation across the upper peak, one Lorentzian FWHM on each side.
    const double centre = G - Jin;
    auto in_window = [&](const CsvRow& row) { return std::abs(row.Delta - centre) <= 4.0 * w + 1e-9; };
    double dev_analytic = 0.0;
    double dev_obc = 0.0;
    int points = 0;
    for (const CsvRow* ts : pick(rows, "T_ts", in_window)) {
        for (const CsvRow* an : pick(rows, "T_analytic", in_window)) {
            if (same(an->Delta, ts->Delta)) dev_analytic = std::max(dev_analytic, std::abs(an->value - ts->value));
        }
        for (const CsvRow* ob : pick(rows, "T_obc", in_window)) {
            if (same(ob->Delta, ts->Delta)) dev_obc = std::max(dev_obc, std::abs(ob->value - ts->value));
        }
        ++points;
    }
    out["upper_window"] = {{"half_width", 4.0 * w}, {"points", points}, {"max_dev_analytic", dev_analytic},
                           {"max_dev_obc", dev_obc}};
    return out;
}

std::vector<CsvRow> max_ts_rows(const std::string& id, const ResolvedRun& r, PropagationMethod method) {
    const PacketRun pr = packet_run(r, method);
    const double t_s = timescales(r.packet, r.chain).t_short;
    const PeakScan scan = scan_peak(pr, t_s, upper_polariton_detuning(r.chain), 4.0, 9, 0.0, 0.0);
    ChainSpec at = r.chain;
    set_detuning(at, scan.peak.x);
    return {make_row(id, std::to_string(r.seed), at, r.rates, "max_T_ts", t_s, scan.peak.value)};
}

ScenarioPlan plan_fig2b(const Config& c) {
    ScenarioPlan plan;
    plan.notes.push_back("max over Delta in [g sqrt(N) - J - 4, g sqrt(N) - J + 4] (upper polariton window)");
    const auto method = propagation_method(c);
    for (int N : integer_values(c, "N_values")) {
        for (double g : c.numbers("g_values")) {
            const ResolvedRun r = resolve_packet_run(patched(c, {{"N", N}, {"g", g}, {"Delta", 0.0}}));
            plan.jobs.push_back({"N=" + std::to_string(N) + " g=" + format_number(g),
                                 [=] { return max_ts_rows("fig2b", r, method); }});
        }
    }
    return plan;
}

Json summarize_fig2b(const std::vector<CsvRow>& rows, const Config& c) {
    Json per_N = Json::array();
    for (int N : integer_values(c, "N_values")) {
        auto pts = pick(rows, "max_T_ts", [N](const CsvRow& r) { return r.N == N; });
        std::sort(pts.begin(), pts.end(), [](const CsvRow* a, const CsvRow* b) { return a->g < b->g; });
        Json entry{{"N", N}, {"g_half", nullptr}};
        for (std::size_t i = 1; i < pts.size(); ++i) {
            const double a = pts[i - 1]->value;
            const double b = pts[i]->value;
            if (a < 0.5 && b >= 0.5) {
                const double f = (0.5 - a) / (b - a);
                const double g = std::exp(std::log(pts[i - 1]->g) + f * (std::log(pts[i]->g) - std::log(pts[i - 1]->g)));
                entry["g_half"] = g;
                entry["g_half_over_sqrtN"] = g / std::sqrt(static_cast<double>(N));
                break;
            }
        }
        per_N.push_back(entry);
    }
    return {{"half_transmission_contour", per_N}};
}

ScenarioPlan plan_fig2c(const Config& c) {
    ScenarioPlan plan;
    plan.notes.push_back("max over Delta in [g sqrt(N) - J - 4, g sqrt(N) - J + 4] (upper polariton window)");
    const auto method = propagation_method(c);
    for (int N : integer_values(c, "N_values")) {
        for (double x : c.numbers("g_over_sqrtN_values")) {
            const double g = x * std::sqrt(static_cast<double>(N));
            const ResolvedRun r = resolve_packet_run(patched(c, {{"N", N}, {"g", g}, {"Delta", 0.0}}));
            plan.jobs.push_back({"N=" + std::to_string(N) + " x=" + format_number(x),
                                 [=] { return max_ts_rows("fig2c", r, method); }});
        }
    }
    return plan;
}

}  // namespace

Json fig2c_scaling(const std::vector<CsvRow>& rows, const std::vector<int>& Ns, double x_lo, double x_hi) {
    std::vector<double> gs;
    std::vector<double> ns;
    std::vector<double> ts;
    Json per_N = Json::array();
    for (int N : Ns) {
        std::vector<double> g_n;
        std::vector<double> t_n;
        for (const CsvRow* r : pick(rows, "max_T_ts", [N](const CsvRow& row) { return row.N == N; })) {
            const double x = r->g / std::sqrt(static_cast<double>(N));
            if (x < x_lo - 1e-9 || x > x_hi + 1e-9 || !(r->value > 0.0)) continue;
            g_n.push_back(r->g);
            t_n.push_back(r->value);
            gs.push_back(r->g);
            ns.push_back(N);
            ts.push_back(r->value);
        }
        per_N.push_back({{"N", N}, {"fit_vs_g", fit_json(g_n, t_n, ScalingModel::PowerLaw)}});
    }
    Json out{{"range", {x_lo, x_hi}}, {"per_N", per_N}};
    try {
        const PowerLaw2D joint = fit_power_law_2d(gs, ns, ts);
        out["joint"] = {{"g_exponent", joint.exponent_x1}, {"N_exponent", joint.exponent_x2},
                        {"r_squared", joint.r_squared}, {"points", static_cast<int>(ts.size())}};
    } catch (const std::invalid_argument& e) {
        out["joint"] = {{"error", e.what()}};
    }
    // Collapse: spread across N at every g / sqrt(N) present for all N.
    std::map<long long, std::vector<double>> by_x;
    for (int N : Ns) {
        for (const CsvRow* r : pick(rows, "max_T_ts", [N](const CsvRow& row) { return row.N == N; })) {
            const double x = r->g / std::sqrt(static_cast<double>(N));
            if (x < x_lo - 1e-9 || x > x_hi + 1e-9) continue;
            by_x[std::llround(x * 1e6)].push_back(r->value);
        }
    }
    double worst = 0.0;
    Json spreads = Json::array();
    for (const auto& [key, values] : by_x) {
        if (values.size() != Ns.size()) continue;
        const double s = relative_spread(values);
        worst = std::max(worst, s);
        spreads.push_back({{"g_over_sqrtN", static_cast<double>(key) * 1e-6}, {"spread", s}});
    }
    out["collapse"] = {{"max_spread", worst}, {"points", spreads}};
    return out;
}

namespace {

Json summarize_fig2c(const std::vector<CsvRow>& rows, const Config& c) {
    const auto Ns = integer_values(c, "N_values");
    return {{"weak_branch", fig2c_scaling(rows, Ns, 0.1, 0.5)},
            {"small_g", fig2c_scaling(rows, Ns, 0.05, 0.2)},
            {"all", fig2c_scaling(rows, Ns, 0.0, 1e9)}};
}

ScenarioPlan plan_fig2d(const Config& c) {
    ScenarioPlan plan;
    const auto method = propagation_method(c);
    for (double kappa : c.numbers("kappa_values")) {
        const ResolvedRun r = resolve_packet_run(patched(c, {{"kappa", kappa}}));
        if (plan.notes.empty()) plan.notes = r.notes;
        plan.jobs.push_back({"kappa=" + format_number(kappa), [=] {
                                 const PacketRun pr = packet_run(r, method);
                                 const double t_s = timescales(r.packet, r.chain).t_short;
                                 const double centre = upper_polariton_detuning(r.chain);
                                 const auto f = transmission_vs_detuning(pr, t_s);
                                 std::vector<CsvRow> rows;
                                 for (double d : linear_grid(centre - 8.0, centre + 8.0, 0.2)) {
                                     ChainSpec at = r.chain;
                                     set_detuning(at, d);
                                     rows.push_back(make_row("fig2d", std::to_string(r.seed), at, r.rates, "T_ts", t_s, f(d)));
                                 }
                                 const PeakScan scan = scan_peak(pr, t_s, centre, 4.0, 33, 0.1, 20.0);
                                 auto peaks = peak_rows("fig2d", std::to_string(r.seed), r, scan, "", "");
                                 rows.insert(rows.end(), peaks.begin(), peaks.end());
                                 return rows;
                             }});
    }
    return plan;
}

Json summarize_fig2d(const std::vector<CsvRow>& rows, const Config& c) {
    Json per = Json::array();
    for (double kappa : c.numbers("kappa_values")) {
        auto at = [kappa](const CsvRow& r) { return same(r.kappa, kappa); };
        per.push_back({{"kappa", kappa},
                       {"peak_T_ts", optional_json(first_value(rows, "peak_T_ts", at))},
                       {"peak_fwhm", optional_json(first_value(rows, "peak_fwhm", at))},
                       {"peak_Delta", optional_json(first_value(rows, "peak_Delta", at))}});
    }
    return {{"per_kappa", per}};
}

std::vector<std::uint64_t> seed_list(const Config& c, int fallback) {
    const int n = c.has("seeds") ? c.integer("seeds") : fallback;
    if (n < 1) throw ConfigError("seeds must be >= 1");
    std::vector<std::uint64_t> out;
    for (int i = 0; i < n; ++i) out.push_back(c.unsigned_integer("seed") + static_cast<std::uint64_t>(i));
    return out;
}

ScenarioPlan plan_fig3a(const Config& c) {
    ScenarioPlan plan;
    plan.ensemble = true;
    plan.notes.push_back("Delta = g sqrt(N) - J per point; T_tl is skipped above N = t_long_max_N");
    plan.notes.push_back("the caption plots T_tl for g = 0 and T_ts for g > 0; both are emitted");
    const auto method = propagation_method(c);
    const auto seeds = seed_list(c, 200);
    const int tl_max = c.integer("t_long_max_N");
    for (double g : c.numbers("g_values")) {
        for (int N : integer_values(c, "N_values")) {
            const Config point = patched(c, {{"N", N}, {"g", g}});
            plan.jobs.push_back({"g=" + format_number(g) + " N=" + std::to_string(N), [=] {
                                     std::vector<CsvRow> rows;
                                     for (std::uint64_t s : seeds) {
                                         const ResolvedRun r = resolve_packet_run(patched(point, {{"seed", s}}));
                                         const PacketRun pr = packet_run(r, method);
                                         const Timescales ts = timescales(r.packet, r.chain);
                                         std::vector<double> times{ts.t_short};
                                         if (N <= tl_max) times.push_back(ts.t_long);
                                         const auto samples = run_packet(pr, times);
                                         const std::string seed = std::to_string(s);
                                         rows.push_back(make_row("fig3a", seed, r.chain, r.rates, "T_ts", ts.t_short,
                                                                 samples[0].transmission));
                                         if (samples.size() > 1) {
                                             rows.push_back(make_row("fig3a", seed, r.chain, r.rates, "T_tl", ts.t_long,
                                                                     samples[1].transmission));
                                             rows.push_back(make_row("fig3a", seed, r.chain, r.rates, "in_cavity_tl",
                                                                     ts.t_long, samples[1].remainder));
                                         }
                                     }
                                     return rows;
                                 }});
        }
    }
    return plan;
}

/// Collective strong coupling: g sqrt(N) > max(w, 4J, kappa).
bool strong_coupling(const CsvRow& r, double q) {
    const double w = r.Jprime * r.Jprime / (r.N * std::abs(2.0 * std::sin(q)));
    return r.g * std::sqrt(static_cast<double>(r.N)) > std::max({w, 4.0, r.kappa});
}

Json summarize_fig3a(const std::vector<CsvRow>& rows, const Config& c) {
    Json out;
    const double q = c.number("q");
    Json series = Json::array();
    std::map<double, std::map<int, double>> means_ts;
    std::map<int, double> g0_tl;
    for (double g : c.numbers("g_values")) {
        auto with_g = [g](const CsvRow& r) { return same(r.g, g); };
        std::vector<double> n_tl, t_tl, n_ts, t_ts, n_strong, t_strong;
        for (const CsvRow* r : pick(rows, "T_tl", with_g)) {
            if (!(r->value > 0.0)) continue;
            n_tl.push_back(r->N);
            t_tl.push_back(r->value);
            if (g == 0.0) g0_tl[r->N] = r->value;
        }
        for (const CsvRow* r : pick(rows, "T_ts", with_g)) {
            means_ts[g][r->N] = r->value;
            if (!(r->value > 0.0)) continue;
            n_ts.push_back(r->N);
            t_ts.push_back(r->value);
            if (strong_coupling(*r, q)) {
                n_strong.push_back(r->N);
                t_strong.push_back(r->value);
            }
        }
        Json s{{"g", g}};
        s["T_tl_exponential"] = fit_json(n_tl, t_tl, ScalingModel::Exponential);
        s["T_tl_powerlaw"] = fit_json(n_tl, t_tl, ScalingModel::PowerLaw);
        s["T_ts_powerlaw"] = fit_json(n_ts, t_ts, ScalingModel::PowerLaw);
        s["T_ts_powerlaw_strong_coupling"] = fit_json(n_strong, t_strong, ScalingModel::PowerLaw);
        s["strong_coupling_N"] = n_strong;
        series.push_back(s);
    }
    out["series"] = series;
    Json ratios = Json::array();
    for (const auto& [g, by_n] : means_ts) {
        if (g == 0.0) continue;
        for (const auto& [N, t] : by_n) {
            const auto it = g0_tl.find(N);
            if (it != g0_tl.end() && it->second > 0.0) {
                ratios.push_back({{"g", g}, {"N", N}, {"T_ts_over_T_tl_g0", t / it->second}});
            }
        }
    }
    out["enhancement"] = ratios;
    return out;
}

ScenarioPlan plan_fig3b(const Config& c) {
    ScenarioPlan plan;
    plan.notes.push_back("single disorder realization (base seed); kappa = 0 unless set");
    for (double g : c.numbers("g_values")) {
        const Config point = patched(c, {{"g", g}});
        plan.jobs.push_back({"g=" + format_number(g), [=] {
                                 std::vector<CsvRow> rows;
                                 for (double gp : point.numbers("gamma_P_values")) {
                                     const ResolvedRun r = resolve_pumped_run(patched(point, {{"gamma_P", gp}}));
                                     const SteadyResult s = steady_current(r.chain, r.rates);
                                     const std::string seed = std::to_string(r.seed);
                                     rows.push_back(make_row("fig3b", seed, r.chain, r.rates, "I_out", std::nullopt, s.current));
                                     rows.push_back(make_row("fig3b", seed, r.chain, r.rates, "continuity_residual",
                                                             std::nullopt, s.continuity_residual));
                                 }
                                 return rows;
                             }});
    }
    return plan;
}

Json summarize_fig3b(const std::vector<CsvRow>& rows, const Config& c) {
    Json out = Json::array();
    for (double g : c.numbers("g_values")) {
        auto pts = pick(rows, "I_out", [g](const CsvRow& r) { return same(r.g, g); });
        std::sort(pts.begin(), pts.end(), [](const CsvRow* a, const CsvRow* b) { return a->gamma_P < b->gamma_P; });
        bool monotone = true;
        for (std::size_t i = 1; i < pts.size(); ++i) monotone = monotone && pts[i]->value >= pts[i - 1]->value;
        Json entry{{"g", g}, {"monotone_in_gamma_P", monotone}};
        const auto at = first_value(rows, "I_out", [g](const CsvRow& r) { return same(r.g, g) && same(r.gamma_P, 0.5); });
        const auto base = first_value(rows, "I_out", [](const CsvRow& r) { return r.g == 0.0 && same(r.gamma_P, 0.5); });
        entry["I_out_at_gamma_P_0.5"] = optional_json(at);
        if (at && base && *base > 0.0) entry["enhancement_over_g0"] = *at / *base;
        out.push_back(entry);
    }
    return {{"series", out}};
}

ScenarioPlan plan_fig3c(const Config& c) {
    ScenarioPlan plan;
    plan.notes.push_back("single disorder realization (base seed); bonds of smaller N are a prefix of larger N");
    for (double g : c.numbers("g_values")) {
        for (int N : integer_values(c, "N_values")) {
            const ResolvedRun r = resolve_pumped_run(patched(c, {{"g", g}, {"N", N}}));
            plan.jobs.push_back({"g=" + format_number(g) + " N=" + std::to_string(N), [=] {
                                     const SteadyResult s = steady_current(r.chain, r.rates);
                                     const std::string seed = std::to_string(r.seed);
                                     return std::vector<CsvRow>{
                                         make_row("fig3c", seed, r.chain, r.rates, "I_out", std::nullopt, s.current),
                                         make_row("fig3c", seed, r.chain, r.rates, "continuity_residual", std::nullopt,
                                                  s.continuity_residual)};
                                 }});
        }
    }
    return plan;
}

Json summarize_fig3c(const std::vector<CsvRow>& rows, const Config& c) {
    Json out = Json::array();
    for (double g : c.numbers("g_values")) {
        std::vector<double> ns, is;
        for (const CsvRow* r : pick(rows, "I_out", [g](const CsvRow& row) { return same(row.g, g); })) {
            ns.push_back(r->N);
            is.push_back(r->value);
        }
        out.push_back({{"g", g},
                       {"exponential", fit_json(ns, is, ScalingModel::Exponential)},
                       {"powerlaw", fit_json(ns, is, ScalingModel::PowerLaw)}});
    }
    return {{"series", out}};
}

ScenarioPlan plan_fig3d(const Config& c) {
    ScenarioPlan plan;
    plan.notes.push_back("single disorder realization (base seed)");
    for (double kappa : c.numbers("kappa_values")) {
        for (double g : c.numbers("g_values")) {
            const ResolvedRun r = resolve_pumped_run(patched(c, {{"g", g}, {"kappa", kappa}}));
            plan.jobs.push_back({"kappa=" + format_number(kappa) + " g=" + format_number(g), [=] {
                                     const SteadyResult s = steady_current(r.chain, r.rates);
                                     const std::string seed = std::to_string(r.seed);
                                     return std::vector<CsvRow>{
                                         make_row("fig3d", seed, r.chain, r.rates, "I_out", std::nullopt, s.current),
                                         make_row("fig3d", seed, r.chain, r.rates, "continuity_residual", std::nullopt,
                                                  s.continuity_residual)};
                                 }});
        }
    }
    return plan;
}

Json summarize_fig3d(const std::vector<CsvRow>& rows, const Config& c) {
    Json per = Json::array();
    const int N = c.integer("N");
    for (double kappa : c.numbers("kappa_values")) {
        auto pts = pick(rows, "I_out", [kappa](const CsvRow& r) { return same(r.kappa, kappa); });
        std::sort(pts.begin(), pts.end(), [](const CsvRow* a, const CsvRow* b) { return a->g < b->g; });
        std::vector<double> gs, is;
        for (const CsvRow* r : pts) {
            if (r->g > 0.0) {
                gs.push_back(r->g);
                is.push_back(r->value);
            }
        }
        Json entry{{"kappa", kappa}, {"g_star", nullptr}};
        try {
            if (const auto cross = crossover_locator(gs, is)) {
                entry["g_star"] = cross->x_star;
                entry["g_star_sqrtN"] = cross->x_star * std::sqrt(static_cast<double>(N));
                entry["max_log_slope"] = cross->max_slope;
            } else {
                entry["note"] = "no crossover (flat curve)";
            }
        } catch (const std::invalid_argument& e) {
            entry["error"] = e.what();
        }
        per.push_back(entry);
    }
    return {{"per_kappa", per}};
}

std::vector<CsvRow> with_panel(std::vector<CsvRow> rows, const std::string& panel) {
    for (CsvRow& r : rows) r.observable = tagged(r.observable, "panel", panel);
    return rows;
}

ScenarioPlan plan_figS1(const Config& c) {
    ScenarioPlan plan;
    plan.notes.push_back("panel g_sweep: N fixed, g from g_values; panel N_sweep: g fixed, N from N_values; "
                         "panel disorder: as N_sweep with tunnelling disorder deltaJ");
    const auto method = propagation_method(c);
    const double dt = c.number("dt");
    const auto t_end = c.maybe_number("t_end");
    const double dJ = c.number("deltaJ");
    const Config clean = patched(c, {{"deltaJ", 0.0}});
    for (double g : c.numbers("g_values")) {
        const ResolvedRun r = resolve_packet_run(patched(clean, {{"g", g}}));
        plan.jobs.push_back({"g_sweep g=" + format_number(g), [=] {
                                 return with_panel(trajectory_rows("figS1", r, dt, t_end, false, method), "g_sweep");
                             }});
    }
    for (int N : integer_values(c, "N_values")) {
        const ResolvedRun r = resolve_packet_run(patched(clean, {{"N", N}}));
        plan.jobs.push_back({"N_sweep N=" + std::to_string(N), [=] {
                                 return with_panel(trajectory_rows("figS1", r, dt, t_end, false, method), "N_sweep");
                             }});
        if (dJ > 0.0) {
            const ResolvedRun rd = resolve_packet_run(patched(c, {{"N", N}}));
            plan.jobs.push_back({"disorder N=" + std::to_string(N), [=] {
                                     return with_panel(trajectory_rows("figS1", rd, dt, t_end, false, method), "disorder");
                                 }});
        }
    }
    return plan;
}

Json summarize_figS1(const std::vector<CsvRow>& rows, const Config&) {
    std::map<std::string, Json> runs;
    for (const CsvRow& r : rows) {
        const auto bar = r.observable.find('|');
        const std::string base = r.observable.substr(0, bar);
        const std::string panel = bar == std::string::npos ? "" : r.observable.substr(bar + 1);
        const std::string key = panel + " N=" + std::to_string(r.N) + " g=" + format_number(r.g);
        Json& entry = runs[key];
        if (entry.is_null()) entry = {{"panel", panel}, {"N", r.N}, {"g", r.g}, {"max_cavity_occupation", 0.0}};
        if (base == "cavity_occupation") {
            entry["max_cavity_occupation"] = std::max(entry["max_cavity_occupation"].get<double>(), r.value);
            entry["final_cavity_occupation"] = r.value;
        }
        if (base == "T_ts" || base == "T_tl") entry[base] = r.value;
    }
    Json out = Json::array();
    for (auto& [key, entry] : runs) out.push_back(entry);
    return {{"runs", out}};
}

ScenarioPlan plan_figS2(const Config& c) {
    ScenarioPlan plan;
    plan.notes.push_back("peak searched in [g sqrt(N) - J_cavity - 6, g sqrt(N) - J_cavity + 6]");
    const auto method = propagation_method(c);
    for (double g : c.numbers("g_values")) {
        const ResolvedRun r = resolve_packet_run(patched(c, {{"g", g}, {"Delta", 0.0}}));
        if (plan.notes.size() == 1) plan.notes.insert(plan.notes.end(), r.notes.begin(), r.notes.end());
        plan.jobs.push_back({"g=" + format_number(g), [=] {
                                 const PacketRun pr = packet_run(r, method);
                                 const double t_s = timescales(r.packet, r.chain).t_short;
                                 const double centre = upper_polariton_detuning(r.chain);
                                 const PeakScan scan = scan_peak(pr, t_s, centre, 6.0, 49, 0.05, 30.0);
                                 ChainSpec at = r.chain;
                                 set_detuning(at, scan.peak.x);
                                 const std::string seed = std::to_string(r.seed);
                                 const double w = quoted_w(r.chain, r.packet.q0);
                                 const double vg = 2.0 * r.chain.J * std::sin(r.packet.q0);
                                 const double packet_fwhm = 2.0 * std::sqrt(2.0 * std::log(2.0)) * vg / (2.0 * r.packet.delta);
                                 return std::vector<CsvRow>{
                                     make_row("figS2", seed, at, r.rates, "fwhm_numeric", std::nullopt,
                                              scan.fwhm ? *scan.fwhm : std::nan("")),
                                     make_row("figS2", seed, at, r.rates, "peak_T_ts", t_s, scan.peak.value),
                                     make_row("figS2", seed, at, r.rates, "peak_offset", std::nullopt, scan.peak.x - centre),
                                     make_row("figS2", seed, at, r.rates, "fwhm_packet_energy", std::nullopt, packet_fwhm),
                                     make_row("figS2", seed, at, r.rates, "fwhm_analytic", std::nullopt, 4.0 * w),
                                     make_row("figS2", seed, at, r.rates, "w_quoted", std::nullopt, w)};
                             }});
    }
    return plan;
}

Json summarize_figS2(const std::vector<CsvRow>& rows, const Config& c) {
    Json out = Json::array();
    for (double g : c.numbers("g_values")) {
        auto at = [g](const CsvRow& r) { return same(r.g, g); };
        out.push_back({{"g", g},
                       {"fwhm_numeric", optional_json(first_value(rows, "fwhm_numeric", at))},
                       {"fwhm_analytic", optional_json(first_value(rows, "fwhm_analytic", at))},
                       {"peak_T_ts", optional_json(first_value(rows, "peak_T_ts", at))},
                       {"peak_offset", optional_json(first_value(rows, "peak_offset", at))}});
    }
    return {{"per_g", out}};
}

ScenarioPlan plan_figS3(const Config& c) {
    ScenarioPlan plan;
    const ResolvedRun r = resolve_packet_run(c);
    plan.notes = r.notes;
    const auto method = propagation_method(c);
    const double omega0 = r.chain.N * c.number("Jinf");
    std::vector<double> deltas = linear_grid(-6.0, 6.0, 0.5);
    const auto near = linear_grid(omega0 - 10.0, omega0 + 6.0, 0.1);
    deltas.insert(deltas.end(), near.begin(), near.end());
    for (std::size_t start = 0; start < deltas.size(); start += 40) {
        std::vector<double> chunk(deltas.begin() + static_cast<std::ptrdiff_t>(start),
                                  deltas.begin() + static_cast<std::ptrdiff_t>(std::min(start + 40, deltas.size())));
        plan.jobs.push_back({"sweep " + std::to_string(start), [=] { return spectrum_rows("figS3", r, chunk, method); }});
    }
    plan.jobs.push_back({"peak", [=] {
                             const PacketRun pr = packet_run(r, method);
                             const double t_s = timescales(r.packet, r.chain).t_short;
                             const PeakScan scan = scan_peak(pr, t_s, omega0 - 2.0, 6.0, 49, 0.1, 30.0);
                             auto rows = peak_rows("figS3", std::to_string(r.seed), r, scan, "", "");
                             const Eigen::VectorXd ev = symmetric_eigenvalues(cavity_block(r.chain));
                             rows.push_back(make_row("figS3", std::to_string(r.seed), r.chain, r.rates,
                                                     "dominant_eigenvalue", std::nullopt, ev(ev.size() - 1)));
                             rows.push_back(make_row("figS3", std::to_string(r.seed), r.chain, r.rates, "N_Jinf",
                                                     std::nullopt, omega0));
                             return rows;
                         }});
    return plan;
}

Json summarize_figS3(const std::vector<CsvRow>& rows, const Config&) {
    const auto x = first_value(rows, "peak_Delta");
    const auto t = first_value(rows, "peak_T_ts");
    const auto fw = first_value(rows, "peak_fwhm");
    const auto nj = first_value(rows, "N_Jinf");
    Json out{{"peak_Delta", optional_json(x)},
             {"peak_T_ts", optional_json(t)},
             {"peak_fwhm", optional_json(fw)},
             {"N_Jinf", optional_json(nj)},
             {"dominant_eigenvalue", optional_json(first_value(rows, "dominant_eigenvalue"))}};
    if (x && nj) out["offset"] = *x - *nj;
    return out;
}

struct DipolarSeries {
    std::string name;
    std::string hopping;
    double g;
};

std::vector<DipolarSeries> dipolar_series(const Config& c) {
    std::vector<DipolarSeries> out{{"NN", "dipolar_nn", 0.0}, {"LR", "dipolar_lr", 0.0}};
    for (double g : c.numbers("g_values")) out.push_back({"LR+cavity g=" + format_number(g), "dipolar_lr", g});
    return out;
}

ScenarioPlan plan_figA1(const Config& c) {
    ScenarioPlan plan;
    plan.ensemble = true;
    plan.notes.push_back("Delta = g sqrt(N) - J per point; one cavity series per entry of g_values");
    const auto method = propagation_method(c);
    const auto seeds = seed_list(c, 50);
    for (const DipolarSeries& s : dipolar_series(c)) {
        for (int N : integer_values(c, "N_values")) {
            const Config point = patched(c, {{"N", N}, {"g", s.g}, {"hopping", s.hopping}});
            plan.jobs.push_back({s.name + " N=" + std::to_string(N), [=] {
                                     std::vector<CsvRow> rows;
                                     for (std::uint64_t seed : seeds) {
                                         const ResolvedRun r = resolve_packet_run(patched(point, {{"seed", seed}}));
                                         const auto both = run_two_timescales(packet_run(r, method));
                                         const std::string label = std::to_string(seed);
                                         rows.push_back(make_row("figA1", label, r.chain, r.rates,
                                                                 tagged("T_tl", "series", s.name), both.scales.t_long,
                                                                 both.at_long.transmission));
                                         rows.push_back(make_row("figA1", label, r.chain, r.rates,
                                                                 tagged("T_ts", "series", s.name), both.scales.t_short,
                                                                 both.at_short.transmission));
                                     }
                                     return rows;
                                 }});
        }
    }
    return plan;
}

Json summarize_figA1(const std::vector<CsvRow>& rows, const Config& c) {
    Json series = Json::array();
    std::map<std::string, std::map<int, double>> means;
    for (const DipolarSeries& s : dipolar_series(c)) {
        std::vector<double> ns, ts;
        for (const CsvRow* r : pick(rows, tagged("T_tl", "series", s.name))) {
            means[s.name][r->N] = r->value;
            if (!(r->value > 0.0)) continue;
            ns.push_back(r->N);
            ts.push_back(r->value);
        }
        const Json e = fit_json(ns, ts, ScalingModel::Exponential);
        const Json p = fit_json(ns, ts, ScalingModel::PowerLaw);
        Json entry{{"series", s.name}, {"exponential", e}, {"powerlaw", p}};
        if (e.contains("r_squared") && p.contains("r_squared")) {
            entry["preferred"] = p["r_squared"].get<double>() > e["r_squared"].get<double>() ? "powerlaw" : "exponential";
        }
        series.push_back(entry);
    }
    bool lr_beats_nn = true;
    Json per_N = Json::array();
    for (const auto& [N, nn] : means["NN"]) {
        const auto it = means["LR"].find(N);
        if (it == means["LR"].end()) continue;
        lr_beats_nn = lr_beats_nn && it->second >= nn;
        per_N.push_back({{"N", N}, {"NN", nn}, {"LR", it->second}});
    }
    return {{"series", series}, {"LR_ge_NN_every_N", lr_beats_nn}, {"NN_vs_LR", per_N}};
}

// Catalog ----------------------------------------------------------------------------

Json steady_defaults() { return {{"deltaJ", 0.2}, {"gamma_sp", 0.04}, {"gamma_deph", 0.9}, {"gamma_out", 2.0}}; }

Json merged(Json a, const Json& b) {
    for (const auto& [k, v] : b.items()) a[k] = v;
    return a;
}

std::vector<ScenarioDefinition> build_catalog() {
    std::vector<double> fig3a_deep{25, 50, 100, 200, 400, 800, 1600, 3200, 6400, 10000};
    std::vector<double> x_grid;
    for (int j = -4; j <= 16; ++j) x_grid.push_back(0.1 * std::pow(2.0, j / 4.0));
    std::vector<double> n_2b;
    for (double v : log_grid(10, 400, 13)) n_2b.push_back(std::round(v));
    return {
        {"fig1b",
         "N=50, v_g=2J, delta=5, Delta=69J, J'=10J, g=10J",
         "trajectory of T, cavity occupation and in-cavity population; T at t_s and t_l",
         {{"N", 50}, {"g", 10.0}, {"Delta", 69.0}, {"Jprime", 10.0}},
         Json::object(),
         plan_fig1b,
         summarize_fig1b},
        {"fig2a",
         "The cavity embeds N=100 sites and g=50J (strong collective coupling regime)",
         "T_ts, T_tl and analytic transmission versus Delta near both polaritons and the bare band; refined peaks",
         {{"N", 100}, {"g", 50.0}, {"Jprime_factor", 4.0}},
         Json::object(),
         plan_fig2a,
         summarize_fig2a},
        {"fig2b",
         "max_Delta(T_ts) as function of g and N. To keep the ultra-fast transmission fixed, g ~ sqrt(N) is required",
         "max over Delta of T_ts on a (g, N) grid",
         {{"Jprime_factor", 4.0}, {"g_values", json_list(log_grid(1, 60, 21))}, {"N_values", json_list(n_2b)}},
         Json::object(),
         plan_fig2b,
         summarize_fig2b},
        {"fig2c",
         "max_Delta(T_ts) for N=50,100,200 is shown as function of g/sqrt(N) (on top of each other). "
         "For small g, T_ts ~ g^4/N^2",
         "max over Delta of T_ts versus g/sqrt(N) for three N; weak-branch fits and collapse spread",
         {{"Jprime_factor", 4.0}, {"N_values", {50, 100, 200}}, {"g_over_sqrtN_values", json_list(x_grid)}},
         Json::object(),
         plan_fig2c,
         summarize_fig2c},
        {"fig2d",
         "Shrinkage and broadening of transmission peaks for finite cavity decay kappa (N=M=50, g=10J)",
         "T_ts versus Delta around the upper polariton for several kappa; peak height and width",
         {{"N", 50}, {"M", 50}, {"g", 10.0}, {"Jprime_factor", 4.0}, {"kappa_values", {0.0, 0.5, 1.0, 2.0, 5.0, 10.0}}},
         Json::object(),
         plan_fig2d,
         summarize_fig2d},
        {"fig3a",
         "Delta=g sqrt(N)-J ... We average over 200 disorder realizations in J_i (delta_J=0.2J)",
         "per-seed T_ts and T_tl versus N for several g, with ensemble mean and stderr rows",
         {{"Jprime_factor", 4.0}, {"deltaJ", 0.2}, {"seeds", 200}, {"N_values", {25, 50, 100, 200, 400}},
          {"g_values", {0.0, 0.05, 0.1, 0.2}}},
         {{"N_values", json_list(fig3a_deep)}},
         plan_fig3a,
         summarize_fig3a},
        {"fig3b",
         "I_out for N=50 and in presence of disorder, spontaneous emissions, and dephasing (gamma_out=2J); "
         "gamma_sp.em.=0.04J, gamma_deph.=0.9J, and delta_J=0.2J, single disorder realization",
         "steady-state current versus pump rate for several g",
         merged(steady_defaults(), {{"N", 50},
                                    {"g_values", {0.0, 0.05, 0.1, 0.2}},
                                    {"gamma_P_values", {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0}}}),
         Json::object(),
         plan_fig3b,
         summarize_fig3b},
        {"fig3c",
         "Dissipation and disorder leads to I_out ~ exp(-N) for g=0 (gamma_P=0.5J), while for g>0 I_out decays "
         "sub-exponential",
         "steady-state current versus N for several g",
         merged(steady_defaults(), {{"gamma_P", 0.5},
                                    {"g_values", {0.0, 0.05, 0.1, 0.2}},
                                    {"N_values", json_list(linear_grid(10, 150, 10))}}),
         Json::object(),
         plan_fig3c,
         summarize_fig3c},
        {"fig3d",
         "I_out as function of g. The crossover to the collective strong coupling regime shifts for kappa>0 "
         "(N=50, gamma_P=0.5J)",
         "steady-state current versus g for several kappa; crossover g*",
         merged(steady_defaults(), {{"N", 50},
                                    {"gamma_P", 0.5},
                                    {"g_values", json_list(log_grid(0.01, 1.0, 17))},
                                    {"kappa_values", {0.0, 1.0, 10.0}}}),
         Json::object(),
         plan_fig3d,
         summarize_fig3d},
        {"figS1",
         "Evolution of the cavity occupation for the parameters of Fig. 2. N=1000",
         "cavity occupation and transmission trajectories: g sweep at fixed N, N sweep at fixed g, with disorder",
         {{"Jprime_factor", 4.0}, {"N", 200}, {"g", 5.0}, {"deltaJ", 0.2},
          {"g_values", {1.0, 2.0, 5.0, 10.0, 20.0}}, {"N_values", {50, 100, 200, 400}}},
         {{"N", 1000}, {"N_values", {50, 100, 200, 400, 1000, 2000}}},
         plan_figS1,
         summarize_figS1},
        {"figS2",
         "N=100, delta_x=20, delta_0=5, J=0, J'=1.5 sqrt(2N/delta)",
         "numerical peak width, height and offset versus g with zero hopping inside the cavity",
         {{"N", 100}, {"J_cavity", 0.0}, {"Jprime_alt_factor", 1.5},
          {"g_values", {2.0, 3.0, 5.0, 7.0, 10.0, 15.0, 20.0, 30.0, 50.0}}},
         Json::object(),
         plan_figS2,
         summarize_figS2},
        {"figS3",
         "Wave-packet identical to the one in Fig. 2, N=100. The N particles are coupled by H_inf (no cavity)",
         "T_ts versus Delta for the all-to-all model; refined peak and dominant eigenvalue",
         {{"N", 100}, {"hopping", "all_to_all"}, {"Jinf", 5.0}, {"Jprime_factor", 4.0}},
         Json::object(),
         plan_figS3,
         summarize_figS3},
        {"figA1",
         "T_tl for 50 disorder realizations with a displacement standard deviation of 5% of the lattice constant",
         "per-seed T_tl for nearest-neighbour dipolar, long-range dipolar and long-range plus cavity series",
         {{"Jprime_factor", 4.0}, {"sigma_pos", 0.05}, {"seeds", 50}, {"N_values", {25, 50, 75, 100, 150, 200}},
          {"g_values", {0.2, 0.02}}},
         Json::object(),
         plan_figA1,
         summarize_figA1},
    };
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::optional<std::vector<CsvRow>> read_shard(const fs::path& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
        return read_csv(in);
    } catch (const CsvSchemaError&) {
        return std::nullopt;
    }
}

void write_shard(const fs::path& path, const std::vector<CsvRow>& rows) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        write_csv(out, rows);
    }
    fs::rename(tmp, path);
}

}  // namespace

// Public API ----------------------------------------------------------------------

const std::vector<ScenarioDefinition>& scenario_catalog() {
    static const std::vector<ScenarioDefinition> catalog = build_catalog();
    return catalog;
}

const ScenarioDefinition& find_scenario(const std::string& id) {
    for (const ScenarioDefinition& s : scenario_catalog()) {
        if (s.id == id) return s;
    }
    std::string known;
    for (const ScenarioDefinition& s : scenario_catalog()) known += " " + s.id;
    throw ConfigError("unknown scenario '" + id + "' (known:" + known + ")");
}

PropagationMethod propagation_method(const Config& config) {
    const std::string m = config.text("method");
    if (m == "spectral") return PropagationMethod::Spectral;
    if (m == "chebyshev") return PropagationMethod::Chebyshev;
    return PropagationMethod::Auto;
}

Json version_info() {
    return {{"excitrans", EXCITRANS_VERSION},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
                          std::to_string(BOOST_VERSION % 100)},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
#if defined(__clang__)
            {"compiler", std::string("clang ") + __clang_version__},
#elif defined(__GNUC__)
            {"compiler", std::string("gcc ") + __VERSION__},
#else
            {"compiler", "unknown"},
#endif
            {"cxx_standard", static_cast<long>(__cplusplus)}};
}

CsvRow make_row(const std::string& scenario, const std::string& seed, const ChainSpec& chain,
                const DissipationRates& rates, const std::string& observable, std::optional<double> t, double value) {
    CsvRow r;
    r.scenario = scenario;
    r.seed = seed;
    r.N = chain.N;
    r.M = chain.M;
    r.g = chain.g;
    r.Jprime = chain.Jprime;
    r.Delta = chain.delta();
    r.kappa = rates.kappa;
    r.gamma_P = rates.gamma_P;
    r.gamma_out = rates.gamma_out;
    r.gamma_sp = rates.gamma_sp;
    r.gamma_deph = rates.gamma_deph;
    if (const auto* d = std::get_if<TunnelingGaussian>(&chain.disorder.kind)) r.deltaJ = d->deltaJ;
    r.observable = observable;
    r.t = t;
    r.value = value;
    return r;
}

std::vector<CsvRow> trajectory_rows(const std::string& scenario, const ResolvedRun& run, double dt,
                                    std::optional<double> t_end, bool window, PropagationMethod method) {
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    const Timescales ts = timescales(run.packet, run.chain);
    const double end = t_end.value_or(1.2 * ts.t_long);
    std::vector<double> times;
    const int steps = static_cast<int>(std::floor(end / dt + 1e-9));
    for (int k = 0; k <= steps; ++k) times.push_back(k * dt);
    const std::size_t grid = times.size();
    times.push_back(ts.t_short);
    times.push_back(ts.t_long);
    const int window_samples = 41;
    if (window) {
        for (int k = 0; k < window_samples; ++k) times.push_back(ts.t_short * (0.8 + 0.4 * k / (window_samples - 1)));
    }
    const auto samples = run_packet(packet_run(run, method), times);
    const std::string seed = std::to_string(run.seed);
    std::vector<CsvRow> rows;
    rows.reserve(3 * grid + 8);
    for (std::size_t k = 0; k < grid; ++k) {
        rows.push_back(make_row(scenario, seed, run.chain, run.rates, "T", samples[k].t, samples[k].transmission));
        rows.push_back(make_row(scenario, seed, run.chain, run.rates, "cavity_occupation", samples[k].t, samples[k].cavity));
        rows.push_back(make_row(scenario, seed, run.chain, run.rates, "in_cavity", samples[k].t, samples[k].remainder));
    }
    rows.push_back(make_row(scenario, seed, run.chain, run.rates, "T_ts", ts.t_short, samples[grid].transmission));
    rows.push_back(make_row(scenario, seed, run.chain, run.rates, "T_tl", ts.t_long, samples[grid + 1].transmission));
    rows.push_back(make_row(scenario, seed, run.chain, run.rates, "in_cavity_tl", ts.t_long, samples[grid + 1].remainder));
    rows.push_back(make_row(scenario, seed, run.chain, run.rates, "t_s", std::nullopt, ts.t_short));
    rows.push_back(make_row(scenario, seed, run.chain, run.rates, "t_l", std::nullopt, ts.t_long));
    if (window) {
        double best = 0.0;
        for (std::size_t k = grid + 2; k < samples.size(); ++k) best = std::max(best, samples[k].transmission);
        rows.push_back(make_row(scenario, seed, run.chain, run.rates, "T_window_max|window=0.8-1.2t_s", std::nullopt, best));
    }
    return rows;
}

std::vector<CsvRow> spectrum_rows(const std::string& scenario, const ResolvedRun& run, std::span<const double> deltas,
                                  PropagationMethod method) {
    std::vector<CsvRow> rows;
    const std::string seed = std::to_string(run.seed);
    const bool nearest = std::holds_alternative<NearestNeighbor>(run.chain.hopping);
    const bool obc = run.chain.boundary == Boundary::Open &&
                     (nearest || std::holds_alternative<AllToAll>(run.chain.hopping)) &&
                     std::holds_alternative<NoDisorder>(run.chain.disorder.kind) && run.rates.kappa == 0.0;
    for (double d : deltas) {
        ResolvedRun at = run;
        set_detuning(at.chain, d);
        const Timescales ts = timescales(at.packet, at.chain);
        const double times[] = {ts.t_short, ts.t_long};
        const auto samples = run_packet(packet_run(at, method), times);
        rows.push_back(make_row(scenario, seed, at.chain, at.rates, "T_ts", ts.t_short, samples[0].transmission));
        rows.push_back(make_row(scenario, seed, at.chain, at.rates, "T_tl", ts.t_long, samples[1].transmission));
        if (nearest) {
            const ScatterParams p = scatter_params_from(at.chain, at.packet.q0);
            rows.push_back(make_row(scenario, seed, at.chain, at.rates, "T_analytic", std::nullopt,
                                    packet_averaged_transmission(p, at.packet.q0, at.packet.delta)));
            rows.push_back(make_row(scenario, seed, at.chain, at.rates, "T_q", std::nullopt, transmission_exact(p).T));
        }
        if (obc) {
            rows.push_back(make_row(scenario, seed, at.chain, at.rates, "T_obc", std::nullopt,
                                    packet_averaged_obc(at.chain, at.packet.q0, at.packet.delta)));
        }
    }
    return rows;
}

std::vector<CsvRow> aggregate_rows(const std::vector<CsvRow>& rows) {
    std::vector<std::string> order;
    std::map<std::string, std::pair<CsvRow, std::vector<double>>> groups;
    for (const CsvRow& r : rows) {
        if (!is_integer_seed(r.seed)) continue;
        CsvRow key_row = r;
        key_row.seed = "";
        key_row.value = 0.0;
        const std::string key = csv_line(key_row);
        auto it = groups.find(key);
        if (it == groups.end()) {
            order.push_back(key);
            it = groups.emplace(key, std::make_pair(key_row, std::vector<double>{})).first;
        }
        it->second.second.push_back(r.value);
    }
    std::vector<CsvRow> out;
    for (const std::string& key : order) {
        const auto& [proto, values] = groups.at(key);
        const EnsembleSummary s = summarize(values);
        CsvRow mean = proto;
        mean.seed = "mean";
        mean.value = s.mean;
        CsvRow err = proto;
        err.seed = "stderr";
        err.value = s.std_error;
        out.push_back(mean);
        out.push_back(err);
    }
    return out;
}

Json write_outputs(const fs::path& out, const std::string& name, const std::vector<CsvRow>& rows, Json metadata,
                   double wall_seconds, fs::path* csv_path, fs::path* metadata_path) {
    fs::create_directories(out);
    const fs::path csv = out / (name + ".csv");
    const fs::path meta = out / (name + ".meta.json");
    {
        std::ofstream f(csv);
        if (!f) throw std::runtime_error("cannot write " + csv.string());
        write_csv(f, rows);
    }
    metadata["csv"] = csv.filename().string();
    metadata["rows"] = rows.size();
    metadata["versions"] = version_info();
    metadata["wall_time_seconds"] = wall_seconds;
    metadata["timestamp_utc"] = utc_timestamp();
    {
        std::ofstream f(meta);
        if (!f) throw std::runtime_error("cannot write " + meta.string());
        f << metadata.dump(2) << '\n';
    }
    if (csv_path) *csv_path = csv;
    if (metadata_path) *metadata_path = meta;
    return metadata;
}

Config scenario_config(const ScenarioDefinition& scenario, const ScenarioOptions& options) {
    Json defaults = scenario.defaults;
    if (options.deep) defaults = merged(defaults, scenario.deep_defaults);
    return layered_config(defaults, options.layers);
}

ScenarioOutput run_scenario(const std::string& id, const ScenarioOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const ScenarioDefinition& scenario = find_scenario(id);
    const Config config = scenario_config(scenario, options);
    const ScenarioPlan plan = scenario.plan(config);

    const fs::path shard_dir = options.out / "shards" / id;
    fs::create_directories(shard_dir);
    const std::string fingerprint = id + "\n" + config.values().dump() + "\n";
    std::vector<std::vector<CsvRow>> results(plan.jobs.size());
    std::vector<char> reused(plan.jobs.size(), 0);
    parallel_for(plan.jobs.size(), options.threads, [&](std::size_t i) {
        const fs::path shard = shard_dir / (hex(fnv1a(fingerprint + plan.jobs[i].label)) + ".csv");
        if (auto cached = read_shard(shard)) {
            results[i] = std::move(*cached);
            reused[i] = 1;
            return;
        }
        results[i] = plan.jobs[i].run();
        write_shard(shard, results[i]);
    });

    ScenarioOutput output;
    for (auto& part : results) output.rows.insert(output.rows.end(), part.begin(), part.end());
    if (plan.ensemble) {
        const auto aggregates = aggregate_rows(output.rows);
        output.rows.insert(output.rows.end(), aggregates.begin(), aggregates.end());
    }
    output.jobs_total = static_cast<int>(plan.jobs.size());
    output.jobs_reused = static_cast<int>(std::count(reused.begin(), reused.end(), 1));
    output.summary = scenario.summarize(output.rows, config);

    Json meta;
    meta["scenario"] = id;
    meta["caption"] = scenario.caption;
    meta["description"] = scenario.description;
    meta["deep"] = options.deep;
    meta["config_file"] = options.layers.file ? Json(options.layers.file->string()) : Json(nullptr);
    meta["overrides"] = options.layers.sets;
    meta["seed_flag"] = options.layers.seed ? Json(*options.layers.seed) : Json(nullptr);
    meta["resolved_parameters"] = config.values();
    meta["notes"] = plan.notes;
    meta["conventions"] = {
        {"hopping_sign", "nearest-neighbour bonds carry -J_i; dipolar pairs carry Jbar/|x_i - x_j|^3 (default Jbar = -1); positional displacement acts on cavity-region sites only"},
        {"current", "I_out = gamma_out <n_N>, the magnitude of tr[n_e L_out(rho)]"},
        {"aggregates", plan.ensemble ? "seed=mean and seed=stderr rows (unbiased) follow the per-seed rows" : "none"},
        {"observable_tags", "name|key=value marks a series label or a window"}};
    meta["jobs"] = output.jobs_total;
    meta["jobs_reused"] = output.jobs_reused;
    meta["summary"] = output.summary;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    output.metadata = write_outputs(options.out, id, output.rows, std::move(meta), wall, &output.csv_path,
                                    &output.metadata_path);
    return output;
}

}  // namespace excitrans
