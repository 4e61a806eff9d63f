#include "excitrans/experiments.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace excitrans {

PropagationMethod choose_method(const HamiltonianMatrix& hamiltonian, double t_max) {
    const double d = hamiltonian.dim();
    const auto [lo, hi] = hamiltonian.spectral_bounds();
    const double terms = 0.5 * (hi - lo) * t_max + 40.0;
    const double chebyshev = 8.0 * static_cast<double>(hamiltonian.sparse().nonZeros() + hamiltonian.dim()) * terms;
    const double spectral = 9.0 * d * d * d;
    return chebyshev < spectral ? PropagationMethod::Chebyshev : PropagationMethod::Spectral;
}

namespace {

PacketSample observe(const PureState& psi, const ChainSpec& spec, double t) {
    return {t, transmission_at(psi, spec), cavity_occupation(psi), in_cavity_remainder(psi, spec),
            psi.amplitudes.squaredNorm()};
}

}  // namespace

std::vector<PacketSample> run_packet(const PacketRun& run, std::span<const double> times) {
    const HamiltonianMatrix H = build_hamiltonian(run.chain);
    const PureState psi0 = initial_wave_packet(run.packet, run.chain);
    std::vector<std::size_t> order(times.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
    std::vector<PacketSample> out(times.size());
    if (times.empty()) return out;
    if (times[order.front()] < 0.0) {
        throw std::invalid_argument("run_packet: times must be >= 0");
    }

    if (run.kappa > 0.0) {
        const LossyPropagator lossy(H, run.kappa);
        for (std::size_t k : order) out[k] = observe(lossy.evolve(psi0, times[k]), run.chain, times[k]);
        return out;
    }

    const double t_max = times[order.back()];
    const PropagationMethod method =
        run.method == PropagationMethod::Auto ? choose_method(H, t_max) : run.method;
    const Propagator propagator(H, method);
    if (method == PropagationMethod::Spectral) {
        for (std::size_t k : order) out[k] = observe(propagator.evolve(psi0, times[k]), run.chain, times[k]);
        return out;
    }
    PureState psi = psi0;
    double now = 0.0;
    for (std::size_t k : order) {
        psi = propagator.evolve(psi, times[k] - now);
        now = times[k];
        out[k] = observe(psi, run.chain, now);
    }
    return out;
}

TwoTimescales run_two_timescales(const PacketRun& run) {
    TwoTimescales result;
    result.scales = timescales(run.packet, run.chain);
    const double times[] = {result.scales.t_short, result.scales.t_long};
    const auto samples = run_packet(run, times);
    result.at_short = samples[0];
    result.at_long = samples[1];
    return result;
}

Maximum maximize_scan(const std::function<double(double)>& f, double lo, double hi, int coarse, double tolerance) {
    if (!(hi > lo) || coarse < 3) {
        throw std::invalid_argument("maximize_scan: needs hi > lo and at least 3 grid points");
    }
    const double step = (hi - lo) / (coarse - 1);
    Maximum best{lo, f(lo)};
    int best_index = 0;
    for (int i = 1; i < coarse; ++i) {
        const double x = lo + step * i;
        const double v = f(x);
        if (v > best.value) {
            best = {x, v};
            best_index = i;
        }
    }
    double a = lo + step * std::max(best_index - 1, 0);
    double b = lo + step * std::min(best_index + 1, coarse - 1);
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - ratio * (b - a);
    double x2 = a + ratio * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > tolerance) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        }
    }
    if (f1 > best.value) best = {x1, f1};
    if (f2 > best.value) best = {x2, f2};
    return best;
}

std::optional<double> numeric_fwhm(const std::function<double(double)>& f, const Maximum& peak, double step,
                                   double reach, double tolerance) {
    if (!(step > 0.0) || !(reach > 0.0)) {
        throw std::invalid_argument("numeric_fwhm: step and reach must be positive");
    }
    const double half = 0.5 * peak.value;
    auto edge = [&](double direction) -> std::optional<double> {
        double inside = peak.x;
        for (double offset = step; offset <= reach + 1e-12; offset += step) {
            const double x = peak.x + direction * offset;
            if (f(x) < half) {
                double a = inside;
                double b = x;
                while (std::abs(b - a) > tolerance) {
                    const double m = 0.5 * (a + b);
                    (f(m) < half ? b : a) = m;
                }
                return 0.5 * (a + b);
            }
            inside = x;
        }
        return std::nullopt;
    };
    const auto right = edge(+1.0);
    const auto left = edge(-1.0);
    if (!right || !left) return std::nullopt;
    return *right - *left;
}

std::function<double(double)> transmission_vs_detuning(const PacketRun& base, double t) {
    return [base, t](double delta) {
        PacketRun run = base;
        set_detuning(run.chain, delta);
        const double times[] = {t};
        return run_packet(run, times).front().transmission;
    };
}

SteadyResult steady_current(const ChainSpec& pumped, const DissipationRates& rates,
                            const SteadyStateOptions& options) {
    if (pumped.M != 0) {
        throw std::invalid_argument("steady_current: the pumped configuration has M = 0");
    }
    const Liouvillian L = build_liouvillian(build_hamiltonian(pumped), rates);
    const DensityOperator rho = steady_state(L, options);
    SteadyResult result;
    result.current = current_out(rho, rates);
    result.drain_population = rho.population(L.drain_index());
    result.cavity_population = rho.population(L.cavity_index());
    result.continuity_residual = continuity_audit(rho, L).relative_residual();
    return result;
}

EnsembleSummary summarize(std::span<const double> values) {
    EnsembleSummary s;
    s.count = static_cast<int>(values.size());
    if (values.empty()) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / s.count;
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std_error = std::sqrt(ss / (s.count - 1)) / std::sqrt(static_cast<double>(s.count));
    }
    return s;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

PowerLaw2D fit_power_law_2d(std::span<const double> x1, std::span<const double> x2, std::span<const double> y) {
    const auto n = static_cast<Eigen::Index>(y.size());
    if (x1.size() != y.size() || x2.size() != y.size() || n < 4) {
        throw std::invalid_argument("fit_power_law_2d: needs at least 4 matching samples");
    }
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (!(x1[k] > 0.0) || !(x2[k] > 0.0) || !(y[k] > 0.0)) {
            throw std::invalid_argument("fit_power_law_2d: needs positive data");
        }
        A(i, 0) = 1.0;
        A(i, 1) = std::log(x1[k]);
        A(i, 2) = std::log(x2[k]);
        b(i) = std::log(y[k]);
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    const Eigen::VectorXd residual = A * c - b;
    const double mean = b.mean();
    const double total = (b.array() - mean).square().sum();
    PowerLaw2D fit;
    fit.log_prefactor = c(0);
    fit.exponent_x1 = c(1);
    fit.exponent_x2 = c(2);
    fit.r_squared = total > 0.0 ? 1.0 - residual.squaredNorm() / total : 1.0;
    return fit;
}

double relative_spread(std::span<const double> values) {
    if (values.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (!(*lo > 0.0)) {
        throw std::invalid_argument("relative_spread: values must be positive");
    }
    return *hi / *lo - 1.0;
}

}  // namespace excitrans
