// experiments.hpp - building blocks shared by the scenario runner, the CLI and
// the acceptance suite: packet runs at a list of times, detuning scans with
// peak refinement, numerical peak widths, steady currents, ensemble statistics
// and a bounded worker pool.

#pragma once

#include "excitrans/chain.hpp"
#include "excitrans/dynamics.hpp"
#include "excitrans/hamiltonian.hpp"
#include "excitrans/open_system.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace excitrans {

struct PacketRun {
    ChainSpec chain;
    WavePacketSpec packet;
    double kappa = 0.0;  ///< cavity loss; > 0 switches to the no-jump propagator
    PropagationMethod method = PropagationMethod::Auto;
};

struct PacketSample {
    double t = 0.0;
    double transmission = 0.0;  ///< population right of the cavity region
    double cavity = 0.0;        ///< photon population
    double remainder = 0.0;     ///< population inside the cavity region, photon included
    double norm = 1.0;          ///< squared norm, < 1 only with cavity loss
};

/// Estimated cheaper route for propagating up to t_max: dense
/// diagonalisation (about 9 d^3 flops) against a Chebyshev expansion (about
/// 8 nnz flops per term, half-width * t terms).
[[nodiscard]] PropagationMethod choose_method(const HamiltonianMatrix& hamiltonian, double t_max);

/// Observables at the requested times (any order, t >= 0). The Chebyshev
/// route steps incrementally through the sorted times.
[[nodiscard]] std::vector<PacketSample> run_packet(const PacketRun& run, std::span<const double> times);

/// Convenience: T at t_s and t_l of the run's own timescales.
struct TwoTimescales {
    Timescales scales;
    PacketSample at_short;
    PacketSample at_long;
};
[[nodiscard]] TwoTimescales run_two_timescales(const PacketRun& run);

struct Maximum {
    double x = 0.0;
    double value = 0.0;
};

/// Maximum of f on [lo, hi]: the best point of a uniform grid with `coarse`
/// points, then golden-section refinement inside the neighbouring cells to
/// an x tolerance.
[[nodiscard]] Maximum maximize_scan(const std::function<double(double)>& f, double lo, double hi, int coarse,
                                    double tolerance = 1e-3);

/// Full width at half maximum of a peak of f at `peak` (value f(peak)):
/// steps outwards by `step` until f drops below half, then bisects. Returns
/// nullopt when the half level is not reached within `reach` on either side.
[[nodiscard]] std::optional<double> numeric_fwhm(const std::function<double(double)>& f, const Maximum& peak,
                                                 double step, double reach, double tolerance = 1e-4);

/// T_{t'} as a function of Delta for a fixed chain (Delta replaces the lead level).
[[nodiscard]] std::function<double(double)> transmission_vs_detuning(const PacketRun& base, double t);

/// Steady-state exciton current of the pumped chain (M = 0).
struct SteadyResult {
    double current = 0.0;
    double drain_population = 0.0;
    double cavity_population = 0.0;
    double continuity_residual = 0.0;
};
[[nodiscard]] SteadyResult steady_current(const ChainSpec& pumped, const DissipationRates& rates,
                                          const SteadyStateOptions& options = {});

struct EnsembleSummary {
    double mean = 0.0;
    double std_error = 0.0;  ///< unbiased sample standard deviation / sqrt(n); 0 for n = 1
    int count = 0;
};
[[nodiscard]] EnsembleSummary summarize(std::span<const double> values);

/// Run body(0) ... body(count - 1) on at most `threads` workers that pull
/// indices from a shared counter. The first exception is rethrown after all
/// workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

/// Joint fit log y = a + b log x1 + c log x2. Returns {b, c, r_squared}.
struct PowerLaw2D {
    double exponent_x1 = 0.0;
    double exponent_x2 = 0.0;
    double log_prefactor = 0.0;
    double r_squared = 0.0;
};
[[nodiscard]] PowerLaw2D fit_power_law_2d(std::span<const double> x1, std::span<const double> x2,
                                          std::span<const double> y);

/// max / min - 1 of positive values.
[[nodiscard]] double relative_spread(std::span<const double> values);

}  // namespace excitrans
