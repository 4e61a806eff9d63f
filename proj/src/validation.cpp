#include "excitrans/validation.hpp"

#include "excitrans/chain.hpp"
#include "excitrans/experiments.hpp"
#include "excitrans/hamiltonian.hpp"
#include "excitrans/open_system.hpp"
#include "excitrans/scattering.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace excitrans {

namespace {

CheckResult finish(std::string name, double measured, double tolerance, std::string detail) {
    return {std::move(name), measured, tolerance, measured < tolerance, std::move(detail)};
}

ChainSpec pumped_chain(int N, double g, std::uint64_t seed) {
    ChainSpec c;
    c.M = 0;
    c.N = N;
    c.Jprime = 1.0;
    c.g = g;
    c.disorder = {TunnelingGaussian{0.2}, seed};
    return c;
}

DissipationRates figure_rates(double gamma_P, double kappa) {
    DissipationRates r;
    r.gamma_P = gamma_P;
    r.gamma_out = 2.0;
    r.gamma_sp = 0.04;
    r.gamma_deph = 0.9;
    r.kappa = kappa;
    return r;
}

}  // namespace

ValidationScale quick_validation() {
    ValidationScale s;
    s.steady_max_sites = 4;
    s.eigen_sizes = {1, 2, 5, 20, 60};
    s.unitarity_draws = 200;
    s.continuity_sizes = {10, 20};
    return s;
}

CheckResult check_hermiticity(std::uint64_t seed) {
    double worst = 0.0;
    int cases = 0;
    std::vector<HoppingModel> models{NearestNeighbor{}, DipolarLongRange{1.0, false}, AllToAll{0.7}};
    for (const HoppingModel& model : models) {
        for (int N : {1, 7, 40}) {
            ChainSpec c;
            c.M = 5;
            c.N = N;
            c.g = std::holds_alternative<AllToAll>(model) ? 0.0 : 0.8;
            c.Jprime = 2.0;
            c.hopping = model;
            if (std::holds_alternative<DipolarLongRange>(model)) {
                c.disorder = {Positional{0.05}, seed};
            } else {
                c.disorder = {TunnelingGaussian{0.2}, seed};
            }
            worst = std::max(worst, build_hamiltonian(c).hermiticity_defect());
            ++cases;
        }
    }
    return finish("hamiltonian_symmetric", worst, 1e-12, std::to_string(cases) + " chains");
}

CheckResult check_decoupled_photon(std::uint64_t seed) {
    double worst = 0.0;
    for (int N : {3, 30}) {
        ChainSpec c;
        c.M = 10;
        c.N = N;
        c.g = 0.0;
        c.omega_c = 0.37;
        c.disorder = {TunnelingGaussian{0.2}, seed};
        const Eigen::MatrixXd H = build_hamiltonian(c).dense();
        const int n = c.total_sites();
        Eigen::VectorXd full = symmetric_eigenvalues(H);
        Eigen::VectorXd sites = symmetric_eigenvalues(H.topLeftCorner(n, n));
        std::vector<double> expected(sites.data(), sites.data() + sites.size());
        expected.push_back(c.cavity_energy());
        std::sort(expected.begin(), expected.end());
        for (Eigen::Index i = 0; i < full.size(); ++i) {
            worst = std::max(worst, std::abs(full(i) - expected[static_cast<std::size_t>(i)]));
        }
    }
    return finish("decoupled_photon_spectrum", worst, 1e-12, "g = 0, N in {3, 30}");
}

CheckResult check_steady_vs_integration(const ValidationScale& scale, std::uint64_t seed) {
    double worst = 0.0;
    for (int N = 2; N <= scale.steady_max_sites; ++N) {
        const ChainSpec c = pumped_chain(N, 0.3, seed + static_cast<std::uint64_t>(N));
        const Liouvillian L = build_liouvillian(build_hamiltonian(c), figure_rates(0.5, 1.0));
        const DensityOperator direct = steady_state(L);
        const DensityOperator evolved = time_integrate(L, DensityOperator::vacuum(L.dim()), scale.integration_time);
        worst = std::max(worst, trace_distance(direct, evolved));
    }
    std::ostringstream detail;
    detail << "N = 2.." << scale.steady_max_sites << ", t = " << scale.integration_time;
    return finish("steady_state_vs_integration", worst, 1e-6, detail.str());
}

CheckResult check_obc_eigenvalues(const ValidationScale& scale, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coupling(0.1, 3.0);
    double worst = 0.0;
    for (int N : scale.eigen_sizes) {
        for (bool site_dependent : {false, true}) {
            ChainSpec c;
            c.M = 0;
            c.N = N;
            c.g = 1.3;
            c.omega0 = 0.25;
            if (site_dependent) {
                c.g_per_site.resize(static_cast<std::size_t>(N));
                for (double& g : c.g_per_site) g = coupling(rng);
            }
            const ScatterParams p = scatter_params_from(c, std::numbers::pi / 2.0);
            const std::vector<double> roots = obc_eigenvalues(p);
            const Eigen::VectorXd direct = symmetric_eigenvalues(cavity_block(c));
            for (std::size_t i = 0; i < roots.size(); ++i) {
                worst = std::max(worst, std::abs(roots[i] - direct(static_cast<Eigen::Index>(i))));
            }
        }
    }
    return finish("obc_eigenvalues_vs_diagonalization", worst, 1e-9,
                  "N up to " + std::to_string(scale.eigen_sizes.back()) + ", uniform and site-dependent g");
}

CheckResult check_unitarity(const ValidationScale& scale, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> sites(1, 200);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    int done = 0;
    int skipped = 0;
    while (done < scale.unitarity_draws) {
        ScatterParams p;
        p.N = sites(rng);
        p.g = 50.0 * unit(rng);
        p.Jprime = 0.1 + 19.9 * unit(rng);
        p.omega0 = 0.0;
        p.omega = -20.0 + 40.0 * unit(rng);
        p.q = 0.05 + (std::numbers::pi - 0.1) * unit(rng);
        try {
            const ScatteringAmplitudes a = transmission_exact(p);
            worst = std::max(worst, std::abs(std::norm(a.t) + std::norm(a.r) - 1.0));
            ++done;
        } catch (const PoleProximityError&) {
            ++skipped;
        }
    }
    return finish("flux_conservation", worst, 1e-12,
                  std::to_string(done) + " random draws, " + std::to_string(skipped) + " on a pole redrawn");
}

CheckResult check_continuity(const ValidationScale& scale, std::uint64_t seed) {
    double worst = 0.0;
    int cases = 0;
    for (int N : scale.continuity_sizes) {
        for (double g : {0.0, 0.2}) {
            for (double gamma_P : {0.05, 0.5, 5.0}) {
                for (double kappa : {0.0, 10.0}) {
                    const SteadyResult s = steady_current(pumped_chain(N, g, seed), figure_rates(gamma_P, kappa));
                    worst = std::max(worst, s.continuity_residual);
                    ++cases;
                }
            }
        }
    }
    return finish("continuity_residual", worst, 1e-9, std::to_string(cases) + " steady states");
}

std::vector<CheckResult> run_invariants(const ValidationScale& scale, std::uint64_t seed) {
    return {check_hermiticity(seed),
            check_decoupled_photon(seed),
            check_steady_vs_integration(scale, seed),
            check_obc_eigenvalues(scale, seed),
            check_unitarity(scale, seed),
            check_continuity(scale, seed)};
}

}  // namespace excitrans
