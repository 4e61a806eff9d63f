#include "excitrans/scattering.hpp"

#include "excitrans/hamiltonian.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace excitrans {

namespace {

constexpr double kPi = std::numbers::pi;

// Weight below which a chain mode is treated as uncoupled from the photon,
// relative to the total weight sum_k w_k = sum_i g_i^2.
constexpr double kDecoupledWeight = 1e-26;

}  // namespace

void ScatterParams::validate() const {
    if (N < 1) {
        throw std::invalid_argument("ScatterParams: N must be >= 1");
    }
    if (!(q > 0.0 && q < kPi)) {
        throw std::invalid_argument("ScatterParams: q must lie in (0, pi)");
    }
    if (!g_per_site.empty() && static_cast<int>(g_per_site.size()) != N) {
        throw std::invalid_argument("ScatterParams: g_per_site must have length N");
    }
}

double ScatterParams::omega_q() const { return omega - 2.0 * J * std::cos(q); }

double ScatterParams::coupling(int k) const {
    return g_per_site.empty() ? g : g_per_site[static_cast<std::size_t>(k)];
}

double ScatterParams::collective_coupling() const {
    if (g_per_site.empty()) {
        return std::abs(g) * std::sqrt(static_cast<double>(N));
    }
    return std::sqrt(std::inner_product(g_per_site.begin(), g_per_site.end(), g_per_site.begin(), 0.0));
}

ScatterParams scatter_params_from(const ChainSpec& spec, double q) {
    ScatterParams p;
    p.N = spec.N;
    p.J = spec.inner_hopping();
    p.Jprime = spec.Jprime;
    p.g = spec.g;
    p.g_per_site = spec.g_per_site;
    p.omega0 = spec.omega0;
    p.omega = spec.omega;
    p.q = q;
    return p;
}

PolaritonSpectrum polariton_energies(const ScatterParams& p, SiteCouplingReading reading) {
    p.validate();
    double splitting = p.collective_coupling();
    if (!p.g_per_site.empty() && reading == SiteCouplingReading::AsPrinted) {
        const double sum = std::accumulate(p.g_per_site.begin(), p.g_per_site.end(), 0.0);
        if (sum < 0.0) {
            throw std::domain_error("polariton_energies: sum of g_i is negative under the as-printed reading");
        }
        splitting = std::sqrt(sum);
    }
    PolaritonSpectrum out;
    out.omega_u = p.omega0 - p.J + splitting;
    out.omega_d = p.omega0 - p.J - splitting;
    out.dark_modes.reserve(static_cast<std::size_t>(p.N - 1));
    for (int k = 1; k < p.N; ++k) {
        out.dark_modes.push_back(p.omega0 - 2.0 * p.J * std::cos(2.0 * kPi * k / p.N));
    }
    return out;
}

double beta_pbc(const ScatterParams& p) {
    const PolaritonSpectrum spectrum = polariton_energies(p);
    const double wq = p.omega_q();
    auto term = [wq](double pole) {
        const double gap = wq - pole;
        if (std::abs(gap) < kPoleTolerance) {
            throw PoleProximityError("beta_pbc: omega_q = " + std::to_string(wq) + " is on a pole", pole);
        }
        return 1.0 / gap;
    };
    double sum = term(spectrum.omega_u) + term(spectrum.omega_d);
    for (double w : spectrum.dark_modes) {
        sum += term(w);
    }
    return p.Jprime * p.Jprime / (2.0 * p.N * p.J * std::sin(p.q)) * sum;
}

ScatteringAmplitudes amplitudes_from_beta(double beta) {
    using cplx = std::complex<double>;
    const cplx denom(1.0, 2.0 * beta);
    ScatteringAmplitudes out;
    out.t = cplx(0.0, -2.0 * beta) / denom;
    out.r = -1.0 / denom;
    out.T = 4.0 * beta * beta / (1.0 + 4.0 * beta * beta);
    return out;
}

ScatteringAmplitudes transmission_exact(const ScatterParams& p) {
    try {
        return amplitudes_from_beta(beta_pbc(p));
    } catch (const PoleProximityError&) {
        ScatteringAmplitudes limit;
        limit.T = 1.0;
        limit.t = -1.0;
        limit.r = 0.0;
        limit.at_pole = true;
        return limit;
    }
}

double transmission_lorentzian(const ScatterParams& p, PolaritonBranch branch) {
    p.validate();
    const double sign = branch == PolaritonBranch::Upper ? 1.0 : -1.0;
    const double polariton = p.omega0 + sign * p.collective_coupling();
    const double bracket = p.omega + p.J * (1.0 - 2.0 * std::cos(p.q)) - polariton;
    const double s = std::sin(p.q);
    const double jp4 = std::pow(p.Jprime, 4);
    return 1.0 / (1.0 + p.N * p.N * p.J * p.J * s * s * bracket * bracket / jp4);
}

double fwhm(const ScatterParams& p) {
    p.validate();
    const double group_velocity = std::abs(2.0 * p.J * std::sin(p.q));
    return p.Jprime * p.Jprime / (p.N * group_velocity);
}

double impedance_Jprime(int N, double delta, double factor, double J) {
    if (N <= 0 || !(delta > 0.0)) {
        throw std::invalid_argument("impedance_Jprime: N and delta must be positive");
    }
    return factor * std::pow(2.0 * std::log(2.0), 0.25) * std::sqrt(N / (2.0 * delta)) * J;
}

double impedance_Jprime_alt(int N, double delta, double factor) {
    if (N <= 0 || !(delta > 0.0)) {
        throw std::invalid_argument("impedance_Jprime_alt: N and delta must be positive");
    }
    return factor * std::sqrt(2.0 * N / delta);
}

double packet_averaged_transmission(const ScatterParams& p, double q0, double delta, int nodes) {
    if (nodes < 3 || !(delta > 0.0)) {
        throw std::invalid_argument("packet_averaged_transmission: need nodes >= 3 and delta > 0");
    }
    const double sigma = 1.0 / (2.0 * delta);
    const double lo = std::max(q0 - 6.0 * sigma, 1e-9);
    const double hi = std::min(q0 + 6.0 * sigma, kPi - 1e-9);
    const double h = (hi - lo) / (nodes - 1);
    double num = 0.0;
    double den = 0.0;
    ScatterParams at = p;
    for (int n = 0; n < nodes; ++n) {
        at.q = lo + n * h;
        const double z = (at.q - q0) / sigma;
        const double w = std::exp(-0.5 * z * z) * ((n == 0 || n == nodes - 1) ? 0.5 : 1.0);
        num += w * transmission_exact(at).T;
        den += w;
    }
    return num / den;
}

// Open-boundary Green's function -----------------------------------------------------

namespace {

struct BlockSpectrum {
    Eigen::VectorXd energies;
    Eigen::VectorXd entrance;  ///< eigenvector amplitudes on the first cavity site
    Eigen::VectorXd exit;      ///< and on the last one
};

BlockSpectrum block_spectrum(const ChainSpec& spec) {
    if (!std::holds_alternative<NearestNeighbor>(spec.hopping) && !std::holds_alternative<AllToAll>(spec.hopping)) {
        throw std::invalid_argument("transmission_obc: nearest-neighbour or all-to-all models only");
    }
    if (spec.M < 1 || spec.boundary != Boundary::Open) {
        throw std::invalid_argument("transmission_obc: needs leads (M > 0) and open boundaries");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cavity_block(spec));
    return {solver.eigenvalues(), solver.eigenvectors().row(0).transpose(),
            solver.eigenvectors().row(spec.N - 1).transpose()};
}

double obc_from_spectrum(const BlockSpectrum& b, const ChainSpec& spec, double q) {
    using cd = std::complex<double>;
    const double E = spec.omega - 2.0 * spec.J * std::cos(q);
    const cd sigma = -spec.Jprime * spec.Jprime * std::exp(cd(0.0, q)) / spec.J;
    cd k11 = 0.0;
    cd k1n = 0.0;
    cd knn = 0.0;
    for (Eigen::Index n = 0; n < b.energies.size(); ++n) {
        const cd inv = 1.0 / cd(E - b.energies(n), 0.0);
        k11 += b.entrance(n) * b.entrance(n) * inv;
        k1n += b.entrance(n) * b.exit(n) * inv;
        knn += b.exit(n) * b.exit(n) * inv;
    }
    if (spec.N == 1) {
        // Entrance and exit coincide: one site carries both self-energies.
        const cd g = 1.0 / (1.0 / k11 - 2.0 * sigma);
        const double gamma = -2.0 * sigma.imag();
        return gamma * gamma * std::norm(g);
    }
    // Dyson equation on the two contact sites: G = (K^{-1} - sigma)^{-1}.
    Eigen::Matrix2cd K;
    K << k11, k1n, k1n, knn;
    const Eigen::Matrix2cd G = (K.inverse() - sigma * Eigen::Matrix2cd::Identity()).inverse();
    const double gamma = -2.0 * sigma.imag();
    return gamma * gamma * std::norm(G(0, 1));
}

}  // namespace

double transmission_obc(const ChainSpec& spec, double q) {
    if (!(q > 0.0 && q < kPi)) {
        throw std::invalid_argument("transmission_obc: q must lie in (0, pi)");
    }
    return obc_from_spectrum(block_spectrum(spec), spec, q);
}

double packet_averaged_obc(const ChainSpec& spec, double q0, double delta, int nodes) {
    if (nodes < 3 || !(delta > 0.0)) {
        throw std::invalid_argument("packet_averaged_obc: need nodes >= 3 and delta > 0");
    }
    const BlockSpectrum b = block_spectrum(spec);
    const double sigma = 1.0 / (2.0 * delta);
    const double lo = std::max(q0 - 6.0 * sigma, 1e-9);
    const double hi = std::min(q0 + 6.0 * sigma, kPi - 1e-9);
    const double h = (hi - lo) / (nodes - 1);
    double num = 0.0;
    double den = 0.0;
    for (int n = 0; n < nodes; ++n) {
        const double q = lo + n * h;
        const double z = (q - q0) / sigma;
        const double w = std::exp(-0.5 * z * z) * ((n == 0 || n == nodes - 1) ? 0.5 : 1.0);
        num += w * obc_from_spectrum(b, spec, q);
        den += w;
    }
    return num / den;
}

// OBC secular equation -------------------------------------------------------------

SecularPoles obc_secular_poles(const ScatterParams& p) {
    if (p.N < 1) {
        throw std::invalid_argument("obc_secular_poles: N must be >= 1");
    }
    if (!p.g_per_site.empty() && static_cast<int>(p.g_per_site.size()) != p.N) {
        throw std::invalid_argument("obc_secular_poles: g_per_site must have length N");
    }
    const int n = p.N;
    const double norm = std::sqrt(2.0 / (n + 1));
    SecularPoles out;
    out.poles.resize(static_cast<std::size_t>(n));
    out.weights.resize(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        out.poles[static_cast<std::size_t>(k - 1)] = p.omega0 - 2.0 * p.J * std::cos(kPi * k / (n + 1));
        double overlap = 0.0;
        for (int i = 1; i <= n; ++i) {
            overlap += p.coupling(i - 1) * norm * std::sin(kPi * k * i / (n + 1));
        }
        out.weights[static_cast<std::size_t>(k - 1)] = overlap * overlap;
    }
    return out;
}

namespace {

struct PoleGroup {
    double position;
    double weight;
    int multiplicity;
};

std::vector<PoleGroup> group_poles(const SecularPoles& sp) {
    std::vector<std::size_t> order(sp.poles.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sp.poles[a] < sp.poles[b]; });
    std::vector<PoleGroup> groups;
    for (std::size_t idx : order) {
        const double x = sp.poles[idx];
        const double merge_tol = 1e-12 * std::max(1.0, std::abs(x));
        if (!groups.empty() && std::abs(x - groups.back().position) <= merge_tol) {
            groups.back().weight += sp.weights[idx];
            groups.back().multiplicity += 1;
        } else {
            groups.push_back({x, sp.weights[idx], 1});
        }
    }
    return groups;
}

}  // namespace

std::vector<double> obc_eigenvalues(const ScatterParams& p, double tolerance) {
    const SecularPoles sp = obc_secular_poles(p);
    const double photon = p.omega0;
    const double total_weight = std::accumulate(sp.weights.begin(), sp.weights.end(), 0.0);

    std::vector<double> roots;
    roots.reserve(static_cast<std::size_t>(p.N + 1));

    std::vector<PoleGroup> coupled;
    for (const PoleGroup& grp : group_poles(sp)) {
        const bool live = grp.weight > kDecoupledWeight * total_weight && total_weight > 0.0;
        // A group of m modes contributes m - 1 roots at the pole (m if uncoupled).
        const int stuck = live ? grp.multiplicity - 1 : grp.multiplicity;
        roots.insert(roots.end(), static_cast<std::size_t>(stuck), grp.position);
        if (live) {
            coupled.push_back(grp);
        }
    }

    // f(x) = x - omega_c - sum_k w_k / (x - p_k) increases monotonically between poles.
    auto f = [&](double x) {
        double s = x - photon;
        for (const PoleGroup& grp : coupled) {
            s -= grp.weight / (x - grp.position);
        }
        return s;
    };
    auto bisect = [&](double lo, double hi) {
        if (!(lo < hi)) {
            throw RootBracketError("obc_eigenvalues: empty bracket", lo, hi);
        }
        for (int iter = 0; iter < 400; ++iter) {
            const double mid = 0.5 * (lo + hi);
            if (hi - lo <= tolerance || mid <= lo || mid >= hi) {
                return mid;
            }
            const double value = f(mid);
            if (std::isnan(value)) {
                throw RootBracketError("obc_eigenvalues: secular function is NaN", lo, hi);
            }
            (value < 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    if (coupled.empty()) {
        roots.push_back(photon);
    } else {
        const double reach = std::sqrt(total_weight) + 1.0;
        const double lowest = coupled.front().position;
        const double highest = coupled.back().position;
        const double lo = std::min(lowest, photon) - reach;
        const double hi = std::max(highest, photon) + reach;
        if (!(f(lo) < 0.0)) {
            throw RootBracketError("obc_eigenvalues: lower exterior root not bracketed", lo, lowest);
        }
        if (!(f(hi) > 0.0)) {
            throw RootBracketError("obc_eigenvalues: upper exterior root not bracketed", highest, hi);
        }
        roots.push_back(bisect(lo, lowest));
        for (std::size_t k = 0; k + 1 < coupled.size(); ++k) {
            roots.push_back(bisect(coupled[k].position, coupled[k + 1].position));
        }
        roots.push_back(bisect(highest, hi));
    }

    if (static_cast<int>(roots.size()) != p.N + 1) {
        throw std::logic_error("obc_eigenvalues: found " + std::to_string(roots.size()) + " roots, expected " +
                               std::to_string(p.N + 1));
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

bool roots_interlace(const std::vector<double>& roots, const SecularPoles& sp) {
    if (roots.size() != sp.poles.size() + 1) {
        return false;
    }
    std::vector<std::size_t> order(sp.poles.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sp.poles[a] < sp.poles[b]; });
    const double total_weight = std::accumulate(sp.weights.begin(), sp.weights.end(), 0.0);
    for (std::size_t k = 0; k < order.size(); ++k) {
        const double pole = sp.poles[order[k]];
        const bool live = sp.weights[order[k]] > kDecoupledWeight * total_weight && total_weight > 0.0;
        const double below = roots[k];
        const double above = roots[k + 1];
        if (live ? !(below < pole && pole < above) : !(below <= pole && pole <= above)) {
            return false;
        }
    }
    return true;
}

}  // namespace excitrans
