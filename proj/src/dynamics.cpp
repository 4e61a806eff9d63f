#include "excitrans/dynamics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace excitrans {

using cplx = std::complex<double>;

void WavePacketSpec::validate() const {
    if (!(delta > 0.0)) {
        throw std::invalid_argument("WavePacketSpec: delta must be > 0");
    }
    if (!(q0 > 0.0 && q0 < std::numbers::pi)) {
        throw std::invalid_argument("WavePacketSpec: q0 must lie in (0, pi)");
    }
}

PureState initial_wave_packet(const WavePacketSpec& wp, const ChainSpec& spec) {
    wp.validate();
    spec.validate();
    const double j0 = static_cast<double>(spec.M) - wp.delta_x;  // 1-based site label
    if (j0 < 1.0 || j0 > static_cast<double>(spec.M)) {
        throw std::invalid_argument("initial_wave_packet: centre j0 = " + std::to_string(j0) +
                                    " lies outside the left lead [1, " + std::to_string(spec.M) + "]");
    }
    // Under negative hopping e^{+iqj} moves right; under positive hopping it is e^{-iqj}.
    const double direction = -static_cast<double>(lead_hopping_sign(spec.hopping));
    const int sites = spec.total_sites();
    PureState psi{Eigen::VectorXcd::Zero(spec.sector_dim())};
    for (int i = 0; i < sites; ++i) {
        const double j = static_cast<double>(i + 1);
        const double envelope = std::exp(-(j - j0) * (j - j0) / (4.0 * wp.delta * wp.delta));
        psi.amplitudes(i) = envelope * std::polar(1.0, direction * wp.q0 * j);
    }
    psi.amplitudes /= psi.amplitudes.norm();
    return psi;
}

bool packet_fits_lead(const WavePacketSpec& wp, const ChainSpec& spec) {
    const double j0 = static_cast<double>(spec.M) - wp.delta_x;
    return j0 - 5.0 * wp.delta >= 1.0;
}

Timescales timescales(double delta_x, double delta, int N, double J) {
    const double t_short = (delta_x + 2.0 * delta) / J;
    return {t_short, t_short + static_cast<double>(N) / (2.0 * J)};
}

Timescales timescales(const WavePacketSpec& wp, const ChainSpec& spec) {
    return timescales(wp.delta_x, wp.delta, spec.N, spec.J);
}

// Propagator ------------------------------------------------------------------

Propagator::Propagator(const HamiltonianMatrix& hamiltonian, PropagationMethod method, double tolerance)
    : method_(method), tolerance_(tolerance), matrix_(hamiltonian.sparse()) {
    if (hamiltonian.hermiticity_defect() > 1e-12) {
        throw std::invalid_argument("Propagator: Hamiltonian is not Hermitian");
    }
    if (method_ == PropagationMethod::Auto) {
        method_ = hamiltonian.dim() <= kSpectralDimLimit ? PropagationMethod::Spectral : PropagationMethod::Chebyshev;
    }
    if (method_ == PropagationMethod::Spectral) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian.dense());
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("Propagator: eigen decomposition failed");
        }
        eigenvalues_ = solver.eigenvalues();
        eigenvectors_ = solver.eigenvectors();
    } else {
        const auto [lo, hi] = hamiltonian.spectral_bounds();
        centre_ = 0.5 * (hi + lo);
        // Small margin keeps the scaled spectrum strictly inside [-1, 1].
        half_width_ = std::max(0.5 * (hi - lo) * (1.0 + 1e-8), 1e-12);
    }
}

PureState Propagator::evolve(const PureState& psi, double t) const {
    if (psi.dim() != static_cast<int>(matrix_.rows())) {
        throw std::invalid_argument("Propagator::evolve: state dimension " + std::to_string(psi.dim()) +
                                    " does not match Hamiltonian dimension " + std::to_string(matrix_.rows()));
    }
    if (t < 0.0) {
        throw std::invalid_argument("Propagator::evolve: t must be >= 0");
    }
    if (t == 0.0) {
        return psi;
    }
    return {method_ == PropagationMethod::Spectral ? spectral(psi.amplitudes, t) : chebyshev(psi.amplitudes, t)};
}

Eigen::VectorXcd Propagator::spectral(const Eigen::VectorXcd& psi, double t) const {
    Eigen::VectorXcd coeffs = eigenvectors_.transpose().cast<cplx>() * psi;
    for (Eigen::Index n = 0; n < coeffs.size(); ++n) {
        coeffs(n) *= std::polar(1.0, -eigenvalues_(n) * t);
    }
    return eigenvectors_.cast<cplx>() * coeffs;
}

Eigen::VectorXcd Propagator::chebyshev(const Eigen::VectorXcd& psi, double t) const {
    // Split t so that each chunk has a Bessel argument of at most kMaxArg.
    constexpr double kMaxArg = 100.0;
    const int chunks = std::max(1, static_cast<int>(std::ceil(half_width_ * t / kMaxArg)));
    const double dt = t / chunks;
    const double x = half_width_ * dt;

    // e^{-iHt} = e^{-i b t} [J0(x) + 2 sum_k (-i)^k J_k(x) T_k(H~)], H~ = (H - b) / a.
    const double chunk_tol = tolerance_ / static_cast<double>(chunks);
    std::vector<cplx> coeffs;
    cplx phase(1.0, 0.0);
    for (int k = 0;; ++k) {
        const double bessel = std::cyl_bessel_j(static_cast<double>(k), x);
        coeffs.push_back((k == 0 ? 1.0 : 2.0) * bessel * phase);
        phase *= cplx(0.0, -1.0);
        if (k > x + 4 && std::abs(bessel) < 1e-3 * chunk_tol) {
            break;
        }
        if (k > 100000) {
            throw std::runtime_error("Propagator::chebyshev: expansion did not converge");
        }
    }

    const cplx global_phase = std::polar(1.0, -centre_ * dt);
    const double inv_width = 1.0 / half_width_;
    const Eigen::SparseMatrix<cplx> hc = matrix_.cast<cplx>();
    auto apply = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
        return inv_width * (hc * v - centre_ * v);
    };

    Eigen::VectorXcd state = psi;
    for (int c = 0; c < chunks; ++c) {
        Eigen::VectorXcd prev = state;
        Eigen::VectorXcd curr = apply(state);
        Eigen::VectorXcd acc = coeffs[0] * prev + coeffs[1] * curr;
        for (std::size_t k = 2; k < coeffs.size(); ++k) {
            Eigen::VectorXcd next = 2.0 * apply(curr) - prev;
            acc += coeffs[k] * next;
            prev = std::move(curr);
            curr = std::move(next);
        }
        state = global_phase * acc;
    }
    return state;
}

PureState evolve(const HamiltonianMatrix& hamiltonian, const PureState& psi0, double t, PropagationMethod method) {
    if (t < 0.0) {
        throw std::invalid_argument("evolve: t must be >= 0");
    }
    return Propagator(hamiltonian, method).evolve(psi0, t);
}

// Lossy cavity -------------------------------------------------------------------

LossyPropagator::LossyPropagator(const HamiltonianMatrix& hamiltonian, double kappa) {
    if (kappa < 0.0) {
        throw std::invalid_argument("LossyPropagator: kappa must be >= 0");
    }
    generator_ = hamiltonian.dense().cast<cplx>();
    const int c = hamiltonian.cavity_index();
    generator_(c, c) -= cplx(0.0, 0.5 * kappa);
}

PureState LossyPropagator::evolve(const PureState& psi, double t) const {
    if (t < 0.0) {
        throw std::invalid_argument("LossyPropagator::evolve: t must be >= 0");
    }
    const Eigen::MatrixXcd step = (cplx(0.0, -t) * generator_).exp();
    return {step * psi.amplitudes};
}

// Observables ---------------------------------------------------------------------

double transmission_at(const PureState& psi, const ChainSpec& spec) {
    if (spec.M <= 0) {
        throw std::invalid_argument("transmission_at: requires leads (M > 0)");
    }
    double total = 0.0;
    for (int i = spec.M + spec.N; i < spec.total_sites(); ++i) {
        total += psi.population(i);
    }
    return total;
}

double cavity_occupation(const PureState& psi) { return psi.population(psi.dim() - 1); }

double in_cavity_remainder(const PureState& psi, const ChainSpec& spec) {
    double total = cavity_occupation(psi);
    for (int i = spec.first_cavity_site(); i <= spec.last_cavity_site(); ++i) {
        total += psi.population(i);
    }
    return total;
}

double center_of_mass(const PureState& psi) {
    double weighted = 0.0;
    double mass = 0.0;
    for (int i = 0; i + 1 < psi.dim(); ++i) {
        const double p = psi.population(i);
        weighted += static_cast<double>(i) * p;
        mass += p;
    }
    return mass > 0.0 ? weighted / mass : 0.0;
}

std::vector<Snapshot> sample_trajectory(const Propagator& propagator, const PureState& psi0, double t_end, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("sample_trajectory: dt must be > 0");
    }
    std::vector<Snapshot> out;
    const int steps = static_cast<int>(std::floor(t_end / dt + 1e-9));
    out.reserve(static_cast<std::size_t>(steps + 1));
    for (int n = 0; n <= steps; ++n) {
        const double t = n * dt;
        out.push_back({t, propagator.evolve(psi0, t)});
    }
    return out;
}

double center_of_mass_velocity(std::span<const Snapshot> trajectory) {
    if (trajectory.size() < 2) {
        throw std::invalid_argument("center_of_mass_velocity: need at least two snapshots");
    }
    double mean_t = 0.0;
    double mean_x = 0.0;
    std::vector<double> xs;
    xs.reserve(trajectory.size());
    for (const auto& snap : trajectory) {
        xs.push_back(center_of_mass(snap.state));
        mean_t += snap.t;
        mean_x += xs.back();
    }
    const double n = static_cast<double>(trajectory.size());
    mean_t /= n;
    mean_x /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        sxy += (trajectory[k].t - mean_t) * (xs[k] - mean_x);
        sxx += (trajectory[k].t - mean_t) * (trajectory[k].t - mean_t);
    }
    if (sxx <= 0.0) {
        throw std::invalid_argument("center_of_mass_velocity: snapshots must span a time interval");
    }
    return sxy / sxx;
}

double windowed_max_transmission(const Propagator& propagator, const PureState& psi0, const ChainSpec& spec,
                                 double t_short, double lo, double hi, int samples) {
    double best = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double frac = samples > 1 ? lo + (hi - lo) * k / (samples - 1) : lo;
        best = std::max(best, transmission_at(propagator.evolve(psi0, frac * t_short), spec));
    }
    return best;
}

}  // namespace excitrans
