// dynamics.hpp - exciton wave-packets, unitary propagation and transmission
// observables in the single-excitation sector.

#pragma once

#include "excitrans/chain.hpp"
#include "excitrans/hamiltonian.hpp"

#include <Eigen/Dense>

#include <numbers>
#include <span>
#include <vector>

namespace excitrans {

struct PureState {
    Eigen::VectorXcd amplitudes;

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(amplitudes.size()); }
    [[nodiscard]] double norm() const { return amplitudes.norm(); }
    [[nodiscard]] double population(int index) const { return std::norm(amplitudes(index)); }
};

struct WavePacketSpec {
    double q0 = std::numbers::pi / 2.0;  ///< quasi-momentum
    double delta = 5.0;                  ///< real-space standard deviation (sites)
    double delta_x = 20.0;               ///< initial distance from the cavity entrance, M - j0

    void validate() const;
};

struct Timescales {
    double t_short = 0.0;  ///< cavity-mediated scale, (delta_x + 2 delta) / J
    double t_long = 0.0;   ///< free-hopping scale, t_short + N / (2 J)
};

/// Gaussian packet centred on site j0 = M - delta_x (1-based) with
/// momentum q0, travelling towards the cavity. Throws std::invalid_argument if
/// j0 is outside the left lead.
[[nodiscard]] PureState initial_wave_packet(const WavePacketSpec& wp, const ChainSpec& spec);

/// True when the 5-sigma tail stays clear of the outer end of the left lead.
/// The inner tail may overlap the cavity entrance (it does for delta_x < 5 delta).
[[nodiscard]] bool packet_fits_lead(const WavePacketSpec& wp, const ChainSpec& spec);

[[nodiscard]] Timescales timescales(const WavePacketSpec& wp, const ChainSpec& spec);
[[nodiscard]] Timescales timescales(double delta_x, double delta, int N, double J = 1.0);

enum class PropagationMethod { Auto, Spectral, Chebyshev };

/// Largest sector dimension for which Auto selects the spectral route.
inline constexpr int kSpectralDimLimit = 2000;

/// Reusable e^{-iHt} for one Hamiltonian. The spectral route diagonalises once
/// and serves any number of times; the Chebyshev route expands in Bessel
/// coefficients on Gershgorin bounds with the requested tolerance.
class Propagator {
public:
    explicit Propagator(const HamiltonianMatrix& hamiltonian, PropagationMethod method = PropagationMethod::Auto,
                        double tolerance = 1e-12);

    [[nodiscard]] PureState evolve(const PureState& psi, double t) const;
    [[nodiscard]] PropagationMethod method() const noexcept { return method_; }
    [[nodiscard]] const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }

private:
    [[nodiscard]] Eigen::VectorXcd spectral(const Eigen::VectorXcd& psi, double t) const;
    [[nodiscard]] Eigen::VectorXcd chebyshev(const Eigen::VectorXcd& psi, double t) const;

    PropagationMethod method_;
    double tolerance_;
    SparseReal matrix_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd eigenvectors_;
    double centre_ = 0.0;
    double half_width_ = 1.0;
};

/// One-shot e^{-iHt} psi0. Rejects non-symmetric H and negative t.
[[nodiscard]] PureState evolve(const HamiltonianMatrix& hamiltonian, const PureState& psi0, double t,
                               PropagationMethod method = PropagationMethod::Auto);

/// Non-unitary no-jump evolution with cavity loss, exp(-i (H - i kappa/2 |c><c|) t).
/// Population lost from the photon goes to the vacuum, which carries no site
/// population, so site observables equal those of the full master equation.
class LossyPropagator {
public:
    LossyPropagator(const HamiltonianMatrix& hamiltonian, double kappa);
    [[nodiscard]] PureState evolve(const PureState& psi, double t) const;

private:
    Eigen::MatrixXcd generator_;
};

// Observables -----------------------------------------------------------------

/// Population to the right of the cavity region.
[[nodiscard]] double transmission_at(const PureState& psi, const ChainSpec& spec);
/// Photon population |psi_c|^2.
[[nodiscard]] double cavity_occupation(const PureState& psi);
/// Population still inside the cavity region, sites plus photon.
[[nodiscard]] double in_cavity_remainder(const PureState& psi, const ChainSpec& spec);
/// sum_j j |psi_j|^2 over sites (0-based positions).
[[nodiscard]] double center_of_mass(const PureState& psi);

struct Snapshot {
    double t = 0.0;
    PureState state;
};

/// States at t = 0, dt, 2 dt, ... up to t_end (inclusive when it lands on the grid).
[[nodiscard]] std::vector<Snapshot> sample_trajectory(const Propagator& propagator, const PureState& psi0,
                                                      double t_end, double dt = 0.5);

/// Least-squares slope of the centre of mass against time (sites * J).
[[nodiscard]] double center_of_mass_velocity(std::span<const Snapshot> trajectory);

/// T_{t'} for t' in the window [lo * t_s, hi * t_s]: maximum over a uniform grid.
[[nodiscard]] double windowed_max_transmission(const Propagator& propagator, const PureState& psi0,
                                               const ChainSpec& spec, double t_short, double lo = 0.8,
                                               double hi = 1.2, int samples = 41);

}  // namespace excitrans
