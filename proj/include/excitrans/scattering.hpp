// scattering.hpp - closed-form and semi-analytic transmission through the
// cavity region: polariton spectrum, PBC scattering coefficient beta, exact and
// Lorentzian T_q, peak widths, impedance-matched J', and the OBC secular
// equation for the cavity-block eigenvalues.

#pragma once

#include "excitrans/chain.hpp"

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace excitrans {

struct ScatterParams {
    int N = 1;
    double J = 1.0;
    double Jprime = 1.0;
    double g = 0.0;
    std::vector<double> g_per_site;  ///< optional, length N
    double omega0 = 0.0;
    double omega = 0.0;  ///< lead level spacing
    double q = std::numbers::pi / 2.0;

    void validate() const;
    /// Lead dispersion omega_q = omega - 2 J cos q.
    [[nodiscard]] double omega_q() const;
    /// sqrt(sum g_i^2), g sqrt(N) for uniform coupling.
    [[nodiscard]] double collective_coupling() const;
    [[nodiscard]] double coupling(int k) const;
};

/// Scattering parameters of the cavity region of a chain at quasi-momentum q.
[[nodiscard]] ScatterParams scatter_params_from(const ChainSpec& spec, double q);

struct PolaritonSpectrum {
    double omega_u = 0.0;
    double omega_d = 0.0;
    std::vector<double> dark_modes;  ///< N - 1 PBC chain modes, k = 1 .. N-1
};

/// How the site-dependent polariton splitting is read: sqrt(sum g_i^2)
/// (consistent with diagonalisation, the default) or sqrt(sum g_i) as printed.
enum class SiteCouplingReading { SumOfSquares, AsPrinted };

/// PBC polaritons omega0 - J +- G and dark modes omega0 - 2 J cos(2 pi k / N).
[[nodiscard]] PolaritonSpectrum polariton_energies(const ScatterParams& p,
                                                   SiteCouplingReading reading = SiteCouplingReading::SumOfSquares);

/// Raised when omega_q sits on a pole of beta.
class PoleProximityError : public std::domain_error {
public:
    PoleProximityError(const std::string& what, double pole) : std::domain_error(what), pole_(pole) {}
    [[nodiscard]] double pole() const noexcept { return pole_; }

private:
    double pole_;
};

inline constexpr double kPoleTolerance = 1e-12;

/// beta = |J'|^2 / (2 N J sin q) [1/(w_q - W_u) + 1/(w_q - W_d) + sum_k 1/(w_q - W_k)].
[[nodiscard]] double beta_pbc(const ScatterParams& p);

struct ScatteringAmplitudes {
    double T = 0.0;                 ///< 4 beta^2 / (1 + 4 beta^2)
    std::complex<double> t{0.0};    ///< -2 i beta / (1 + 2 i beta)
    std::complex<double> r{0.0};    ///< -1 / (1 + 2 i beta)
    bool at_pole = false;           ///< beta diverged; the T = 1 limit is returned
};

[[nodiscard]] ScatteringAmplitudes amplitudes_from_beta(double beta);
[[nodiscard]] ScatteringAmplitudes transmission_exact(const ScatterParams& p);

enum class PolaritonBranch { Upper, Lower };

/// Lorentzian peak shape around one polariton, valid in collective strong coupling.
[[nodiscard]] double transmission_lorentzian(const ScatterParams& p, PolaritonBranch branch);

/// Quoted peak width J'^2 / (N |v_g|), v_g = 2 J sin q.
[[nodiscard]] double fwhm(const ScatterParams& p);

/// factor (2 ln 2)^{1/4} sqrt(N / (2 delta)) J: keeps the peak width N independent.
[[nodiscard]] double impedance_Jprime(int N, double delta, double factor, double J = 1.0);

/// Alternative convention factor * sqrt(2 N / delta), used for the peak-width study.
[[nodiscard]] double impedance_Jprime_alt(int N, double delta, double factor = 1.5);

/// Wave-packet averaged transmission: T_q weighted by a Gaussian of standard
/// deviation 1 / (2 delta) around q0 (the momentum content of the packet).
/// Only p.omega is used from the lead side; q is integrated over.
[[nodiscard]] double packet_averaged_transmission(const ScatterParams& p, double q0, double delta, int nodes = 801);

/// Exact stationary transmission of the open-boundary geometry: the cavity
/// block of `spec` (N sites plus photon) between two clean semi-infinite
/// nearest-neighbour leads attached through J'. The leads enter through the
/// surface self-energy J'^2 g(E), g = -e^{iq} / J, and
/// T = Gamma^2 |G_{1N}|^2 with Gamma = 2 J'^2 sin q / J. Nearest-neighbour
/// and all-to-all models only.
[[nodiscard]] double transmission_obc(const ChainSpec& spec, double q);

/// transmission_obc averaged over the packet's momentum content, with the
/// same Gaussian weight as packet_averaged_transmission.
[[nodiscard]] double packet_averaged_obc(const ChainSpec& spec, double q0, double delta, int nodes = 801);

/// Raised when bisection cannot bracket a root of the secular equation.
class RootBracketError : public std::runtime_error {
public:
    RootBracketError(const std::string& what, double lo, double hi)
        : std::runtime_error(what + " in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"), lo_(lo), hi_(hi) {}
    [[nodiscard]] double lo() const noexcept { return lo_; }
    [[nodiscard]] double hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

/// Poles and coupling weights of the OBC secular equation: chain eigenvalues
/// omega0 - 2 J cos(pi k / (N+1)) and (sum_i g_i alpha_k^i)^2.
struct SecularPoles {
    std::vector<double> poles;
    std::vector<double> weights;
};
[[nodiscard]] SecularPoles obc_secular_poles(const ScatterParams& p);

/// All N+1 eigenvalues of the cavity block (N OBC sites + photon at omega0),
/// ascending, from bisection of the secular equation between its poles.
[[nodiscard]] std::vector<double> obc_eigenvalues(const ScatterParams& p, double tolerance = 1e-12);

/// True when sorted roots r and poles p satisfy r_0 <= p_0 <= r_1 <= ... <= p_{n-1} <= r_n,
/// strictly wherever the pole carries coupling weight.
[[nodiscard]] bool roots_interlace(const std::vector<double>& roots, const SecularPoles& poles);

}  // namespace excitrans
