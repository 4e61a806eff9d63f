// chain.hpp - geometry, energy landscape, hopping and disorder description of
// a chain of two-level systems partially embedded in a single-mode cavity.
//
// Site indices are 0-based in code: sites [0, M) are the left lead,
// [M, M+N) are cavity-coupled, [M+N, 2M+N) the right lead. All energies and
// rates are in units of the reference tunneling J, times in units of 1/J.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace excitrans {

enum class Boundary { Open, Periodic };

// Hopping models ------------------------------------------------------------

/// -J_i on nearest-neighbour bonds only.
struct NearestNeighbor {};

/// Jbar / |x_i - x_j|^3 between every pair of sites. The default Jbar = -J
/// makes the nearest-neighbour truncation coincide with the -J_i chain.
struct DipolarLongRange {
    double Jbar = -1.0;
    bool nearest_only = false;  ///< keep only the |i - j| = 1 terms
};

/// Nearest-neighbour chain plus Jinf on every pair (i, j) of cavity-region
/// sites, diagonal included. The cavity mode is left uncoupled.
struct AllToAll {
    double Jinf = 0.5;
};

/// Adiabatically eliminated lossy cavity: AllToAll with Jinf = 2 g^2 / kappa.
struct EffectiveCavity {
    double g = 1.0;
    double kappa = 1.0;
};

using HoppingModel = std::variant<NearestNeighbor, DipolarLongRange, AllToAll, EffectiveCavity>;

// Disorder -------------------------------------------------------------------

struct NoDisorder {};

/// J_i = J + N(0, deltaJ) on every bond except the cavity entrance/exit.
struct TunnelingGaussian {
    double deltaJ = 0.0;
};

/// x_i = i + N(0, sigma_frac), lattice-constant units.
struct Positional {
    double sigma_frac = 0.0;
};

using DisorderKind = std::variant<NoDisorder, TunnelingGaussian, Positional>;

struct DisorderSpec {
    DisorderKind kind = NoDisorder{};
    std::uint64_t seed = 0;
};

// Chain ----------------------------------------------------------------------

struct ChainSpec {
    int M = 0;  ///< sites in each lead; 0 is the pumped configuration
    int N = 1;  ///< cavity-coupled sites
    double omega0 = 0.0;  ///< level spacing inside the cavity region
    double omega = 0.0;   ///< level spacing in the leads (Delta = omega - omega0)
    double J = 1.0;       ///< reference tunneling
    double Jprime = 1.0;  ///< cavity entrance/exit tunneling
    double g = 0.0;       ///< uniform cavity coupling
    std::vector<double> g_per_site;  ///< optional site-dependent couplings, length N
    std::optional<double> omega_c;   ///< cavity mode energy, defaults to omega0
    std::optional<double> J_cavity;  ///< tunneling inside the cavity region, defaults to J
    Boundary boundary = Boundary::Open;
    HoppingModel hopping = NearestNeighbor{};
    DisorderSpec disorder{};

    [[nodiscard]] int total_sites() const noexcept { return 2 * M + N; }
    /// Dimension of the single-excitation sector: sites plus the cavity mode.
    [[nodiscard]] int sector_dim() const noexcept { return total_sites() + 1; }
    [[nodiscard]] int cavity_index() const noexcept { return total_sites(); }
    [[nodiscard]] int first_cavity_site() const noexcept { return M; }
    [[nodiscard]] int last_cavity_site() const noexcept { return M + N - 1; }
    [[nodiscard]] bool in_cavity_region(int site) const noexcept { return site >= M && site < M + N; }

    [[nodiscard]] double delta() const noexcept { return omega - omega0; }
    [[nodiscard]] double cavity_energy() const noexcept { return omega_c.value_or(omega0); }
    [[nodiscard]] double inner_hopping() const noexcept { return J_cavity.value_or(J); }
    /// Coupling of cavity-region site `k` (0-based within the cavity region).
    [[nodiscard]] double coupling(int k) const;
    /// sqrt(sum_i g_i^2); g sqrt(N) for uniform coupling.
    [[nodiscard]] double collective_coupling() const;

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

/// Convenience: set omega so that Delta = omega - omega0 takes the given value.
inline void set_detuning(ChainSpec& spec, double delta) { spec.omega = spec.omega0 + delta; }

[[nodiscard]] std::string hopping_name(const HoppingModel& model);
[[nodiscard]] std::string disorder_name(const DisorderKind& kind);

/// Sign of the nearest-neighbour matrix element of the lead hopping (-1 for
/// the -J_i convention, +1 for the dipolar convention).
[[nodiscard]] int lead_hopping_sign(const HoppingModel& model) noexcept;

}  // namespace excitrans
