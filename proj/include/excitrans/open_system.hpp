// open_system.hpp - Lindblad dynamics in the 0+1 excitation manifold.
//
// Manifold basis: index 0 = |vac>, 1 .. S = one excitation on site 0 .. S-1,
// S+1 = one photon. Every dissipator has the form
//   gamma (L rho L^dag - 1/2 {L^dag L, rho}),  L = |target><source|,
// which is the same as the -{L^dag L, rho} + 2 L rho L^dag convention with
// operators sqrt(gamma/2) |target><source|.

#pragma once

#include "excitrans/hamiltonian.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace excitrans {

using cplx = std::complex<double>;
using SparseComplex = Eigen::SparseMatrix<cplx>;

struct DissipationRates {
    double kappa = 0.0;       ///< cavity decay
    double gamma_sp = 0.0;    ///< spontaneous emission, every site
    double gamma_deph = 0.0;  ///< dephasing, every site (not the photon)
    double gamma_P = 0.0;     ///< incoherent pump into the first site
    double gamma_out = 0.0;   ///< drain from the last site

    void validate() const;
};

class DensityOperator {
public:
    DensityOperator() = default;
    explicit DensityOperator(Eigen::MatrixXcd rho);

    static DensityOperator vacuum(int dim);
    /// |i><i| for manifold index i.
    static DensityOperator basis_state(int dim, int index);
    static DensityOperator pure(const Eigen::VectorXcd& psi);

    [[nodiscard]] const Eigen::MatrixXcd& matrix() const noexcept { return rho_; }
    [[nodiscard]] int dim() const noexcept { return static_cast<int>(rho_.rows()); }
    [[nodiscard]] cplx trace() const { return rho_.trace(); }
    [[nodiscard]] double population(int index) const { return rho_(index, index).real(); }
    [[nodiscard]] double purity() const;
    [[nodiscard]] double hermiticity_defect() const;
    [[nodiscard]] double min_eigenvalue() const;

private:
    Eigen::MatrixXcd rho_;
};

/// 1/2 || a - b ||_1.
[[nodiscard]] double trace_distance(const DensityOperator& a, const DensityOperator& b);

struct JumpOperator {
    std::string channel;  ///< "kappa", "sp_em", "deph", "pump" or "out"
    int target = 0;
    int source = 0;
    double rate = 0.0;
};

class Liouvillian {
public:
    Liouvillian(const HamiltonianMatrix& hamiltonian, const DissipationRates& rates);

    /// Superoperator on column-major vec(rho), dimension dim()^2.
    [[nodiscard]] const SparseComplex& matrix() const noexcept { return matrix_; }
    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] int sites() const noexcept { return dim_ - 2; }
    [[nodiscard]] int vacuum_index() const noexcept { return 0; }
    [[nodiscard]] int site_index(int site) const noexcept { return 1 + site; }
    [[nodiscard]] int cavity_index() const noexcept { return dim_ - 1; }
    [[nodiscard]] int pump_index() const noexcept { return site_index(0); }
    [[nodiscard]] int drain_index() const noexcept { return site_index(sites() - 1); }
    [[nodiscard]] int vec_index(int row, int col) const noexcept { return row + dim_ * col; }

    [[nodiscard]] const Eigen::MatrixXcd& hamiltonian() const noexcept { return hamiltonian_; }
    [[nodiscard]] const DissipationRates& rates() const noexcept { return rates_; }
    [[nodiscard]] const std::vector<JumpOperator>& jumps() const noexcept { return jumps_; }

    [[nodiscard]] Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;

private:
    int dim_ = 0;
    Eigen::MatrixXcd hamiltonian_;
    DissipationRates rates_;
    std::vector<JumpOperator> jumps_;
    SparseComplex matrix_;
};

/// Pump |1_first><vac| (projected so it only refills from the vacuum); drain,
/// photon decay and emission return to the vacuum; dephasing is diagonal.
[[nodiscard]] Liouvillian build_liouvillian(const HamiltonianMatrix& hamiltonian, const DissipationRates& rates);

enum class SteadyStateSolver { Auto, Direct, Iterative };

struct SteadyStateOptions {
    SteadyStateSolver solver = SteadyStateSolver::Auto;
    /// Auto uses sparse LU up to this many sites and BiCGSTAB above, falling
    /// back to LU if the iteration fails. LU fill-in grows fast once the
    /// photon couples to every site (about 90 s at 100 sites).
    int direct_site_limit = 24;
    double tolerance = 1e-10;     ///< on || L rho || / || rho ||
    /// Factorise a second bordered system (a different row traded for the
    /// trace) and require both answers to agree.
    bool verify_unique = false;
};

class SteadyStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Null vector of L with unit trace, from the bordered system in which the
/// vacuum-population row is replaced by the trace functional. When the photon
/// is uncoupled and lossless its population is conserved; the photon-free
/// steady state is returned in that case.
[[nodiscard]] DensityOperator steady_state(const Liouvillian& liouvillian, const SteadyStateOptions& options = {});

/// gamma_out <n_N>: the magnitude of tr[n_e L_out(rho)] with n_e the drain-site number.
[[nodiscard]] double current_out(const DensityOperator& rho, const DissipationRates& rates);

/// Every term of d<n_e>/dt, evaluated separately.
struct ContinuityAudit {
    double pump = 0.0;
    double out = 0.0;
    double spontaneous = 0.0;
    double dephasing = 0.0;
    double cavity_decay = 0.0;
    double hamiltonian = 0.0;

    [[nodiscard]] double sum() const { return pump + out + spontaneous + dephasing + cavity_decay + hamiltonian; }
    [[nodiscard]] double max_term() const;
    /// |sum| / max_term (0 when all terms vanish).
    [[nodiscard]] double relative_residual() const;
};

[[nodiscard]] ContinuityAudit continuity_audit(const DensityOperator& rho, const Liouvillian& liouvillian);

struct IntegrationOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    double initial_step = 1e-2;
    double min_step = 1e-14;
};

/// Adaptive Dormand-Prince 5(4) integration of d rho / dt = L rho.
/// Throws std::runtime_error if the step size underflows.
[[nodiscard]] DensityOperator time_integrate(const Liouvillian& liouvillian, const DensityOperator& rho0, double t,
                                             const IntegrationOptions& options = {});

}  // namespace excitrans
