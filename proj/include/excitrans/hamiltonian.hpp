// hamiltonian.hpp - single-excitation Hamiltonian of the cavity-embedded chain.
//
// Basis: |0> .. |sites-1> (one excitation on a site), then |c> (one photon).
// All couplings in the supported models are real, so the operator is stored
// as a real symmetric sparse matrix.

#pragma once

#include "excitrans/chain.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

namespace excitrans {

using SparseReal = Eigen::SparseMatrix<double>;

class HamiltonianMatrix {
public:
    HamiltonianMatrix() = default;
    HamiltonianMatrix(SparseReal matrix, int sites);

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
    [[nodiscard]] int sites() const noexcept { return sites_; }
    [[nodiscard]] int cavity_index() const noexcept { return sites_; }

    [[nodiscard]] const SparseReal& sparse() const noexcept { return matrix_; }
    [[nodiscard]] Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix_); }
    [[nodiscard]] double operator()(int row, int col) const { return matrix_.coeff(row, col); }

    /// max |H - H^T| over all entries.
    [[nodiscard]] double hermiticity_defect() const;
    /// Enclosure [lo, hi] of the spectrum: Gershgorin discs of the matrix without
    /// the photon coupling, widened by the coupling norm sqrt(sum g_i^2).
    [[nodiscard]] std::pair<double, double> spectral_bounds() const;

private:
    SparseReal matrix_;
    int sites_ = 0;
};

/// omega on the leads, omega0 on the N cavity-coupled sites.
[[nodiscard]] std::vector<double> build_site_energies(const ChainSpec& spec);

/// Build H0 + Hcav (or the long-range / all-to-all variants) on the
/// single-excitation sector. Throws std::invalid_argument for an invalid spec
/// or a disorder kind the hopping model does not support.
[[nodiscard]] HamiltonianMatrix build_hamiltonian(const ChainSpec& spec);

/// Same as build_hamiltonian but with explicitly supplied bond tunnelings
/// (nearest-neighbour-based models) or positions (dipolar model).
[[nodiscard]] HamiltonianMatrix build_hamiltonian(const ChainSpec& spec, const std::vector<double>& bonds,
                                                  const std::vector<double>& positions);

/// The (N+1)-dimensional block of the N cavity-coupled sites and the photon,
/// i.e. the Hamiltonian of the central region without leads.
[[nodiscard]] Eigen::MatrixXd cavity_block(const ChainSpec& spec);

/// Ascending eigenvalues of a symmetric matrix.
[[nodiscard]] Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& matrix);

}  // namespace excitrans
