#include "excitrans/hamiltonian.hpp"

#include "excitrans/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace excitrans {

HamiltonianMatrix::HamiltonianMatrix(SparseReal matrix, int sites) : matrix_(std::move(matrix)), sites_(sites) {
    if (matrix_.rows() != matrix_.cols()) {
        throw std::invalid_argument("HamiltonianMatrix: matrix must be square");
    }
    if (matrix_.rows() != sites_ + 1) {
        throw std::invalid_argument("HamiltonianMatrix: dimension must be sites + 1");
    }
    matrix_.makeCompressed();
}

double HamiltonianMatrix::hermiticity_defect() const {
    const SparseReal transpose = matrix_.transpose();
    const SparseReal diff = matrix_ - transpose;
    double worst = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k) {
        for (SparseReal::InnerIterator it(diff, k); it; ++it) {
            worst = std::max(worst, std::abs(it.value()));
        }
    }
    return worst;
}

std::pair<double, double> HamiltonianMatrix::spectral_bounds() const {
    // H = A + B with B the site-photon coupling, a rank-two block with
    // eigenvalues +-||g||. Gershgorin on A plus Weyl's inequality for B.
    const int c = cavity_index();
    Eigen::VectorXd centre = Eigen::VectorXd::Zero(dim());
    Eigen::VectorXd radius = Eigen::VectorXd::Zero(dim());
    double coupling_sq = 0.0;
    for (int k = 0; k < matrix_.outerSize(); ++k) {
        for (SparseReal::InnerIterator it(matrix_, k); it; ++it) {
            const auto r = static_cast<int>(it.row());
            const auto col = static_cast<int>(it.col());
            if (r == col) {
                centre(r) += it.value();
            } else if (r == c || col == c) {
                if (r == c) coupling_sq += it.value() * it.value();
            } else {
                radius(r) += std::abs(it.value());
            }
        }
    }
    const double coupling = std::sqrt(coupling_sq);
    return {(centre - radius).minCoeff() - coupling, (centre + radius).maxCoeff() + coupling};
}

std::vector<double> build_site_energies(const ChainSpec& spec) {
    spec.validate();
    std::vector<double> energies(static_cast<std::size_t>(spec.total_sites()), spec.omega);
    for (int i = spec.first_cavity_site(); i <= spec.last_cavity_site(); ++i) {
        energies[static_cast<std::size_t>(i)] = spec.omega0;
    }
    return energies;
}

namespace {

using Triplet = Eigen::Triplet<double>;

void add_symmetric(std::vector<Triplet>& entries, int i, int j, double value) {
    entries.emplace_back(i, j, value);
    if (i != j) {
        entries.emplace_back(j, i, value);
    }
}

void add_cavity_coupling(std::vector<Triplet>& entries, const ChainSpec& spec) {
    const int c = spec.cavity_index();
    for (int k = 0; k < spec.N; ++k) {
        const double gk = spec.coupling(k);
        if (gk != 0.0) {
            add_symmetric(entries, spec.M + k, c, gk);
        }
    }
}

void add_collective_block(std::vector<Triplet>& entries, const ChainSpec& spec, double strength) {
    for (int i = spec.first_cavity_site(); i <= spec.last_cavity_site(); ++i) {
        for (int j = spec.first_cavity_site(); j <= spec.last_cavity_site(); ++j) {
            entries.emplace_back(i, j, strength);
        }
    }
}

}  // namespace

HamiltonianMatrix build_hamiltonian(const ChainSpec& spec, const std::vector<double>& bonds,
                                    const std::vector<double>& positions) {
    spec.validate();
    const int sites = spec.total_sites();
    const int dim = spec.sector_dim();

    std::vector<Triplet> entries;
    const auto energies = build_site_energies(spec);
    for (int i = 0; i < sites; ++i) {
        entries.emplace_back(i, i, energies[static_cast<std::size_t>(i)]);
    }
    entries.emplace_back(spec.cavity_index(), spec.cavity_index(), spec.cavity_energy());

    if (const auto* dipolar = std::get_if<DipolarLongRange>(&spec.hopping)) {
        if (std::holds_alternative<TunnelingGaussian>(spec.disorder.kind)) {
            throw std::invalid_argument("build_hamiltonian: dipolar hopping takes positional disorder, not tunneling disorder");
        }
        if (static_cast<int>(positions.size()) != sites) {
            throw std::invalid_argument("build_hamiltonian: expected " + std::to_string(sites) + " positions");
        }
        const double boundary_scale = spec.Jprime / spec.J;
        for (int i = 0; i < sites; ++i) {
            const int last = dipolar->nearest_only ? std::min(i + 1, sites - 1) : sites - 1;
            for (int j = i + 1; j <= last; ++j) {
                const double r = std::abs(positions[static_cast<std::size_t>(j)] - positions[static_cast<std::size_t>(i)]);
                double value = dipolar->Jbar / (r * r * r);
                const bool entrance = spec.M > 0 && i == spec.M - 1 && j == spec.M;
                const bool exit = spec.M > 0 && i == spec.M + spec.N - 1 && j == spec.M + spec.N;
                if (entrance || exit) {
                    value *= boundary_scale;
                }
                add_symmetric(entries, i, j, value);
            }
        }
        add_cavity_coupling(entries, spec);
    } else {
        if (std::holds_alternative<Positional>(spec.disorder.kind)) {
            throw std::invalid_argument("build_hamiltonian: positional disorder requires the dipolar hopping model");
        }
        if (static_cast<int>(bonds.size()) != std::max(sites - 1, 0)) {
            throw std::invalid_argument("build_hamiltonian: expected " + std::to_string(sites - 1) + " bonds");
        }
        for (int b = 0; b + 1 < sites; ++b) {
            add_symmetric(entries, b, b + 1, -bonds[static_cast<std::size_t>(b)]);
        }
        if (spec.boundary == Boundary::Periodic) {
            add_symmetric(entries, sites - 1, 0, -spec.inner_hopping());
        }

        if (const auto* a2a = std::get_if<AllToAll>(&spec.hopping)) {
            if (spec.g != 0.0 || !spec.g_per_site.empty()) {
                throw std::invalid_argument("build_hamiltonian: all-to-all hopping replaces the cavity; set g = 0");
            }
            add_collective_block(entries, spec, a2a->Jinf);
        } else if (const auto* eff = std::get_if<EffectiveCavity>(&spec.hopping)) {
            if (spec.g != 0.0 || !spec.g_per_site.empty()) {
                throw std::invalid_argument("build_hamiltonian: effective cavity replaces the cavity mode; set g = 0");
            }
            add_collective_block(entries, spec, 2.0 * eff->g * eff->g / eff->kappa);
        } else {
            add_cavity_coupling(entries, spec);
        }
    }

    SparseReal matrix(dim, dim);
    matrix.setFromTriplets(entries.begin(), entries.end());
    return HamiltonianMatrix(std::move(matrix), sites);
}

HamiltonianMatrix build_hamiltonian(const ChainSpec& spec) {
    spec.validate();
    if (std::holds_alternative<DipolarLongRange>(spec.hopping)) {
        return build_hamiltonian(spec, {}, sample_positions(spec));
    }
    return build_hamiltonian(spec, sample_tunnelings(spec), {});
}

Eigen::MatrixXd cavity_block(const ChainSpec& spec) {
    ChainSpec central = spec;
    central.M = 0;
    central.omega = central.omega0;
    return build_hamiltonian(central).dense();
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& matrix) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("symmetric_eigenvalues: eigen decomposition failed");
    }
    return solver.eigenvalues();
}

}  // namespace excitrans
