#include "excitrans/open_system.hpp"

#include <boost/numeric/odeint.hpp>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <algorithm>
#include <optional>
#include <cmath>
#include <string>

namespace excitrans {

void DissipationRates::validate() const {
    const auto check = [](double value, const char* name) {
        if (!(value >= 0.0)) {
            throw std::invalid_argument(std::string("DissipationRates: ") + name + " must be >= 0");
        }
    };
    check(kappa, "kappa");
    check(gamma_sp, "gamma_sp");
    check(gamma_deph, "gamma_deph");
    check(gamma_P, "gamma_P");
    check(gamma_out, "gamma_out");
}

// DensityOperator -------------------------------------------------------------------

DensityOperator::DensityOperator(Eigen::MatrixXcd rho) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols()) {
        throw std::invalid_argument("DensityOperator: matrix must be square");
    }
}

DensityOperator DensityOperator::vacuum(int dim) { return basis_state(dim, 0); }

DensityOperator DensityOperator::basis_state(int dim, int index) {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    rho(index, index) = 1.0;
    return DensityOperator(std::move(rho));
}

DensityOperator DensityOperator::pure(const Eigen::VectorXcd& psi) {
    return DensityOperator(psi * psi.adjoint() / psi.squaredNorm());
}

double DensityOperator::purity() const { return (rho_ * rho_).trace().real(); }

double DensityOperator::hermiticity_defect() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }

double DensityOperator::min_eigenvalue() const {
    const Eigen::MatrixXcd herm = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double trace_distance(const DensityOperator& a, const DensityOperator& b) {
    const Eigen::MatrixXcd diff = a.matrix() - b.matrix();
    const Eigen::MatrixXcd herm = 0.5 * (diff + diff.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

// Liouvillian ----------------------------------------------------------------------

Liouvillian::Liouvillian(const HamiltonianMatrix& hamiltonian, const DissipationRates& rates)
    : dim_(hamiltonian.sites() + 2), rates_(rates) {
    rates_.validate();
    if (hamiltonian.hermiticity_defect() > 1e-12) {
        throw std::invalid_argument("Liouvillian: Hamiltonian is not Hermitian");
    }
    const int sites = hamiltonian.sites();
    const int D = dim_;

    // Embed the single-excitation block; the vacuum has energy zero.
    hamiltonian_ = Eigen::MatrixXcd::Zero(D, D);
    hamiltonian_.bottomRightCorner(D - 1, D - 1) = hamiltonian.dense().cast<cplx>();

    if (rates_.kappa > 0.0) jumps_.push_back({"kappa", vacuum_index(), cavity_index(), rates_.kappa});
    for (int i = 0; i < sites; ++i) {
        if (rates_.gamma_sp > 0.0) jumps_.push_back({"sp_em", vacuum_index(), site_index(i), rates_.gamma_sp});
    }
    for (int i = 0; i < sites; ++i) {
        if (rates_.gamma_deph > 0.0) jumps_.push_back({"deph", site_index(i), site_index(i), rates_.gamma_deph});
    }
    if (rates_.gamma_P > 0.0) jumps_.push_back({"pump", pump_index(), vacuum_index(), rates_.gamma_P});
    if (rates_.gamma_out > 0.0) jumps_.push_back({"out", vacuum_index(), drain_index(), rates_.gamma_out});

    std::vector<Eigen::Triplet<cplx>> entries;
    const SparseReal& h = hamiltonian.sparse();
    entries.reserve(static_cast<std::size_t>(2 * D * h.nonZeros() + 2 * D * jumps_.size() + jumps_.size()));
    const cplx minus_i(0.0, -1.0);
    for (int k = 0; k < h.outerSize(); ++k) {
        for (SparseReal::InnerIterator it(h, k); it; ++it) {
            // Manifold indices of H_{rc}.
            const int r = static_cast<int>(it.row()) + 1;
            const int c = static_cast<int>(it.col()) + 1;
            const cplx value = minus_i * it.value();
            for (int b = 0; b < D; ++b) {
                entries.emplace_back(vec_index(r, b), vec_index(c, b), value);  // -i (H rho)_{rb}
                entries.emplace_back(vec_index(b, c), vec_index(b, r), -value);  // +i (rho H)_{bc}
            }
        }
    }
    for (const JumpOperator& jump : jumps_) {
        const int s = jump.source;
        entries.emplace_back(vec_index(jump.target, jump.target), vec_index(s, s), jump.rate);
        for (int b = 0; b < D; ++b) {
            entries.emplace_back(vec_index(s, b), vec_index(s, b), -0.5 * jump.rate);
            entries.emplace_back(vec_index(b, s), vec_index(b, s), -0.5 * jump.rate);
        }
    }
    matrix_.resize(D * D, D * D);
    matrix_.setFromTriplets(entries.begin(), entries.end());
}

Eigen::MatrixXcd Liouvillian::apply(const Eigen::MatrixXcd& rho) const {
    if (rho.rows() != dim_ || rho.cols() != dim_) {
        throw std::invalid_argument("Liouvillian::apply: dimension mismatch");
    }
    const Eigen::Map<const Eigen::VectorXcd> vec(rho.data(), rho.size());
    Eigen::VectorXcd out = matrix_ * vec;
    return Eigen::Map<Eigen::MatrixXcd>(out.data(), dim_, dim_);
}

Liouvillian build_liouvillian(const HamiltonianMatrix& hamiltonian, const DissipationRates& rates) {
    return Liouvillian(hamiltonian, rates);
}

// Steady state ----------------------------------------------------------------------

namespace {

/// L with row `replaced` swapped for the trace functional.
SparseComplex bordered_system(const Liouvillian& L, int replaced) {
    const int D = L.dim();
    std::vector<Eigen::Triplet<cplx>> entries;
    entries.reserve(static_cast<std::size_t>(L.matrix().nonZeros() + D));
    const SparseComplex& m = L.matrix();
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseComplex::InnerIterator it(m, k); it; ++it) {
            if (it.row() != replaced) {
                entries.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
            }
        }
    }
    for (int a = 0; a < D; ++a) {
        entries.emplace_back(replaced, L.vec_index(a, a), 1.0);
    }
    SparseComplex out(D * D, D * D);
    out.setFromTriplets(entries.begin(), entries.end());
    out.makeCompressed();
    return out;
}

Eigen::VectorXcd solve_bordered(const Liouvillian& L, int replaced, bool direct, double tolerance) {
    const SparseComplex system = bordered_system(L, replaced);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(system.rows());
    rhs(replaced) = 1.0;
    if (direct) {
        Eigen::SparseLU<SparseComplex, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(system);
        lu.factorize(system);
        if (lu.info() != Eigen::Success) {
            throw SteadyStateError("steady_state: sparse LU failed (" + lu.lastErrorMessage() +
                                   "); the steady state is not unique");
        }
        return lu.solve(rhs);
    }
    Eigen::BiCGSTAB<SparseComplex, Eigen::IncompleteLUT<cplx>> solver;
    solver.preconditioner().setDroptol(1e-6);
    solver.preconditioner().setFillfactor(20);
    solver.setTolerance(std::min(1e-3 * tolerance, 1e-13));
    solver.setMaxIterations(20000);
    solver.compute(system);
    if (solver.info() != Eigen::Success) {
        throw SteadyStateError("steady_state: preconditioner setup failed");
    }
    Eigen::VectorXcd x = solver.solve(rhs);
    if (solver.info() != Eigen::Success) {
        throw SteadyStateError("steady_state: BiCGSTAB did not converge (estimated error " +
                               std::to_string(solver.error()) + ")");
    }
    return x;
}

bool photon_decoupled(const Liouvillian& L) {
    if (L.rates().kappa > 0.0) return false;
    const int c = L.cavity_index();
    for (int i = 0; i < L.dim(); ++i) {
        if (i != c && (L.hamiltonian()(i, c) != 0.0 || L.hamiltonian()(c, i) != 0.0)) return false;
    }
    return true;
}

DensityOperator finalize(const Liouvillian& L, const Eigen::VectorXcd& x, double tolerance) {
    if (!x.allFinite()) {
        throw SteadyStateError("steady_state: non-finite solution; the steady state is not unique");
    }
    const double residual = (L.matrix() * x).norm() / x.norm();
    if (!(residual < tolerance)) {
        throw SteadyStateError("steady_state: residual " + std::to_string(residual) +
                               " above tolerance; the steady state is not unique or the solve failed");
    }
    Eigen::MatrixXcd rho = Eigen::Map<const Eigen::MatrixXcd>(x.data(), L.dim(), L.dim());
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    return DensityOperator(std::move(rho));
}

}  // namespace

DensityOperator steady_state(const Liouvillian& liouvillian, const SteadyStateOptions& options) {
    bool direct = true;
    switch (options.solver) {
        case SteadyStateSolver::Direct: direct = true; break;
        case SteadyStateSolver::Iterative: direct = false; break;
        case SteadyStateSolver::Auto: direct = liouvillian.sites() <= options.direct_site_limit; break;
    }

    // A decoupled, lossless photon conserves its own population. Give it a unit
    // decay for the solve; the site dynamics are unchanged and the result is
    // the photon-free steady state, which is also a null vector of the original L.
    std::optional<Liouvillian> damped;
    if (photon_decoupled(liouvillian)) {
        const int D = liouvillian.dim();
        const Eigen::MatrixXd block = liouvillian.hamiltonian().bottomRightCorner(D - 1, D - 1).real();
        DissipationRates rates = liouvillian.rates();
        rates.kappa = 1.0;
        damped.emplace(HamiltonianMatrix(block.sparseView(), liouvillian.sites()), rates);
    }
    const Liouvillian& solved = damped ? *damped : liouvillian;

    auto solve = [&](int row) {
        if (direct) {
            return finalize(liouvillian, solve_bordered(solved, row, true, options.tolerance), options.tolerance);
        }
        try {
            return finalize(liouvillian, solve_bordered(solved, row, false, options.tolerance), options.tolerance);
        } catch (const SteadyStateError&) {
            if (options.solver != SteadyStateSolver::Auto) throw;
            return finalize(liouvillian, solve_bordered(solved, row, true, options.tolerance), options.tolerance);
        }
    };

    DensityOperator rho = solve(liouvillian.vec_index(0, 0));
    if (options.verify_unique) {
        const DensityOperator check = solve(liouvillian.vec_index(liouvillian.drain_index(), liouvillian.drain_index()));
        const double distance = trace_distance(rho, check);
        if (distance > 1e-8) {
            throw SteadyStateError("steady_state: bordered systems disagree (trace distance " +
                                   std::to_string(distance) + "); the steady state is not unique");
        }
    }
    return rho;
}

double current_out(const DensityOperator& rho, const DissipationRates& rates) {
    const int drain = rho.dim() - 2;
    return rates.gamma_out * rho.population(drain);
}

double ContinuityAudit::max_term() const {
    return std::max({std::abs(pump), std::abs(out), std::abs(spontaneous), std::abs(dephasing), std::abs(cavity_decay),
                     std::abs(hamiltonian)});
}

double ContinuityAudit::relative_residual() const {
    const double scale = max_term();
    return scale > 0.0 ? std::abs(sum()) / scale : 0.0;
}

ContinuityAudit continuity_audit(const DensityOperator& rho, const Liouvillian& liouvillian) {
    if (rho.dim() != liouvillian.dim()) {
        throw std::invalid_argument("continuity_audit: dimension mismatch");
    }
    const Eigen::MatrixXcd& r = rho.matrix();
    const int d = liouvillian.drain_index();
    ContinuityAudit audit;
    for (const JumpOperator& jump : liouvillian.jumps()) {
        // tr[n_d gamma (L rho L^dag - 1/2 {L^dag L, rho})] with L = |t><s|.
        double term = 0.0;
        if (jump.target == d) term += jump.rate * r(jump.source, jump.source).real();
        if (jump.source == d) term -= jump.rate * r(d, d).real();
        if (jump.channel == "pump") audit.pump += term;
        else if (jump.channel == "out") audit.out += term;
        else if (jump.channel == "sp_em") audit.spontaneous += term;
        else if (jump.channel == "deph") audit.dephasing += term;
        else if (jump.channel == "kappa") audit.cavity_decay += term;
    }
    // -i tr[n_d [H, rho]] = -i sum_c (H_dc rho_cd - rho_dc H_cd).
    const Eigen::MatrixXcd& h = liouvillian.hamiltonian();
    cplx commutator = 0.0;
    for (int c = 0; c < liouvillian.dim(); ++c) {
        commutator += h(d, c) * r(c, d) - r(d, c) * h(c, d);
    }
    audit.hamiltonian = (cplx(0.0, -1.0) * commutator).real();
    return audit;
}

// Time integration -----------------------------------------------------------------

DensityOperator time_integrate(const Liouvillian& liouvillian, const DensityOperator& rho0, double t,
                               const IntegrationOptions& options) {
    namespace odeint = boost::numeric::odeint;
    if (rho0.dim() != liouvillian.dim()) {
        throw std::invalid_argument("time_integrate: dimension mismatch");
    }
    if (t < 0.0) {
        throw std::invalid_argument("time_integrate: t must be >= 0");
    }
    using State = std::vector<cplx>;
    const Eigen::MatrixXcd& m0 = rho0.matrix();
    State state(m0.data(), m0.data() + m0.size());
    if (t == 0.0) {
        return rho0;
    }
    const SparseComplex& L = liouvillian.matrix();
    auto rhs = [&L](const State& x, State& dxdt, double /*t*/) {
        const Eigen::Map<const Eigen::VectorXcd> in(x.data(), static_cast<Eigen::Index>(x.size()));
        Eigen::Map<Eigen::VectorXcd> out(dxdt.data(), static_cast<Eigen::Index>(dxdt.size()));
        out.noalias() = L * in;
    };

    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(options.abs_tol, options.rel_tol);
    double now = 0.0;
    double dt = std::min(options.initial_step, t);
    while (now < t) {
        if (now + dt > t) dt = t - now;
        const auto result = stepper.try_step(rhs, state, now, dt);
        if (result == odeint::fail && dt < options.min_step) {
            throw std::runtime_error("time_integrate: step size underflow at t = " + std::to_string(now));
        }
    }
    Eigen::MatrixXcd rho = Eigen::Map<const Eigen::MatrixXcd>(state.data(), liouvillian.dim(), liouvillian.dim());
    return DensityOperator(std::move(rho));
}

}  // namespace excitrans
