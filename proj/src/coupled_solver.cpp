#include "mdtube/coupled_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include "mdtube/errors.hpp"

namespace mdtube {

CoupledSystem::CoupledSystem(const BulkGrid& grid, const NetworkMesh& mesh, const CouplingMap& coupling,
                             DiffusionLaw law, CoupledOptions options)
    : grid_(&grid), mesh_(&mesh), coupling_(&coupling), law_(std::move(law)), options_(std::move(options)) {
    if (static_cast<int>(coupling.cells.size()) != mesh.num_cells())
        throw ConfigError("coupling map does not match the network mesh");
    if (options_.prescribed_network &&
        static_cast<int>(options_.prescribed_u_e.size()) != mesh.num_cells())
        throw ConfigError("prescribed network values: one value per segment cell required");
    build_axial_operator();
}

void CoupledSystem::build_axial_operator() {
    const int ne = mesh_->num_cells();
    axial_rhs_ = Eigen::VectorXd::Zero(ne);
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<double> t(ne);
    for (int i = 0; i < ne; ++i) t[i] = mesh_->cells[i].d_e / (0.5 * mesh_->cells[i].length());
    for (int n = 0; n < mesh_->num_nodes(); ++n) {
        const auto& cells = mesh_->node_cells[n];
        const auto& bc = mesh_->node_bc[n];
        if (bc.dirichlet) {
            for (int i : cells) {
                trip.emplace_back(i, i, t[i]);
                axial_rhs_[i] += t[i] * bc.value;
            }
            continue;
        }
        if (cells.size() < 2) continue;
        double total = 0.0;
        for (int i : cells) total += t[i];
        if (total <= 0.0) continue;
        for (int i : cells) {
            trip.emplace_back(i, i, t[i]);
            for (int j : cells) trip.emplace_back(i, j, -t[i] * t[j] / total);
        }
    }
    axial_.resize(ne, ne);
    axial_.setFromTriplets(trip.begin(), trip.end());
}

Eigen::VectorXd CoupledSystem::pack(const Eigen::VectorXd& u_b, const Eigen::VectorXd& u_e) const {
    Eigen::VectorXd x(num_unknowns());
    x.head(num_bulk()) = u_b;
    if (num_network() > 0) x.tail(num_network()) = u_e;
    return x;
}

Eigen::VectorXd CoupledSystem::network_part(const Eigen::VectorXd& x) const {
    if (options_.prescribed_network)
        return Eigen::Map<const Eigen::VectorXd>(options_.prescribed_u_e.data(), mesh_->num_cells());
    return x.tail(num_network());
}

Eigen::VectorXd CoupledSystem::initial_guess(double bulk_value, double network_value) const {
    return pack(Eigen::VectorXd::Constant(num_bulk(), bulk_value),
                Eigen::VectorXd::Constant(mesh_->num_cells(), network_value));
}

void CoupledSystem::evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& residual,
                             Eigen::SparseMatrix<double>* jacobian,
                             std::vector<ReconstructionResult>* interface) const {
    const int nb = num_bulk(), n = num_unknowns();
    const bool prescribed = options_.prescribed_network;
    residual.setZero(n);
    std::vector<Eigen::Triplet<double>> trip;
    const Eigen::VectorXd u_b = x.head(nb);
    const Eigen::VectorXd u_e = network_part(x);
    assemble_flux_jacobian(*grid_, law_, u_b, options_.averaging, residual.head(nb), trip, 0);

    if (interface) interface->resize(mesh_->num_cells());
    for (int i = 0; i < mesh_->num_cells(); ++i) {
        const auto& cell = mesh_->cells[i];
        const auto& cp = coupling_->cells[i];
        double u_delta = 0.0;
        for (const auto& [h, a] : cp.hosts) u_delta += a * u_b[h];
        const auto rec = reconstruct_interface(
            {u_delta, u_e[i], cell.radius, cell.rho, cp.delta, cell.gamma}, law_);
        const double len = cell.length();
        for (const auto& [k, w] : cp.weights) {
            residual[k] -= w * rec.q * len;
            for (const auto& [h, a] : cp.hosts) trip.emplace_back(k, h, -w * a * len * rec.dq_du_b);
            if (!prescribed) trip.emplace_back(k, nb + i, -w * len * rec.dq_du_e);
        }
        if (!prescribed) {
            residual[nb + i] += rec.q * len;
            for (const auto& [h, a] : cp.hosts) trip.emplace_back(nb + i, h, a * len * rec.dq_du_b);
            trip.emplace_back(nb + i, nb + i, len * rec.dq_du_e);
        }
        if (interface) (*interface)[i] = rec;
    }
    if (!prescribed) {
        residual.tail(num_network()) += axial_ * u_e - axial_rhs_;
        for (int c = 0; c < axial_.outerSize(); ++c)
            for (Eigen::SparseMatrix<double>::InnerIterator it(axial_, c); it; ++it)
                trip.emplace_back(nb + it.row(), nb + it.col(), it.value());
    }
    if (jacobian) {
        jacobian->resize(n, n);
        jacobian->setFromTriplets(trip.begin(), trip.end());
    }
}

Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& jacobian, const Eigen::VectorXd& rhs,
                             LinearSolverKind kind) {
    const int n = static_cast<int>(jacobian.rows());
    Eigen::VectorXd row_max = Eigen::VectorXd::Zero(n);
    for (int c = 0; c < jacobian.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(jacobian, c); it; ++it)
            row_max[it.row()] = std::max(row_max[it.row()], std::abs(it.value()));
    for (int r = 0; r < n; ++r)
        if (row_max[r] == 0.0) throw NumericError("singular Jacobian: empty row " + std::to_string(r));
    const Eigen::VectorXd scale = row_max.cwiseInverse();
    Eigen::SparseMatrix<double> a = scale.asDiagonal() * jacobian;
    a.makeCompressed();
    const Eigen::VectorXd b = scale.cwiseProduct(rhs);

    if (kind == LinearSolverKind::Auto)
        kind = n > kDirectSolverLimit ? LinearSolverKind::BiCGSTAB : LinearSolverKind::SparseLU;
    if (kind == LinearSolverKind::BiCGSTAB) {
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
        it.preconditioner().setDroptol(1e-6);
        it.preconditioner().setFillfactor(20);
        it.setTolerance(1e-12);
        it.setMaxIterations(2000);
        it.compute(a);
        if (it.info() == Eigen::Success) {
            Eigen::VectorXd x = it.solve(b);
            if (it.info() == Eigen::Success) return x;
        }
        // fall back to the direct solver below
    }
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw NumericError("sparse LU factorization failed: " + lu.lastErrorMessage());
    Eigen::VectorXd x = lu.solve(b);
    if (lu.info() != Eigen::Success) throw NumericError("sparse LU solve failed");
    return x;
}

CoupledState CoupledSystem::solve(const Eigen::VectorXd& x0, const NewtonControls& controls) const {
    if (options_.averaging != FaceAveraging::Harmonic || !controls.kirchhoff_presolve)
        return newton(x0, controls);
    CoupledOptions pre_options = options_;
    pre_options.averaging = FaceAveraging::Kirchhoff;
    const CoupledSystem pre(*grid_, *mesh_, *coupling_, law_, pre_options);
    Eigen::VectorXd start = x0;
    int pre_iterations = 0;
    try {
        NewtonControls pre_controls = controls;
        pre_controls.rel_tol = std::max(controls.rel_tol, 1e-6);
        pre_controls.polish_iterations = 0;
        const CoupledState s = pre.newton(x0, pre_controls);
        start = pack(s.u_b, s.u_e);
        pre_iterations = s.iterations;
    } catch (const Error&) {
        if (controls.verbose) std::cerr << "Kirchhoff pre-solve failed, starting from x0\n";
    }
    CoupledState state = newton(start, controls);
    state.presolve_iterations = pre_iterations;
    return state;
}

CoupledState CoupledSystem::newton(const Eigen::VectorXd& x0, const NewtonControls& controls) const {
    const int n = num_unknowns();
    if (x0.size() != n) throw ConfigError("initial guess has the wrong size");
    Eigen::VectorXd x = x0, r, r_trial;
    Eigen::SparseMatrix<double> jac;
    evaluate(x, r, &jac);

    // Rows are measured in units of the unknown through the initial Jacobian diagonal.
    Eigen::VectorXd row_scale(n);
    {
        Eigen::VectorXd diag = jac.diagonal().cwiseAbs();
        Eigen::VectorXd row_max = Eigen::VectorXd::Zero(n);
        for (int c = 0; c < jac.outerSize(); ++c)
            for (Eigen::SparseMatrix<double>::InnerIterator it(jac, c); it; ++it)
                row_max[it.row()] = std::max(row_max[it.row()], std::abs(it.value()));
        for (int i = 0; i < n; ++i) {
            const double d = diag[i] > 0.0 ? diag[i] : row_max[i];
            row_scale[i] = d > 0.0 ? 1.0 / d : 1.0;
        }
    }
    auto norm_scaled = [&](const Eigen::VectorXd& v) { return v.cwiseProduct(row_scale).lpNorm<Eigen::Infinity>(); };

    double value_scale = std::max(1.0, x0.lpNorm<Eigen::Infinity>());
    if (options_.prescribed_network)
        for (double v : options_.prescribed_u_e) value_scale = std::max(value_scale, std::abs(v));
    const double abs_tol = controls.abs_tol > 0.0 ? controls.abs_tol : 1e-10 * value_scale;

    CoupledState state;
    double res = norm_scaled(r);
    const double tol = std::max(abs_tol, controls.rel_tol * res);
    state.history.push_back({0, res, r.lpNorm<Eigen::Infinity>(), 0.0, 1.0});
    if (controls.verbose) std::cerr << "newton 0: |R| = " << res << '\n';

    bool converged = res <= tol;
    int polish = 0;
    int it = 0;
    while (true) {
        if (converged && polish >= controls.polish_iterations) break;
        if (!converged && it >= controls.max_iterations) {
            std::vector<double> hist;
            for (const auto& h : state.history) hist.push_back(h.residual_inf);
            throw ConvergenceError("Newton did not converge in " + std::to_string(controls.max_iterations) +
                                       " iterations (|R| = " + std::to_string(res) + ")",
                                   hist);
        }
        ++it;
        const Eigen::VectorXd dx = solve_linear(jac, -r, controls.linear_solver);

        double alpha = 1.0;
        double res_trial = std::numeric_limits<double>::infinity();
        bool accepted = false;
        Eigen::VectorXd x_trial;
        const int halvings = converged ? 0 : controls.max_halvings;
        for (int h = 0; h <= halvings; ++h) {
            x_trial = x + alpha * dx;
            try {
                evaluate(x_trial, r_trial, nullptr);
                res_trial = r_trial.allFinite() ? norm_scaled(r_trial) : std::numeric_limits<double>::infinity();
            } catch (const Error&) {
                res_trial = std::numeric_limits<double>::infinity();
            }
            if (res_trial < (1.0 - 1e-4 * alpha) * res) {
                accepted = true;
                break;
            }
            if (h < halvings) alpha *= 0.5;
        }
        if (converged) {
            // polishing: keep only clear improvements
            if (!accepted || res_trial > 0.5 * res) break;
            ++polish;
        } else if (!accepted) {
            if (!std::isfinite(res_trial)) {
                std::vector<double> hist;
                for (const auto& h : state.history) hist.push_back(h.residual_inf);
                throw ConvergenceError("Newton line search failed to find a finite residual", hist);
            }
        }
        x = x_trial;
        evaluate(x, r, &jac);
        res = norm_scaled(r);
        state.history.push_back({it, res, r.lpNorm<Eigen::Infinity>(),
                                 alpha * dx.lpNorm<Eigen::Infinity>(), alpha});
        if (controls.verbose)
            std::cerr << "newton " << it << ": |R| = " << res << " alpha = " << alpha << '\n';
        if (!converged && res <= tol) converged = true;
    }

    state.converged = true;
    state.iterations = it;
    state.u_b = x.head(num_bulk());
    state.u_e = network_part(x);
    evaluate(x, r, nullptr, &state.interface);
    for (const auto& rec : state.interface) state.uniqueness_warnings += rec.uniqueness_warning ? 1 : 0;
    return state;
}

double CoupledSystem::total_source(const CoupledState& s) const {
    double sum = 0.0;
    for (int i = 0; i < mesh_->num_cells(); ++i) sum += s.interface[i].q * mesh_->cells[i].length();
    return sum;
}

double CoupledSystem::deposited_source(const CoupledState& s) const {
    double sum = 0.0;
    for (int i = 0; i < mesh_->num_cells(); ++i) {
        double w = 0.0;
        for (const auto& [c, wk] : coupling_->cells[i].weights) w += wk;
        sum += w * s.interface[i].q * mesh_->cells[i].length();
    }
    return sum;
}

double CoupledSystem::bulk_boundary_outflow(const CoupledState& s) const {
    return boundary_outflow(*grid_, law_, s.u_b, options_.averaging);
}

double CoupledSystem::network_boundary_inflow(const CoupledState& s) const {
    double sum = 0.0;
    for (int nd = 0; nd < mesh_->num_nodes(); ++nd) {
        const auto& bc = mesh_->node_bc[nd];
        if (!bc.dirichlet) continue;
        for (int i : mesh_->node_cells[nd]) {
            const double t = mesh_->cells[i].d_e / (0.5 * mesh_->cells[i].length());
            sum -= t * (s.u_e[i] - bc.value);
        }
    }
    return sum;
}

void write_history_csv(const std::vector<NewtonRecord>& history, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out.precision(12);
    out << "iteration,residual_inf,residual_raw,step_inf,damping\n";
    for (const auto& h : history)
        out << h.iteration << ',' << h.residual_inf << ',' << h.residual_raw << ',' << h.step_inf << ','
            << h.damping << '\n';
}

}  // namespace mdtube
