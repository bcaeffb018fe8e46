#pragma once

/**
 * @file coupled_solver.hpp
 * @brief Monolithic Newton solver for bulk diffusion coupled to a 1D network.
 *
 * Unknowns are x = [u_b (bulk cells), u_e (segment cells)]. Residuals:
 *
 *   bulk cell K:     Σ_faces F_K − Σ_i w_iK q_i L_i
 *   segment cell i:  Σ axial outflux_i + q_i L_i
 *
 * where q_i comes from the interface reconstruction with u_{b,δ} taken from
 * the host cells of segment cell i. Axial fluxes eliminate network nodes:
 * a junction value is the transmissibility-weighted mean of its cells, a
 * Dirichlet node contributes t_i(u_i − u_D), a free end contributes nothing.
 *
 * With prescribed network values the u_e block is dropped and u_e is fixed.
 */

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <optional>
#include <string>
#include <vector>

#include "mdtube/bulk_grid.hpp"
#include "mdtube/diffusion_law.hpp"
#include "mdtube/network.hpp"
#include "mdtube/reconstruction.hpp"

namespace mdtube {

/// Auto picks SparseLU up to kDirectSolverLimit unknowns and BiCGSTAB/ILUT above.
enum class LinearSolverKind { Auto, SparseLU, BiCGSTAB };

inline constexpr int kDirectSolverLimit = 20000;

struct NewtonControls {
    double abs_tol = 0.0;    ///< on the row-scaled residual; 0 selects 1e-10 * value scale
    double rel_tol = 1e-8;   ///< relative reduction of the row-scaled residual
    int max_iterations = 50;
    int max_halvings = 10;
    /// Extra iterations after convergence while the residual still drops by 2x.
    int polish_iterations = 3;
    LinearSolverKind linear_solver = LinearSolverKind::Auto;
    /// For harmonic face averaging, start from the solution of the same system
    /// with Kirchhoff averaging (falls back to x0 if that solve fails).
    bool kirchhoff_presolve = true;
    bool verbose = false;
};

struct NewtonRecord {
    int iteration = 0;
    double residual_inf = 0.0;   ///< row-scaled
    double residual_raw = 0.0;   ///< unscaled
    double step_inf = 0.0;
    double damping = 1.0;
};

struct CoupledState {
    Eigen::VectorXd u_b;
    Eigen::VectorXd u_e;
    std::vector<ReconstructionResult> interface;  ///< per segment cell
    std::vector<NewtonRecord> history;
    int iterations = 0;
    int presolve_iterations = 0;
    bool converged = false;
    int uniqueness_warnings = 0;
};

struct CoupledOptions {
    FaceAveraging averaging = FaceAveraging::Kirchhoff;
    bool prescribed_network = false;
    std::vector<double> prescribed_u_e;  ///< per segment cell when prescribed_network
};

class CoupledSystem {
public:
    CoupledSystem(const BulkGrid& grid, const NetworkMesh& mesh, const CouplingMap& coupling,
                  DiffusionLaw law, CoupledOptions options = {});

    int num_bulk() const { return grid_->num_cells(); }
    int num_network() const { return options_.prescribed_network ? 0 : mesh_->num_cells(); }
    int num_unknowns() const { return num_bulk() + num_network(); }

    const BulkGrid& grid() const { return *grid_; }
    const NetworkMesh& mesh() const { return *mesh_; }
    const CouplingMap& coupling() const { return *coupling_; }
    const DiffusionLaw& law() const { return law_; }
    const CoupledOptions& options() const { return options_; }

    Eigen::VectorXd pack(const Eigen::VectorXd& u_b, const Eigen::VectorXd& u_e) const;
    Eigen::VectorXd bulk_part(const Eigen::VectorXd& x) const { return x.head(num_bulk()); }
    Eigen::VectorXd network_part(const Eigen::VectorXd& x) const;

    /// Residual and (optionally) Jacobian. Reconstruction results are returned
    /// through `interface` when non-null.
    void evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& residual,
                  Eigen::SparseMatrix<double>* jacobian,
                  std::vector<ReconstructionResult>* interface = nullptr) const;

    /// Initial guess: bulk filled with `bulk_value`, network with `network_value`
    /// (or the prescribed values).
    Eigen::VectorXd initial_guess(double bulk_value, double network_value) const;

    CoupledState solve(const Eigen::VectorXd& x0, const NewtonControls& controls = {}) const;
    /// Plain damped Newton from x0, no pre-solve.
    CoupledState newton(const Eigen::VectorXd& x0, const NewtonControls& controls) const;

    // Balance quantities of a state.
    /// Σ_i q_i L_i over all segment cells.
    double total_source(const CoupledState& s) const;
    /// Σ_i Σ_K w_iK q_i L_i: source mass actually deposited in the bulk.
    double deposited_source(const CoupledState& s) const;
    /// Net outflow across bulk Dirichlet faces.
    double bulk_boundary_outflow(const CoupledState& s) const;
    /// Net inflow into the network through Dirichlet nodes (same sign as total_source).
    double network_boundary_inflow(const CoupledState& s) const;

private:
    void build_axial_operator();

    const BulkGrid* grid_;
    const NetworkMesh* mesh_;
    const CouplingMap* coupling_;
    DiffusionLaw law_;
    CoupledOptions options_;
    Eigen::SparseMatrix<double> axial_;  ///< network axial operator A (outflux = A u_e − b)
    Eigen::VectorXd axial_rhs_;
};

/// Solves the linear system J dx = r. Rows are equilibrated before factorizing;
/// a failed iterative solve falls back to SparseLU.
Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& jacobian, const Eigen::VectorXd& rhs,
                             LinearSolverKind kind);

/// Writes "iteration,residual_inf,residual_raw,step_inf,damping".
void write_history_csv(const std::vector<NewtonRecord>& history, const std::string& path);

}  // namespace mdtube
