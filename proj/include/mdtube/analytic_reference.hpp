#pragma once

// Reference solutions in the cross-sectional plane.
//
// Single tube: the radially symmetric solution of the regularized problem
// around an infinite straight tube.
//
// Multiple parallel tubes: ψ(x) = Σ_j −q_j f_j(x) + C_ψ with interface values
// fixed by perimeter averages. Variant U averages T⁻¹(ψ) over the perimeter
// points; variant UTilde applies T⁻¹ to the averaged ψ. Perimeter residuals
// use the line-source field (f_j with ρ_j = R_j), so the sources do not depend
// on the kernel radii; fields evaluated for error norms use the regularized f_j.

#include <string>
#include <vector>

#include "mdtube/diffusion_law.hpp"

namespace mdtube {

struct SingleTubeParams {
    double radius = 0.01;
    double rho = 0.05;
    double u_hat = 0.5;
    double u_e = 0.1;
    double gamma = 1.0;
};

class SingleTubeSolution {
public:
    SingleTubeSolution(const SingleTubeParams& params, DiffusionLaw law);

    const SingleTubeParams& params() const { return p_; }
    /// Source per unit length, −|P|γ(û − u_e).
    double q() const { return q_; }
    double psi_interface() const { return psi_hat_; }
    double psi(double r) const;
    double u(double r) const;

private:
    SingleTubeParams p_;
    DiffusionLaw law_;
    double q_ = 0.0;
    double psi_hat_ = 0.0;
};

struct TubeSpec {
    double x = 0.0;
    double y = 0.0;
    double radius = 0.0;
    double rho = 0.0;
    double gamma = 1.0;
    double u_e = 0.0;
};

enum class ReferenceVariant { U, UTilde };

std::string to_string(ReferenceVariant v);

struct MultiTubeOptions {
    int k_ip = 64;
    double tolerance = 1e-12;
    int max_iterations = 100;
    int max_halvings = 10;
    double fd_step = 1e-7;
};

struct MultiTubeSolution {
    std::vector<TubeSpec> tubes;
    std::vector<double> u_hat;
    std::vector<double> q;
    double c_psi = 0.0;
    ReferenceVariant variant = ReferenceVariant::U;
    DiffusionLaw law = DiffusionLaw::constant(1.0);
    int iterations = 0;
    std::vector<double> residual_history;

    /// Regularized transformed field.
    double psi(double x, double y) const;
    double u(double x, double y) const { return law.inverse_transform(psi(x, y)); }
    /// Line-source field (f_j with ρ_j = R_j).
    double psi_line_source(double x, double y) const;

    /// Perimeter residuals of the solved variant with k_ip points per tube.
    std::vector<double> residuals(int k_ip) const;

    /// {"variant", "c_psi", "tubes":[{x,y,R,rho,gamma,u_e,u_hat,q}], "iterations"}
    std::string to_json() const;
};

/// Solves for C_ψ and all interface values with û[anchor] = anchor_value fixed.
/// Throws DomainError for overlapping tubes and ConvergenceError on failure.
MultiTubeSolution solve_multi_tube(const std::vector<TubeSpec>& tubes, const DiffusionLaw& law,
                                   int anchor, double anchor_value, ReferenceVariant variant,
                                   const MultiTubeOptions& options = {});

/// Interface value giving tube `index` the source q_target: u_e − q/(|P|γ).
double anchor_for_source(const TubeSpec& tube, double q_target);

}  // namespace mdtube
