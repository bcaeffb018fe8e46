#pragma once

// Interface reconstruction: recovers the perimeter-averaged bulk value at the
// tube wall from a bulk value sampled at distance delta from the centerline,
// and the resulting exchange source per unit tube length.

#include "mdtube/diffusion_law.hpp"

namespace mdtube {

/// Radial profile of the regularized unit-source potential:
///   (1/2π)[d²/(2ρ²) + ln(ρ/R) − 1/2]   for d <= ρ
///   (1/2π) ln(d/R)                      for d >  ρ
double kernel_profile_f(double d, double radius, double rho);

struct ReconstructionInput {
    double u_b_delta = 0.0;
    double u_e = 0.0;
    double radius = 0.0;
    double rho = 0.0;
    double delta = 0.0;
    double gamma = 0.0;
};

struct ReconstructionResult {
    double u_hat = 0.0;
    double q = 0.0;
    double du_hat_du_b = 0.0;
    double du_hat_du_e = 0.0;
    double dq_du_b = 0.0;
    double dq_du_e = 0.0;
    double residual = 0.0;
    int iterations = 0;
    /// ln(ρ/R) < 1/2: the root was found but uniqueness is not guaranteed.
    bool uniqueness_warning = false;
};

/// Solves T(u_b_delta) − T(û) − |P|γ f(δ)(û − u_e) = 0 for û and returns
/// q = −|P|γ(û − u_e) with derivatives. Throws DomainError on invalid
/// geometry and NumericError if no sign change is found.
ReconstructionResult reconstruct_interface(const ReconstructionInput& in, const DiffusionLaw& law);

/// 0.5·max|D'|·spread²/c_tilde with max|D'| sampled over [u_lo, u_hi].
double mvt_error_bound(const DiffusionLaw& law, double u_lo, double u_hi, double spread,
                       double c_tilde);

/// R²/(4π(dist − R)²): contribution bound of a neighboring tube at centerline
/// distance dist. Throws DomainError for dist <= R.
double neighbor_error_bound(double radius, double dist);

}  // namespace mdtube
