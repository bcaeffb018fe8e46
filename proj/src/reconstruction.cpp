#include "mdtube/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mdtube/errors.hpp"
#include "mdtube/numerics.hpp"

namespace mdtube {

double kernel_profile_f(double d, double radius, double rho) {
    constexpr double inv_2pi = 0.5 / std::numbers::pi;
    if (d <= rho) return inv_2pi * (d * d / (2.0 * rho * rho) + std::log(rho / radius) - 0.5);
    return inv_2pi * std::log(d / radius);
}

ReconstructionResult reconstruct_interface(const ReconstructionInput& in, const DiffusionLaw& law) {
    if (!(in.radius > 0.0) || in.rho < in.radius || in.delta < 0.0 || in.delta >= in.rho)
        throw DomainError("reconstruction needs 0 <= delta < rho and 0 < R <= rho");

    ReconstructionResult out;
    out.uniqueness_warning = std::log(in.rho / in.radius) < 0.5;
    const double pg = 2.0 * std::numbers::pi * in.radius * in.gamma;
    const double F = pg * kernel_profile_f(in.delta, in.radius, in.rho);
    const double psi_delta = law.transform(in.u_b_delta);

    auto g = [&](double u) { return psi_delta - law.transform(u) - F * (u - in.u_e); };

    double u_hat;
    if (in.u_b_delta == in.u_e) {
        u_hat = in.u_e;
    } else {
        const double scale = std::max({1.0, std::abs(in.u_e), std::abs(in.u_b_delta)});
        const double tol = 1e-12 * scale;
        const double lo = std::min(in.u_b_delta, in.u_e), hi = std::max(in.u_b_delta, in.u_e);
        const double glo = g(lo), ghi = g(hi);
        Bracket br{lo, hi, glo, ghi};
        if (glo * ghi > 0.0) {
            try {
                br = expand_bracket(g, lo, hi);
            } catch (const DomainError&) {
                std::ostringstream msg;
                msg << "reconstruction: no sign change (u_b_delta=" << in.u_b_delta << ", u_e=" << in.u_e
                    << ", R=" << in.radius << ", rho=" << in.rho << ", delta=" << in.delta << ")";
                throw NumericError(msg.str());
            }
        }
        const RootResult r = brent(g, br.lo, br.hi, br.f_lo, br.f_hi, tol);
        u_hat = r.root;
        out.iterations = r.iterations;
        // one Newton polish step; kept only if it does not increase the residual
        const double slope = law.eval(u_hat) + F;
        if (slope > 0.0) {
            const double cand = u_hat + r.residual / slope;
            if (std::abs(g(cand)) < std::abs(r.residual)) u_hat = cand;
        }
    }

    out.u_hat = u_hat;
    out.residual = g(u_hat);
    out.q = -pg * (u_hat - in.u_e);
    const double denom = law.eval(u_hat) + F;
    out.du_hat_du_b = law.eval(in.u_b_delta) / denom;
    out.du_hat_du_e = F / denom;
    out.dq_du_b = -pg * out.du_hat_du_b;
    out.dq_du_e = -pg * (out.du_hat_du_e - 1.0);
    return out;
}

double mvt_error_bound(const DiffusionLaw& law, double u_lo, double u_hi, double spread, double c_tilde) {
    if (spread < 0.0) throw DomainError("mvt_error_bound: negative spread");
    if (!(c_tilde > 0.0)) throw DomainError("mvt_error_bound: c_tilde must be positive");
    if (u_hi < u_lo) std::swap(u_lo, u_hi);
    double dmax = 0.0;
    constexpr int samples = 256;
    for (int i = 0; i <= samples; ++i) {
        const double u = u_lo + (u_hi - u_lo) * i / samples;
        dmax = std::max(dmax, std::abs(law.derivative(u)));
    }
    return 0.5 * dmax * spread * spread / c_tilde;
}

double neighbor_error_bound(double radius, double dist) {
    if (!(dist > radius)) throw DomainError("neighbor_error_bound: tubes overlap (dist <= R)");
    const double gap = dist - radius;
    return radius * radius / (4.0 * std::numbers::pi * gap * gap);
}

}  // namespace mdtube
