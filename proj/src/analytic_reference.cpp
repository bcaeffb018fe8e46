#include "mdtube/analytic_reference.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <numbers>

#include "mdtube/errors.hpp"
#include "mdtube/reconstruction.hpp"

namespace mdtube {

SingleTubeSolution::SingleTubeSolution(const SingleTubeParams& params, DiffusionLaw law)
    : p_(params), law_(std::move(law)) {
    if (!(p_.radius > 0.0) || p_.rho < p_.radius) throw DomainError("single tube: need 0 < R <= rho");
    q_ = -2.0 * std::numbers::pi * p_.radius * p_.gamma * (p_.u_hat - p_.u_e);
    psi_hat_ = law_.transform(p_.u_hat);
}

double SingleTubeSolution::psi(double r) const {
    return psi_hat_ - q_ * kernel_profile_f(r, p_.radius, p_.rho);
}

double SingleTubeSolution::u(double r) const { return law_.inverse_transform(psi(r)); }

std::string to_string(ReferenceVariant v) { return v == ReferenceVariant::U ? "U" : "U_tilde"; }

double MultiTubeSolution::psi(double x, double y) const {
    double s = c_psi;
    for (std::size_t j = 0; j < tubes.size(); ++j) {
        const double d = std::hypot(x - tubes[j].x, y - tubes[j].y);
        s -= q[j] * kernel_profile_f(d, tubes[j].radius, tubes[j].rho);
    }
    return s;
}

double MultiTubeSolution::psi_line_source(double x, double y) const {
    double s = c_psi;
    for (std::size_t j = 0; j < tubes.size(); ++j) {
        const double d = std::hypot(x - tubes[j].x, y - tubes[j].y);
        s -= q[j] * kernel_profile_f(d, tubes[j].radius, tubes[j].radius);
    }
    return s;
}

namespace {

double source_of(const TubeSpec& t, double u_hat) {
    return -2.0 * std::numbers::pi * t.radius * t.gamma * (u_hat - t.u_e);
}

// Perimeter residuals for given (C_ψ, û).
std::vector<double> perimeter_residuals(const std::vector<TubeSpec>& tubes, const DiffusionLaw& law,
                                        double c_psi, const std::vector<double>& u_hat,
                                        ReferenceVariant variant, int k_ip) {
    MultiTubeSolution s;
    s.tubes = tubes;
    s.c_psi = c_psi;
    s.u_hat = u_hat;
    s.q.resize(tubes.size());
    for (std::size_t j = 0; j < tubes.size(); ++j) s.q[j] = source_of(tubes[j], u_hat[j]);
    std::vector<double> r(tubes.size());
    const double w = 1.0 / k_ip;
    for (std::size_t i = 0; i < tubes.size(); ++i) {
        double avg = 0.0;
        for (int k = 0; k < k_ip; ++k) {
            const double phi = 2.0 * std::numbers::pi * (k + 0.5) / k_ip;
            const double x = tubes[i].x + tubes[i].radius * std::cos(phi);
            const double y = tubes[i].y + tubes[i].radius * std::sin(phi);
            const double p = s.psi_line_source(x, y);
            avg += w * (variant == ReferenceVariant::U ? law.inverse_transform(p) : p);
        }
        r[i] = u_hat[i] - (variant == ReferenceVariant::U ? avg : law.inverse_transform(avg));
    }
    return r;
}

}  // namespace

std::vector<double> MultiTubeSolution::residuals(int k_ip) const {
    return perimeter_residuals(tubes, law, c_psi, u_hat, variant, k_ip);
}

std::string MultiTubeSolution::to_json() const {
    nlohmann::json j;
    j["variant"] = to_string(variant);
    j["c_psi"] = c_psi;
    j["iterations"] = iterations;
    j["law"] = law.name();
    for (std::size_t i = 0; i < tubes.size(); ++i) {
        j["tubes"].push_back({{"x", tubes[i].x},
                              {"y", tubes[i].y},
                              {"R", tubes[i].radius},
                              {"rho", tubes[i].rho},
                              {"gamma", tubes[i].gamma},
                              {"u_e", tubes[i].u_e},
                              {"u_hat", u_hat[i]},
                              {"q", q[i]}});
    }
    return j.dump(2);
}

double anchor_for_source(const TubeSpec& tube, double q_target) {
    return tube.u_e - q_target / (2.0 * std::numbers::pi * tube.radius * tube.gamma);
}

MultiTubeSolution solve_multi_tube(const std::vector<TubeSpec>& tubes, const DiffusionLaw& law, int anchor,
                                   double anchor_value, ReferenceVariant variant,
                                   const MultiTubeOptions& options) {
    const int n = static_cast<int>(tubes.size());
    if (n == 0) throw ConfigError("multi-tube reference needs at least one tube");
    if (anchor < 0 || anchor >= n) throw ConfigError("anchor index out of range");
    if (options.k_ip < 8) throw ConfigError("k_ip must be at least 8");
    for (int i = 0; i < n; ++i) {
        if (!(tubes[i].radius > 0.0) || tubes[i].rho < tubes[i].radius)
            throw DomainError("tube " + std::to_string(i) + ": need 0 < R <= rho");
        for (int j = i + 1; j < n; ++j)
            if (std::hypot(tubes[i].x - tubes[j].x, tubes[i].y - tubes[j].y) <=
                tubes[i].radius + tubes[j].radius)
                throw DomainError("tubes " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
    }

    // v = [C_ψ, û_j for j != anchor]
    auto unpack = [&](const Eigen::VectorXd& v, double& c, std::vector<double>& u) {
        c = v[0];
        u.assign(n, 0.0);
        for (int j = 0, k = 1; j < n; ++j) u[j] = j == anchor ? anchor_value : v[k++];
    };
    auto residual = [&](const Eigen::VectorXd& v) {
        double c;
        std::vector<double> u;
        unpack(v, c, u);
        const auto r = perimeter_residuals(tubes, law, c, u, variant, options.k_ip);
        return Eigen::Map<const Eigen::VectorXd>(r.data(), n).eval();
    };

    Eigen::VectorXd v(n);
    v[0] = law.transform(anchor_value);
    for (int j = 0, k = 1; j < n; ++j)
        if (j != anchor) v[k++] = anchor_value;

    MultiTubeSolution sol;
    Eigen::VectorXd r = residual(v);
    double res = r.lpNorm<Eigen::Infinity>();
    sol.residual_history.push_back(res);
    int it = 0;
    while (res > options.tolerance) {
        if (it >= options.max_iterations)
            throw ConvergenceError("multi-tube reference: Newton did not converge", sol.residual_history);
        ++it;
        Eigen::MatrixXd jac(n, n);
        for (int c = 0; c < n; ++c) {
            const double h = options.fd_step * std::max(1.0, std::abs(v[c]));
            Eigen::VectorXd vp = v, vm = v;
            vp[c] += h;
            vm[c] -= h;
            jac.col(c) = (residual(vp) - residual(vm)) / (2.0 * h);
        }
        const Eigen::VectorXd dv = jac.partialPivLu().solve(-r);
        double alpha = 1.0;
        Eigen::VectorXd v_new;
        Eigen::VectorXd r_new;
        double res_new = 0.0;
        for (int h = 0; h <= options.max_halvings; ++h) {
            v_new = v + alpha * dv;
            try {
                r_new = residual(v_new);
                res_new = r_new.lpNorm<Eigen::Infinity>();
            } catch (const Error&) {
                res_new = std::numeric_limits<double>::infinity();
            }
            if (res_new < res) break;
            alpha *= 0.5;
        }
        if (!(res_new < res)) {
            // stagnation at round-off level counts as converged only below 1e3x tolerance
            if (res <= 1e3 * options.tolerance) break;
            throw ConvergenceError("multi-tube reference: line search failed", sol.residual_history);
        }
        v = v_new;
        r = r_new;
        res = res_new;
        sol.residual_history.push_back(res);
    }

    sol.tubes = tubes;
    sol.law = law;
    sol.variant = variant;
    sol.iterations = it;
    unpack(v, sol.c_psi, sol.u_hat);
    sol.q.resize(n);
    for (int j = 0; j < n; ++j) sol.q[j] = source_of(tubes[j], sol.u_hat[j]);
    return sol;
}

}  // namespace mdtube
