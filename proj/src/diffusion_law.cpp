#include "mdtube/diffusion_law.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mdtube/errors.hpp"
#include "mdtube/numerics.hpp"

namespace mdtube {

// ---------------------------------------------------------------------------
// Van Genuchten-Mualem constitutive relations

namespace {

// k_r and dk_r/dx expressed through x = (α·p_c)^n, which keeps 1 - S_e^{1/m}
// = x/(1+x) free of cancellation near saturation.
double vgm_kr_from_x(const VanGenuchtenMualemLaw& p, double x) {
    const double m = p.m();
    const double se = std::pow(1.0 + x, -m);
    if (p.printed_mualem_variant) return std::pow(se, p.lambda) * std::pow(1.0 + x, -2.0);
    const double b = 1.0 - std::pow(x / (1.0 + x), m);
    return std::pow(se, p.lambda) * b * b;
}

double vgm_dkr_dx(const VanGenuchtenMualemLaw& p, double x) {
    const double m = p.m();
    const double ml = m * p.lambda;
    if (p.printed_mualem_variant) return -(ml + 2.0) * std::pow(1.0 + x, -ml - 3.0);
    const double ratio = x / (1.0 + x);
    const double b = 1.0 - std::pow(ratio, m);
    const double db = -m * std::pow(ratio, m - 1.0) / ((1.0 + x) * (1.0 + x));
    return -ml * std::pow(1.0 + x, -ml - 1.0) * b * b + std::pow(1.0 + x, -ml) * 2.0 * b * db;
}

double vgm_saturated(const VanGenuchtenMualemLaw& p) { return p.permeability / p.viscosity; }

double vgm_floor(const VanGenuchtenMualemLaw& p) {
    return p.d_min > 0.0 ? p.d_min : 1e-6 * vgm_saturated(p);
}

// capillary pressure at which K·k_r/μ reaches the floor
double vgm_floor_capillary_pressure(const VanGenuchtenMualemLaw& p) {
    const double target = vgm_floor(p) / vgm_saturated(p);
    double lo = std::log(1e-12 / p.alpha), hi = std::log(1e40 / p.alpha);
    for (int i = 0; i < 300; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double x = std::pow(p.alpha * std::exp(mid), p.n);
        if (vgm_kr_from_x(p, x) > target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15) break;
    }
    return std::exp(0.5 * (lo + hi));
}

}  // namespace

double VanGenuchtenMualemLaw::effective_saturation(double pc) const {
    if (pc <= 0.0) return 1.0;
    return std::pow(1.0 + std::pow(alpha * pc, n), -m());
}

double VanGenuchtenMualemLaw::relative_permeability(double se) const {
    if (se >= 1.0) return 1.0;
    if (se <= 0.0) return 0.0;
    const double x = std::pow(se, -1.0 / m()) - 1.0;
    return vgm_kr_from_x(*this, x);
}

double VanGenuchtenMualemLaw::capillary_pressure(double se) const {
    if (!(se > 0.0) || se > 1.0) {
        std::ostringstream msg;
        msg << "effective saturation " << se << " outside (0, 1]";
        throw DomainError(msg.str());
    }
    return std::pow(std::pow(se, -1.0 / m()) - 1.0, 1.0 / n) / alpha;
}

double VanGenuchtenMualemLaw::effective_from_water_saturation(double sw) const {
    const double theta = sw * theta_s;
    const double se = (theta - theta_r) / (theta_s - theta_r);
    if (!(se > 0.0) || se > 1.0) {
        std::ostringstream msg;
        msg << "water saturation " << sw << " gives effective saturation " << se
            << " outside (0, 1]";
        throw DomainError(msg.str());
    }
    return se;
}

// ---------------------------------------------------------------------------
// Panel quadrature for laws without a closed-form transform.
//
// C(u) = ∫_{u_left}^{u} D with D constant below u_left and above u_right;
// T(u) = C(u) - C(0).

class QuadratureTransform {
public:
    QuadratureTransform(std::function<double(double)> d, std::vector<double> nodes, double d_left,
                        double d_right)
        : d_(std::move(d)), nodes_(std::move(nodes)), d_left_(d_left), d_right_(d_right) {
        cum_.assign(nodes_.size(), 0.0);
        for (std::size_t i = 1; i < nodes_.size(); ++i)
            cum_[i] = cum_[i - 1] + panel(nodes_[i - 1], nodes_[i]);
        c0_ = cumulative(0.0);
    }

    double transform(double u) const { return cumulative(u) - c0_; }

    double inverse(double psi, const std::optional<std::pair<double, double>>& hint) const {
        const double target = psi + c0_;
        const double u_left = nodes_.front(), u_right = nodes_.back();
        if (target <= 0.0) return u_left + target / d_left_;
        if (target >= cum_.back()) return u_right + (target - cum_.back()) / d_right_;
        double lo, hi;
        if (hint && hint->first >= u_left && hint->second <= u_right) {
            lo = hint->first;
            hi = hint->second;
        } else {
            const auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
            const std::size_t i = static_cast<std::size_t>(it - cum_.begin()) - 1;
            lo = nodes_[i];
            hi = nodes_[i + 1];
        }
        auto g = [&](double u) { return cumulative(u) - target; };
        double g_lo = g(lo), g_hi = g(hi);
        if ((g_lo > 0.0) == (g_hi > 0.0)) {
            const auto b = expand_bracket(g, lo, hi);
            lo = b.lo;
            hi = b.hi;
            g_lo = b.f_lo;
            g_hi = b.f_hi;
        }
        const double tol = 1e-14 * std::max({1.0, std::abs(lo), std::abs(hi)});
        return brent(g, lo, hi, g_lo, g_hi, tol).root;
    }

    double cumulative(double u) const {
        const double u_left = nodes_.front(), u_right = nodes_.back();
        if (u <= u_left) return d_left_ * (u - u_left);
        if (u >= u_right) return cum_.back() + d_right_ * (u - u_right);
        const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), u);
        const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
        // integrate from the nearer node
        if (i + 1 < nodes_.size() && nodes_[i + 1] - u < u - nodes_[i])
            return cum_[i + 1] - panel(u, nodes_[i + 1]);
        return cum_[i] + panel(nodes_[i], u);
    }

private:
    double panel(double a, double b) const {
        if (a == b) return 0.0;
        TanhSinhOptions opts;
        opts.rel_tol = 1e-13;
        return tanh_sinh(d_, a, b, opts).value;
    }

    std::function<double(double)> d_;
    std::vector<double> nodes_;
    std::vector<double> cum_;
    double d_left_, d_right_;
    double c0_ = 0.0;
};

// ---------------------------------------------------------------------------

namespace {

void require(bool condition, const std::string& message) {
    if (!condition) throw ConfigError(message);
}

std::vector<double> vgm_nodes(const VanGenuchtenMualemLaw& p) {
    const double pc_floor = vgm_floor_capillary_pressure(p);
    std::vector<double> pcs{0.0};
    double pc = std::min(1e-4 / p.alpha, 0.1 * pc_floor);
    const double ratio = std::pow(10.0, 1.0 / 40.0);
    while (pc < pc_floor) {
        pcs.push_back(pc);
        pc *= ratio;
    }
    pcs.push_back(pc_floor);
    std::vector<double> nodes;
    nodes.reserve(pcs.size());
    for (auto it = pcs.rbegin(); it != pcs.rend(); ++it) nodes.push_back(p.p_ref - *it);
    return nodes;
}

}  // namespace

DiffusionLaw::DiffusionLaw(Variant law) : law_(std::move(law)) {
    std::visit(
        [this](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ConstantLaw>) {
                require(l.d0 > 0.0 && std::isfinite(l.d0), "constant law: D0 must be positive");
            } else if constexpr (std::is_same_v<T, ExponentialLaw>) {
                require(l.d0 > 0.0, "exponential law: D0 must be positive");
                require(l.d_min > 0.0, "exponential law: D_min must be positive");
                require(l.k >= 0.0 && std::isfinite(l.k), "exponential law: k must be >= 0");
            } else if constexpr (std::is_same_v<T, VanGenuchtenMualemLaw>) {
                require(l.permeability > 0.0 && l.viscosity > 0.0,
                        "van Genuchten law: K and mu must be positive");
                require(0.0 < l.theta_r && l.theta_r < l.theta_s && l.theta_s <= 1.0,
                        "van Genuchten law: need 0 < theta_r < theta_s <= 1");
                require(l.n > 1.0, "van Genuchten law: n must exceed 1");
                require(l.alpha > 0.0, "van Genuchten law: alpha must be positive");
                require(l.d_min >= 0.0 && vgm_floor(l) < vgm_saturated(l),
                        "van Genuchten law: D_min must lie below K/mu");
                auto copy = l;
                auto d = [copy](double u) {
                    const double pc = copy.p_ref - u;
                    if (pc <= 0.0) return vgm_saturated(copy);
                    const double x = std::pow(copy.alpha * pc, copy.n);
                    return std::max(vgm_saturated(copy) * vgm_kr_from_x(copy, x), vgm_floor(copy));
                };
                quadrature_ = std::make_shared<QuadratureTransform>(d, vgm_nodes(l), vgm_floor(l),
                                                                    vgm_saturated(l));
            } else {
                require(l.u.size() >= 2 && l.u.size() == l.d.size(),
                        "tabulated law: need at least two (u, D) samples");
                for (std::size_t i = 0; i < l.u.size(); ++i) {
                    require(l.d[i] > 0.0, "tabulated law: D samples must be positive");
                    if (i > 0) require(l.u[i] > l.u[i - 1], "tabulated law: u must increase");
                }
                auto copy = l;
                auto d = [copy](double u) {
                    if (u <= copy.u.front()) return copy.d.front();
                    if (u >= copy.u.back()) return copy.d.back();
                    const auto it = std::upper_bound(copy.u.begin(), copy.u.end(), u);
                    const std::size_t i = static_cast<std::size_t>(it - copy.u.begin()) - 1;
                    const double w = (u - copy.u[i]) / (copy.u[i + 1] - copy.u[i]);
                    return (1.0 - w) * copy.d[i] + w * copy.d[i + 1];
                };
                quadrature_ =
                    std::make_shared<QuadratureTransform>(d, l.u, l.d.front(), l.d.back());
            }
        },
        law_);
}

DiffusionLaw DiffusionLaw::constant(double d0) { return DiffusionLaw(ConstantLaw{d0}); }

DiffusionLaw DiffusionLaw::exponential(double d0, double k, double d_min) {
    return DiffusionLaw(ExponentialLaw{d0, k, d_min});
}

DiffusionLaw DiffusionLaw::van_genuchten_mualem(const VanGenuchtenMualemLaw& params) {
    return DiffusionLaw(params);
}

DiffusionLaw DiffusionLaw::tabulated(std::vector<double> u, std::vector<double> d) {
    return DiffusionLaw(TabulatedLaw{std::move(u), std::move(d)});
}

std::string DiffusionLaw::name() const {
    switch (law_.index()) {
        case 0: return "constant";
        case 1: return "exponential";
        case 2: return "van_genuchten_mualem";
        default: return "tabulated";
    }
}

bool DiffusionLaw::has_closed_form() const { return law_.index() <= 1; }

double DiffusionLaw::d_min() const {
    return std::visit(
        [](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ConstantLaw>) return l.d0;
            else if constexpr (std::is_same_v<T, ExponentialLaw>) return l.k == 0.0 ? std::max(l.d0, l.d_min) : l.d_min;
            else if constexpr (std::is_same_v<T, VanGenuchtenMualemLaw>) return vgm_floor(l);
            else return *std::min_element(l.d.begin(), l.d.end());
        },
        law_);
}

std::vector<double> DiffusionLaw::kinks() const {
    return std::visit(
        [](const auto& l) -> std::vector<double> {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ConstantLaw>) return {};
            else if constexpr (std::is_same_v<T, ExponentialLaw>) {
                if (l.k == 0.0) return {};
                return {1.0 + std::log(l.d_min / l.d0) / l.k};
            } else if constexpr (std::is_same_v<T, VanGenuchtenMualemLaw>)
                return {l.p_ref - vgm_floor_capillary_pressure(l), l.p_ref};
            else return l.u;
        },
        law_);
}

double DiffusionLaw::eval(double u) const {
    return std::visit(
        [u](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ConstantLaw>) return l.d0;
            else if constexpr (std::is_same_v<T, ExponentialLaw>)
                return std::max(l.d0 * std::exp(l.k * (u - 1.0)), l.d_min);
            else if constexpr (std::is_same_v<T, VanGenuchtenMualemLaw>) {
                const double pc = l.p_ref - u;
                if (pc <= 0.0) return vgm_saturated(l);
                const double x = std::pow(l.alpha * pc, l.n);
                return std::max(vgm_saturated(l) * vgm_kr_from_x(l, x), vgm_floor(l));
            } else {
                if (u <= l.u.front()) return l.d.front();
                if (u >= l.u.back()) return l.d.back();
                const auto it = std::upper_bound(l.u.begin(), l.u.end(), u);
                const std::size_t i = static_cast<std::size_t>(it - l.u.begin()) - 1;
                const double w = (u - l.u[i]) / (l.u[i + 1] - l.u[i]);
                return (1.0 - w) * l.d[i] + w * l.d[i + 1];
            }
        },
        law_);
}

double DiffusionLaw::derivative(double u) const {
    return std::visit(
        [u](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ConstantLaw>) return 0.0;
            else if constexpr (std::is_same_v<T, ExponentialLaw>) {
                const double d = l.d0 * std::exp(l.k * (u - 1.0));
                return d > l.d_min ? l.k * d : 0.0;
            } else if constexpr (std::is_same_v<T, VanGenuchtenMualemLaw>) {
                const double pc = l.p_ref - u;
                if (pc <= 0.0) return 0.0;
                const double x = std::pow(l.alpha * pc, l.n);
                if (vgm_saturated(l) * vgm_kr_from_x(l, x) <= vgm_floor(l)) return 0.0;
                // dD/du = -(K/μ)·dk_r/dx·dx/dp_c
                return -vgm_saturated(l) * vgm_dkr_dx(l, x) * l.n * x / pc;
            } else {
                if (u < l.u.front() || u >= l.u.back()) return 0.0;
                const auto it = std::upper_bound(l.u.begin(), l.u.end(), u);
                const std::size_t i = static_cast<std::size_t>(it - l.u.begin()) - 1;
                return (l.d[i + 1] - l.d[i]) / (l.u[i + 1] - l.u[i]);
            }
        },
        law_);
}

double DiffusionLaw::exp_transform(const ExponentialLaw& l, double u) const {
    if (l.k == 0.0) return std::max(l.d0, l.d_min) * u;
    const double k = l.k;
    const double uc = 1.0 + std::log(l.d_min / l.d0) / k;
    auto dr = [k](double v) { return std::exp(k * (v - 1.0)); };
    if (uc <= 0.0) {
        if (u <= uc) return l.d_min * (u - uc) + l.d0 / k * (dr(uc) - dr(0.0));
        return l.d0 / k * (dr(u) - dr(0.0));
    }
    if (u <= uc) return l.d_min * u;
    return l.d0 / k * (dr(u) - dr(uc)) + l.d0 * dr(uc) * uc;
}

double DiffusionLaw::exp_inverse(const ExponentialLaw& l, double psi) const {
    if (l.k == 0.0) return psi / std::max(l.d0, l.d_min);
    const double k = l.k;
    const double uc = 1.0 + std::log(l.d_min / l.d0) / k;
    auto dr = [k](double v) { return std::exp(k * (v - 1.0)); };
    const double psi_c = exp_transform(l, uc);
    if (uc <= 0.0) {
        if (psi <= psi_c) return (psi - l.d0 / k * (dr(uc) - dr(0.0))) / l.d_min + uc;
        return 1.0 + std::log(k / l.d0 * psi + dr(0.0)) / k;
    }
    if (psi <= psi_c) return psi / l.d_min;
    return 1.0 + std::log(k / l.d0 * (psi - l.d0 * dr(uc) * uc) + dr(uc)) / k;
}

double DiffusionLaw::transform(double u) const {
    switch (law_.index()) {
        case 0: return std::get<ConstantLaw>(law_).d0 * u;
        case 1: return exp_transform(std::get<ExponentialLaw>(law_), u);
        default: return quadrature_->transform(u);
    }
}

double DiffusionLaw::inverse_transform(double psi) const {
    if (!std::isfinite(psi)) throw DomainError("inverse_transform: non-finite argument");
    switch (law_.index()) {
        case 0: return psi / std::get<ConstantLaw>(law_).d0;
        case 1: return exp_inverse(std::get<ExponentialLaw>(law_), psi);
        default: {
            std::optional<std::pair<double, double>> hint;
            if (table_) hint = table_->bracket(psi);
            return quadrature_->inverse(psi, hint);
        }
    }
}

DiffusionLaw DiffusionLaw::with_table(double u_lo, double u_hi, int samples) const {
    DiffusionLaw copy = *this;
    copy.table_ = std::make_shared<TransformTable>(build_table(*this, u_lo, u_hi, samples).table);
    return copy;
}

// ---------------------------------------------------------------------------

TransformTable::TransformTable(std::vector<double> u_samples, std::vector<double> psi_samples)
    : u_(std::move(u_samples)), psi_(std::move(psi_samples)) {
    if (u_.size() < 2 || u_.size() != psi_.size())
        throw ConfigError("transform table: need at least two matching samples");
    for (std::size_t i = 1; i < u_.size(); ++i) {
        if (!(u_[i] > u_[i - 1]) || !(psi_[i] > psi_[i - 1])) {
            std::ostringstream msg;
            msg << "transform table: samples not strictly increasing at index " << i;
            throw NumericError(msg.str());
        }
    }
}

std::optional<std::pair<double, double>> TransformTable::bracket(double psi) const {
    if (!contains_psi(psi)) return std::nullopt;
    auto it = std::upper_bound(psi_.begin(), psi_.end(), psi);
    std::size_t i = static_cast<std::size_t>(it - psi_.begin());
    i = std::clamp<std::size_t>(i, 1, psi_.size() - 1);
    return std::make_pair(u_[i - 1], u_[i]);
}

std::optional<double> TransformTable::inverse_lookup(double psi) const {
    if (!contains_psi(psi)) return std::nullopt;
    auto it = std::upper_bound(psi_.begin(), psi_.end(), psi);
    std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - psi_.begin()), 1,
                                            psi_.size() - 1);
    const double w = (psi - psi_[i - 1]) / (psi_[i] - psi_[i - 1]);
    return u_[i - 1] + w * (u_[i] - u_[i - 1]);
}

std::optional<double> TransformTable::forward_lookup(double u) const {
    if (u < u_.front() || u > u_.back()) return std::nullopt;
    auto it = std::upper_bound(u_.begin(), u_.end(), u);
    std::size_t i =
        std::clamp<std::size_t>(static_cast<std::size_t>(it - u_.begin()), 1, u_.size() - 1);
    const double w = (u - u_[i - 1]) / (u_[i] - u_[i - 1]);
    return psi_[i - 1] + w * (psi_[i] - psi_[i - 1]);
}

TableBuild build_table(const DiffusionLaw& law, double u_lo, double u_hi, int samples) {
    if (!(u_lo < u_hi) || samples < 2)
        throw ConfigError("build_table: need u_lo < u_hi and at least two samples");
    std::vector<double> u(samples), psi(samples);
    for (int i = 0; i < samples; ++i) {
        u[i] = u_lo + (u_hi - u_lo) * i / (samples - 1);
        psi[i] = law.transform(u[i]);
    }
    TableBuild out{TransformTable(std::move(u), std::move(psi)), 0.0};
    const int probes = 4 * (samples - 1) + 1;
    for (int i = 0; i < probes; ++i) {
        // offset probes so they fall between samples
        const double x = u_lo + (u_hi - u_lo) * (i + 0.37) / probes;
        if (x > u_hi) continue;
        const auto back = out.table.inverse_lookup(law.transform(x));
        if (back) out.max_round_trip_error = std::max(out.max_round_trip_error, std::abs(*back - x));
    }
    return out;
}

}  // namespace mdtube
