#pragma once

/**
 * @file diffusion_law.hpp
 * @brief Nonlinear bulk diffusion coefficient D(u) with its Kirchhoff transform.
 *
 * The Kirchhoff transform is
 *
 *     T(u) = ∫_0^u D(ũ) dũ,        ∇T(u) = D(u) ∇u,
 *
 * so that -∇·(D(u)∇u) = -Δψ with ψ = T(u). Every law carries a floor
 * D(u) >= D_min > 0, which makes T a bijection of the real line.
 *
 * Constant and regularized exponential laws use closed forms for T and T⁻¹.
 * Van Genuchten-Mualem and tabulated laws integrate D with tanh-sinh
 * quadrature over panels whose breakpoints include every kink of D, and
 * invert with Brent's method.
 */

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mdtube {

struct ConstantLaw {
    double d0 = 1.0;
};

/// D(u) = max(D0·exp(k(u-1)), D_min)
struct ExponentialLaw {
    double d0 = 1.0;
    double k = 1.0;
    double d_min = 1e-6;
};

/// Van Genuchten-Mualem hydraulic conductivity D(u) = max(K·k_r(S_e(p_c))/μ, D_min)
/// with capillary pressure p_c = p_ref - u. p_ref is the reference (air) pressure;
/// p_ref = 0 gives p_c = -u.
struct VanGenuchtenMualemLaw {
    double permeability = 5.89912e-13;  ///< K [m²]
    double viscosity = 1e-3;            ///< μ [Pa·s]
    double theta_r = 0.08;
    double theta_s = 0.43;
    double alpha = 4.077e-4;  ///< [1/Pa]
    double n = 1.6;
    double lambda = 0.5;  ///< Mualem tortuosity exponent
    double d_min = 0.0;   ///< 0 selects 1e-6·K/μ
    double p_ref = 0.0;   ///< [Pa]
    /// Use k_r = S_e^λ·[1 - (1 - S_e^{1/m})]² instead of the standard Mualem
    /// k_r = S_e^λ·[1 - (1 - S_e^{1/m})^m]².
    bool printed_mualem_variant = false;

    double m() const { return 1.0 - 1.0 / n; }
    double effective_saturation(double capillary_pressure) const;
    double relative_permeability(double effective_saturation) const;
    /// Inverse retention curve: p_c(S_e) for S_e in (0, 1].
    double capillary_pressure(double effective_saturation) const;
    /// Water saturation S_w = θ/θ_s to effective saturation.
    double effective_from_water_saturation(double water_saturation) const;
};

/// Piecewise-linear D through (u_i, d_i) samples, constant outside.
struct TabulatedLaw {
    std::vector<double> u;
    std::vector<double> d;
};

class QuadratureTransform;
class TransformTable;

class DiffusionLaw {
public:
    using Variant = std::variant<ConstantLaw, ExponentialLaw, VanGenuchtenMualemLaw, TabulatedLaw>;

    /// Validates the parameters; throws ConfigError on an invalid law.
    explicit DiffusionLaw(Variant law);

    static DiffusionLaw constant(double d0);
    static DiffusionLaw exponential(double d0, double k, double d_min);
    static DiffusionLaw van_genuchten_mualem(const VanGenuchtenMualemLaw& params);
    static DiffusionLaw tabulated(std::vector<double> u, std::vector<double> d);

    const Variant& variant() const { return law_; }
    std::string name() const;

    double eval(double u) const;
    double derivative(double u) const;
    double transform(double u) const;
    double inverse_transform(double psi) const;
    double d_min() const;

    bool has_closed_form() const;
    /// Points where D is not differentiable (floors, saturation, table nodes).
    std::vector<double> kinks() const;

    /// Returns a copy that uses the table to bracket inverse_transform() on [lo, hi].
    DiffusionLaw with_table(double u_lo, double u_hi, int samples) const;
    const TransformTable* table() const { return table_.get(); }

private:
    double exp_transform(const ExponentialLaw& law, double u) const;
    double exp_inverse(const ExponentialLaw& law, double psi) const;

    Variant law_;
    std::shared_ptr<const QuadratureTransform> quadrature_;
    std::shared_ptr<const TransformTable> table_;
};

/// Monotone lookup table (u_i, ψ_i = T(u_i)) with linear interpolation.
class TransformTable {
public:
    TransformTable(std::vector<double> u_samples, std::vector<double> psi_samples);

    const std::vector<double>& u_samples() const { return u_; }
    const std::vector<double>& psi_samples() const { return psi_; }
    double u_lo() const { return u_.front(); }
    double u_hi() const { return u_.back(); }
    bool contains_psi(double psi) const { return psi >= psi_.front() && psi <= psi_.back(); }

    /// Linear-interpolated T⁻¹; nullopt outside the sampled range.
    std::optional<double> inverse_lookup(double psi) const;
    /// Linear-interpolated T; nullopt outside the sampled range.
    std::optional<double> forward_lookup(double u) const;
    /// Sample interval [u_i, u_{i+1}] bracketing psi.
    std::optional<std::pair<double, double>> bracket(double psi) const;

private:
    std::vector<double> u_;
    std::vector<double> psi_;
};

struct TableBuild {
    TransformTable table;
    double max_round_trip_error = 0.0;  ///< max |lookup(T(u)) - u| on a probe grid
};

/// Samples T uniformly on [u_lo, u_hi]. The probe grid has 4x the samples and
/// measures the interpolated inverse against exact values.
TableBuild build_table(const DiffusionLaw& law, double u_lo, double u_hi, int samples);

}  // namespace mdtube
