#pragma once

/**
 * @file bulk_grid.hpp
 * @brief Structured axis-aligned bulk grids and the cell-centered TPFA operator.
 *
 * Three flavours share one indexing scheme:
 *   - Radial1D: cells [r_i, r_{i+1}] on [0, r_outer], measures per unit tube
 *     length (cell measure π(r_{i+1}² - r_i²), face measure 2πr).
 *   - Planar2D: an (nx, ny) grid extruded to one cell of thickness 1 in z,
 *     so that perpendicular tubes become segments of unit length.
 *   - Cartesian3D.
 *
 * Fluxes are F = t·D_face·(u_K - u_N) out of K with t = |face|/distance.
 */

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <array>
#include <functional>
#include <span>
#include <vector>

#include "mdtube/diffusion_law.hpp"
#include "mdtube/geometry.hpp"

namespace mdtube {

enum class GridKind { Radial1D, Planar2D, Cartesian3D };

enum class Side { XMin = 0, XMax = 1, YMin = 2, YMax = 3, ZMin = 4, ZMax = 5 };

enum class BoundaryType { Neumann, Dirichlet };

struct BoundaryCondition {
    BoundaryType type = BoundaryType::Neumann;
    std::function<double(const Vec3&)> value;

    static BoundaryCondition neumann() { return {}; }
    static BoundaryCondition dirichlet(double v) {
        return {BoundaryType::Dirichlet, [v](const Vec3&) { return v; }};
    }
    static BoundaryCondition dirichlet(std::function<double(const Vec3&)> f) {
        return {BoundaryType::Dirichlet, std::move(f)};
    }
};

/// A grid face. Interior faces have outside >= 0; boundary faces carry the
/// Dirichlet value (if any) evaluated once at construction.
struct GridFace {
    int inside = -1;
    int outside = -1;
    double transmissibility = 0.0;  ///< |face| / center distance
    double area = 0.0;
    Side side = Side::XMin;
    Vec3 center;
    bool dirichlet = false;
    double dirichlet_value = 0.0;
};

class BulkGrid {
public:
    static BulkGrid radial(double r_outer, int cells);
    static BulkGrid planar(double x_lo, double y_lo, double x_hi, double y_hi, int nx, int ny);
    static BulkGrid cartesian(const Vec3& lo, const Vec3& hi, int nx, int ny, int nz);

    GridKind kind() const { return kind_; }
    int num_cells() const { return n_[0] * n_[1] * n_[2]; }
    const std::array<int, 3>& cells() const { return n_; }
    const Vec3& lo() const { return lo_; }
    const Vec3& hi() const { return hi_; }
    const Vec3& spacing() const { return h_; }
    /// Discretization length: the largest cell extent in the resolved directions.
    double h() const;

    int index(int i, int j, int k) const { return i + n_[0] * (j + n_[1] * k); }
    std::array<int, 3> ijk(int cell) const {
        return {cell % n_[0], (cell / n_[0]) % n_[1], cell / (n_[0] * n_[1])};
    }

    Vec3 center(int cell) const;
    Box box(int cell) const;
    double volume(int cell) const;
    double total_volume() const;
    /// Cell containing p (ties go to the upper cell); -1 outside.
    int locate(const Vec3& p) const;
    /// All cells whose closed box contains p (points on shared faces, edges or
    /// vertices belong to 2, 4 or 8 cells). `tol` is relative to the spacing.
    std::vector<int> locate_all(const Vec3& p, double tol = 1e-9) const;

    void set_boundary(Side side, BoundaryCondition bc);
    const BoundaryCondition& boundary(Side side) const { return bc_[static_cast<int>(side)]; }

    /// Interior faces followed by the faces of Dirichlet sides (zero-flux
    /// sides have none); rebuilt on set_boundary().
    const std::vector<GridFace>& faces() const { return faces_; }

private:
    BulkGrid() = default;
    void build_faces();

    GridKind kind_ = GridKind::Cartesian3D;
    Vec3 lo_, hi_, h_;
    std::array<int, 3> n_{1, 1, 1};
    std::array<BoundaryCondition, 6> bc_{};
    std::vector<GridFace> faces_;
};

enum class FaceAveraging {
    Harmonic,   ///< D_face = 2·D_K·D_N/(D_K + D_N)
    Kirchhoff,  ///< D_face = (T(u_N) - T(u_K))/(u_N - u_K), i.e. TPFA in ψ
};

/// Adds the TPFA flux divergence to residual (rows offset..offset+n) and the
/// analytic Jacobian entries to jac.
void assemble_flux_jacobian(const BulkGrid& grid, const DiffusionLaw& law,
                            const Eigen::VectorXd& u, FaceAveraging averaging,
                            Eigen::Ref<Eigen::VectorXd> residual,
                            std::vector<Eigen::Triplet<double>>& jac, int offset = 0);

/// Flux out of face.inside across the face.
double face_flux(const GridFace& face, const DiffusionLaw& law, const Eigen::VectorXd& u,
                 FaceAveraging averaging);

/// Net outflow through all Dirichlet faces.
double boundary_outflow(const BulkGrid& grid, const DiffusionLaw& law, const Eigen::VectorXd& u,
                        FaceAveraging averaging);

/// Relative discrete L2 error sqrt(Σ|K|(v_K - V_K)² / |Ω_h|) / reference_value.
double bulk_l2_error(const BulkGrid& grid, std::span<const double> numeric,
                     std::span<const double> reference, double reference_value);

double bulk_l2_error(const BulkGrid& grid, std::span<const double> numeric,
                     const std::function<double(const Vec3&)>& reference, double reference_value);

/// Relative L2 error of per-segment-cell sources, normalized by max|Q|.
/// Throws DomainError if every exact source vanishes.
double source_l2_error(std::span<const double> q, std::span<const double> exact);

}  // namespace mdtube
