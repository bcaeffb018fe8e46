#include "mdtube/bulk_grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "mdtube/errors.hpp"

namespace mdtube {

BulkGrid BulkGrid::radial(double r_outer, int cells) {
    if (!(r_outer > 0.0) || cells < 1) throw ConfigError("radial grid: need r_outer > 0, cells >= 1");
    BulkGrid g;
    g.kind_ = GridKind::Radial1D;
    g.lo_ = {0.0, 0.0, 0.0};
    g.hi_ = {r_outer, 0.0, 1.0};
    g.n_ = {cells, 1, 1};
    g.h_ = {r_outer / cells, 0.0, 1.0};
    g.build_faces();
    return g;
}

BulkGrid BulkGrid::planar(double x_lo, double y_lo, double x_hi, double y_hi, int nx, int ny) {
    if (!(x_hi > x_lo) || !(y_hi > y_lo) || nx < 1 || ny < 1)
        throw ConfigError("planar grid: invalid extent or cell counts");
    BulkGrid g;
    g.kind_ = GridKind::Planar2D;
    g.lo_ = {x_lo, y_lo, 0.0};
    g.hi_ = {x_hi, y_hi, 1.0};
    g.n_ = {nx, ny, 1};
    g.h_ = {(x_hi - x_lo) / nx, (y_hi - y_lo) / ny, 1.0};
    g.build_faces();
    return g;
}

BulkGrid BulkGrid::cartesian(const Vec3& lo, const Vec3& hi, int nx, int ny, int nz) {
    if (!(hi.x > lo.x) || !(hi.y > lo.y) || !(hi.z > lo.z) || nx < 1 || ny < 1 || nz < 1)
        throw ConfigError("cartesian grid: invalid extent or cell counts");
    BulkGrid g;
    g.kind_ = GridKind::Cartesian3D;
    g.lo_ = lo;
    g.hi_ = hi;
    g.n_ = {nx, ny, nz};
    g.h_ = {(hi.x - lo.x) / nx, (hi.y - lo.y) / ny, (hi.z - lo.z) / nz};
    g.build_faces();
    return g;
}

double BulkGrid::h() const {
    switch (kind_) {
        case GridKind::Radial1D: return h_.x;
        case GridKind::Planar2D: return std::max(h_.x, h_.y);
        default: return std::max({h_.x, h_.y, h_.z});
    }
}

Vec3 BulkGrid::center(int cell) const {
    const auto [i, j, k] = ijk(cell);
    return {lo_.x + (i + 0.5) * h_.x, lo_.y + (j + 0.5) * h_.y, lo_.z + (k + 0.5) * h_.z};
}

Box BulkGrid::box(int cell) const {
    const auto [i, j, k] = ijk(cell);
    const Vec3 lo{lo_.x + i * h_.x, lo_.y + j * h_.y, lo_.z + k * h_.z};
    return {lo, lo + h_};
}

double BulkGrid::volume(int cell) const {
    if (kind_ == GridKind::Radial1D) {
        const double r0 = lo_.x + ijk(cell)[0] * h_.x, r1 = r0 + h_.x;
        return std::numbers::pi * (r1 * r1 - r0 * r0);
    }
    return h_.x * h_.y * h_.z;
}

double BulkGrid::total_volume() const {
    if (kind_ == GridKind::Radial1D) return std::numbers::pi * hi_.x * hi_.x;
    return (hi_.x - lo_.x) * (hi_.y - lo_.y) * (hi_.z - lo_.z);
}

int BulkGrid::locate(const Vec3& p) const {
    std::array<int, 3> idx{};
    const int dims = kind_ == GridKind::Radial1D ? 1 : (kind_ == GridKind::Planar2D ? 2 : 3);
    for (int a = 0; a < dims; ++a) {
        if (p[a] < lo_[a] || p[a] > hi_[a]) return -1;
        idx[a] = std::min(static_cast<int>(std::floor((p[a] - lo_[a]) / h_[a])), n_[a] - 1);
    }
    return index(idx[0], idx[1], idx[2]);
}

std::vector<int> BulkGrid::locate_all(const Vec3& p, double tol) const {
    const int dims = kind_ == GridKind::Radial1D ? 1 : (kind_ == GridKind::Planar2D ? 2 : 3);
    std::array<std::vector<int>, 3> idx{std::vector<int>{0}, std::vector<int>{0}, std::vector<int>{0}};
    for (int a = 0; a < dims; ++a) {
        const double s = (p[a] - lo_[a]) / h_[a];
        if (s < -tol || s > n_[a] + tol) return {};
        const double nearest = std::round(s);
        idx[a].clear();
        if (std::abs(s - nearest) <= tol) {
            const int k = static_cast<int>(nearest);
            if (k - 1 >= 0) idx[a].push_back(k - 1);
            if (k < n_[a]) idx[a].push_back(k);
        } else {
            idx[a].push_back(std::min(static_cast<int>(std::floor(s)), n_[a] - 1));
        }
    }
    std::vector<int> out;
    for (int k : idx[2])
        for (int j : idx[1])
            for (int i : idx[0]) out.push_back(index(i, j, k));
    return out;
}

void BulkGrid::set_boundary(Side side, BoundaryCondition bc) {
    if (bc.type == BoundaryType::Dirichlet && !bc.value)
        throw ConfigError("Dirichlet boundary condition without a value function");
    if (kind_ == GridKind::Radial1D && side == Side::XMin && bc.type == BoundaryType::Dirichlet)
        throw ConfigError("radial grid: r = 0 is a symmetry axis");
    bc_[static_cast<int>(side)] = std::move(bc);
    build_faces();
}

void BulkGrid::build_faces() {
    faces_.clear();
    const int nx = n_[0], ny = n_[1], nz = n_[2];
    const bool radial = kind_ == GridKind::Radial1D;

    auto area_normal_to = [&](int axis, double r) {
        if (radial) return 2.0 * std::numbers::pi * r;
        if (axis == 0) return h_.y * h_.z;
        if (axis == 1) return h_.x * h_.z;
        return h_.x * h_.y;
    };

    // interior faces
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const int c = index(i, j, k);
                const Vec3 cc = center(c);
                if (i + 1 < nx) {
                    const double r = lo_.x + (i + 1) * h_.x;
                    GridFace f;
                    f.inside = c;
                    f.outside = index(i + 1, j, k);
                    f.area = area_normal_to(0, r);
                    f.transmissibility = f.area / h_.x;
                    f.side = Side::XMax;
                    f.center = {r, cc.y, cc.z};
                    faces_.push_back(f);
                }
                if (!radial && j + 1 < ny) {
                    GridFace f;
                    f.inside = c;
                    f.outside = index(i, j + 1, k);
                    f.area = area_normal_to(1, 0.0);
                    f.transmissibility = f.area / h_.y;
                    f.side = Side::YMax;
                    f.center = {cc.x, lo_.y + (j + 1) * h_.y, cc.z};
                    faces_.push_back(f);
                }
                if (!radial && k + 1 < nz) {
                    GridFace f;
                    f.inside = c;
                    f.outside = index(i, j, k + 1);
                    f.area = area_normal_to(2, 0.0);
                    f.transmissibility = f.area / h_.z;
                    f.side = Side::ZMax;
                    f.center = {cc.x, cc.y, lo_.z + (k + 1) * h_.z};
                    faces_.push_back(f);
                }
            }

    // Dirichlet boundary faces; Neumann faces carry no flux and are omitted
    const int axes = radial ? 1 : 3;
    for (int axis = 0; axis < axes; ++axis) {
        for (int upper = 0; upper < 2; ++upper) {
            const Side side = static_cast<Side>(2 * axis + upper);
            const auto& bc = bc_[static_cast<int>(side)];
            if (bc.type != BoundaryType::Dirichlet) continue;
            const double plane = upper ? hi_[axis] : lo_[axis];
            for (int c = 0; c < num_cells(); ++c) {
                const auto idx = ijk(c);
                if (idx[axis] != (upper ? n_[axis] - 1 : 0)) continue;
                GridFace f;
                f.inside = c;
                f.outside = -1;
                f.side = side;
                f.center = center(c);
                f.center[axis] = plane;
                f.area = area_normal_to(axis, plane);
                f.transmissibility = f.area / (0.5 * h_[axis]);
                f.dirichlet = true;
                f.dirichlet_value = bc.value(f.center);
                faces_.push_back(f);
            }
        }
    }
}

namespace {

struct FaceCoefficient {
    double value;
    double d_inside;   // d(value)/du_inside
    double d_outside;  // d(value)/du_outside
};

FaceCoefficient harmonic(double a, double da, double b, double db) {
    const double s = a + b;
    return {2.0 * (a * b) / s, 2.0 * b * b / (s * s) * da, 2.0 * a * a / (s * s) * db};
}

}  // namespace

void assemble_flux_jacobian(const BulkGrid& grid, const DiffusionLaw& law,
                            const Eigen::VectorXd& u, FaceAveraging averaging,
                            Eigen::Ref<Eigen::VectorXd> residual,
                            std::vector<Eigen::Triplet<double>>& jac, int offset) {
    const int n = grid.num_cells();
    if (averaging == FaceAveraging::Kirchhoff) {
        Eigen::VectorXd psi(n), d(n);
        for (int c = 0; c < n; ++c) {
            psi[c] = law.transform(u[c]);
            d[c] = law.eval(u[c]);
        }
        for (const auto& f : grid.faces()) {
            const int k = f.inside;
            if (f.outside >= 0) {
                const int m = f.outside;
                const double flux = f.transmissibility * (psi[k] - psi[m]);
                residual[k] += flux;
                residual[m] -= flux;
                const double a = f.transmissibility * d[k], b = f.transmissibility * d[m];
                jac.emplace_back(offset + k, offset + k, a);
                jac.emplace_back(offset + k, offset + m, -b);
                jac.emplace_back(offset + m, offset + k, -a);
                jac.emplace_back(offset + m, offset + m, b);
            } else {
                residual[k] += f.transmissibility * (psi[k] - law.transform(f.dirichlet_value));
                jac.emplace_back(offset + k, offset + k, f.transmissibility * d[k]);
            }
        }
        return;
    }

    Eigen::VectorXd d(n), dd(n);
    for (int c = 0; c < n; ++c) {
        d[c] = law.eval(u[c]);
        dd[c] = law.derivative(u[c]);
    }
    for (const auto& f : grid.faces()) {
        const int k = f.inside;
        const double t = f.transmissibility;
        if (f.outside >= 0) {
            const int m = f.outside;
            const auto fc = harmonic(d[k], dd[k], d[m], dd[m]);
            const double du = u[k] - u[m];
            const double flux = t * fc.value * du;
            residual[k] += flux;
            residual[m] -= flux;
            const double dk = t * (fc.value + fc.d_inside * du);
            const double dm = t * (-fc.value + fc.d_outside * du);
            jac.emplace_back(offset + k, offset + k, dk);
            jac.emplace_back(offset + k, offset + m, dm);
            jac.emplace_back(offset + m, offset + k, -dk);
            jac.emplace_back(offset + m, offset + m, -dm);
        } else {
            const double ub = f.dirichlet_value;
            const auto fc = harmonic(d[k], dd[k], law.eval(ub), 0.0);
            const double du = u[k] - ub;
            residual[k] += t * fc.value * du;
            jac.emplace_back(offset + k, offset + k, t * (fc.value + fc.d_inside * du));
        }
    }
}

double face_flux(const GridFace& f, const DiffusionLaw& law, const Eigen::VectorXd& u,
                 FaceAveraging averaging) {
    const double uk = u[f.inside];
    const double un = f.outside >= 0 ? u[f.outside] : f.dirichlet_value;
    if (f.outside < 0 && !f.dirichlet) return 0.0;
    if (averaging == FaceAveraging::Kirchhoff)
        return f.transmissibility * (law.transform(uk) - law.transform(un));
    const double a = law.eval(uk), b = law.eval(un);
    return f.transmissibility * (2.0 * (a * b) / (a + b)) * (uk - un);
}

double boundary_outflow(const BulkGrid& grid, const DiffusionLaw& law, const Eigen::VectorXd& u,
                        FaceAveraging averaging) {
    double total = 0.0;
    for (const auto& f : grid.faces())
        if (f.outside < 0) total += face_flux(f, law, u, averaging);
    return total;
}

double bulk_l2_error(const BulkGrid& grid, std::span<const double> numeric,
                     std::span<const double> reference, double reference_value) {
    if (numeric.size() != static_cast<std::size_t>(grid.num_cells()) ||
        reference.size() != numeric.size())
        throw ConfigError("bulk_l2_error: field sizes do not match the grid");
    double sum = 0.0;
    for (int c = 0; c < grid.num_cells(); ++c) {
        const double e = numeric[c] - reference[c];
        sum += grid.volume(c) * e * e;
    }
    return std::sqrt(sum / grid.total_volume()) / reference_value;
}

double bulk_l2_error(const BulkGrid& grid, std::span<const double> numeric,
                     const std::function<double(const Vec3&)>& reference, double reference_value) {
    std::vector<double> ref(grid.num_cells());
    for (int c = 0; c < grid.num_cells(); ++c) ref[c] = reference(grid.center(c));
    return bulk_l2_error(grid, numeric, ref, reference_value);
}

double source_l2_error(std::span<const double> q, std::span<const double> exact) {
    if (q.size() != exact.size() || q.empty())
        throw ConfigError("source_l2_error: size mismatch or empty");
    double q_ref = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        q_ref = std::max(q_ref, std::abs(exact[i]));
        sum += (q[i] - exact[i]) * (q[i] - exact[i]);
    }
    if (q_ref == 0.0) throw DomainError("source_l2_error: all exact sources are zero");
    return std::sqrt(sum / static_cast<double>(q.size())) / q_ref;
}

}  // namespace mdtube
