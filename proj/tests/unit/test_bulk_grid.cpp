#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mdtube/bulk_grid.hpp"
#include "mdtube/errors.hpp"

using namespace mdtube;

namespace {

Eigen::VectorXd residual_of(const BulkGrid& g, const DiffusionLaw& law, const Eigen::VectorXd& u,
                            FaceAveraging avg, Eigen::SparseMatrix<double>* jac = nullptr) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(g.num_cells());
    std::vector<Eigen::Triplet<double>> t;
    assemble_flux_jacobian(g, law, u, avg, r, t);
    if (jac) {
        jac->resize(g.num_cells(), g.num_cells());
        jac->setFromTriplets(t.begin(), t.end());
    }
    return r;
}

}  // namespace

TEST(BulkGrid, RadialMeasures) {
    const auto g = BulkGrid::radial(1.0, 4);
    EXPECT_EQ(g.kind(), GridKind::Radial1D);
    EXPECT_NEAR(g.volume(0), std::numbers::pi * 0.0625, 1e-15);
    EXPECT_NEAR(g.volume(3), std::numbers::pi * (1.0 - 0.5625), 1e-14);
    EXPECT_NEAR(g.total_volume(), std::numbers::pi, 1e-14);
    EXPECT_DOUBLE_EQ(g.h(), 0.25);
}

TEST(BulkGrid, CartesianIndexing) {
    const auto g = BulkGrid::cartesian({0, 0, 0}, {2, 3, 4}, 2, 3, 4);
    EXPECT_EQ(g.num_cells(), 24);
    for (int c = 0; c < g.num_cells(); ++c) {
        const auto ijk = g.ijk(c);
        EXPECT_EQ(g.index(ijk[0], ijk[1], ijk[2]), c);
        EXPECT_EQ(g.locate(g.center(c)), c);
        EXPECT_DOUBLE_EQ(g.volume(c), 1.0);
    }
    EXPECT_EQ(g.locate({-0.1, 0, 0}), -1);
}

TEST(BulkGrid, LocateAllOnSharedVertex) {
    const auto g = BulkGrid::cartesian({0, 0, 0}, {1, 1, 1}, 2, 2, 2);
    EXPECT_EQ(g.locate_all({0.5, 0.5, 0.5}).size(), 8u);
    EXPECT_EQ(g.locate_all({0.5, 0.5, 0.25}).size(), 4u);
    EXPECT_EQ(g.locate_all({0.5, 0.25, 0.25}).size(), 2u);
    EXPECT_EQ(g.locate_all({0.25, 0.25, 0.25}).size(), 1u);
}

TEST(BulkGrid, FaceCountsAndTransmissibility) {
    auto g = BulkGrid::planar(-1, -1, 1, 1, 4, 4);
    int interior = 0, boundary = 0;
    for (const auto& f : g.faces()) (f.outside >= 0 ? interior : boundary)++;
    EXPECT_EQ(interior, 2 * 4 * 3);
    EXPECT_EQ(boundary, 0);  // Neumann sides carry no faces
    // unit-thickness slab: |face| = 0.5, distance 0.5
    EXPECT_DOUBLE_EQ(g.faces().front().transmissibility, 1.0);
    g.set_boundary(Side::XMin, BoundaryCondition::dirichlet(2.0));
    int dirichlet = 0;
    for (const auto& f : g.faces())
        if (f.dirichlet) {
            ++dirichlet;
            EXPECT_DOUBLE_EQ(f.dirichlet_value, 2.0);
            EXPECT_DOUBLE_EQ(f.transmissibility, 2.0);  // half-cell distance
        }
    EXPECT_EQ(dirichlet, 4);
}

TEST(TPFA, LinearFieldIsExactForConstantLaw) {
    auto g = BulkGrid::cartesian({0, 0, 0}, {1, 2, 1}, 5, 4, 3);
    auto lin = [](const Vec3& p) { return 1.0 + 2.0 * p.x - 0.5 * p.y + 0.3 * p.z; };
    for (int s = 0; s < 6; ++s) g.set_boundary(static_cast<Side>(s), BoundaryCondition::dirichlet(lin));
    Eigen::VectorXd u(g.num_cells());
    for (int c = 0; c < g.num_cells(); ++c) u[c] = lin(g.center(c));
    const auto law = DiffusionLaw::constant(0.8);
    for (auto avg : {FaceAveraging::Harmonic, FaceAveraging::Kirchhoff})
        EXPECT_LT(residual_of(g, law, u, avg).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(TPFA, KirchhoffAveragingSolvesTransformedProblemExactly) {
    // ψ = T(u) linear in x makes every Kirchhoff face flux identical
    auto g = BulkGrid::planar(0, 0, 1, 1, 6, 3);
    const auto law = DiffusionLaw::exponential(0.5, 2.0, 1e-6);
    auto psi = [](const Vec3& p) { return 0.1 + 0.4 * p.x; };
    for (Side s : {Side::XMin, Side::XMax})
        g.set_boundary(s, BoundaryCondition::dirichlet([&](const Vec3& p) { return law.inverse_transform(psi(p)); }));
    Eigen::VectorXd u(g.num_cells());
    for (int c = 0; c < g.num_cells(); ++c) u[c] = law.inverse_transform(psi(g.center(c)));
    EXPECT_LT(residual_of(g, law, u, FaceAveraging::Kirchhoff).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(TPFA, JacobianMatchesFiniteDifferences) {
    auto g = BulkGrid::cartesian({0, 0, 0}, {1, 1, 1}, 3, 3, 2);
    g.set_boundary(Side::XMin, BoundaryCondition::dirichlet(0.2));
    g.set_boundary(Side::ZMax, BoundaryCondition::dirichlet(1.1));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-0.5, 1.5);
    Eigen::VectorXd u(g.num_cells());
    for (auto& x : u) x = d(rng);
    const auto law = DiffusionLaw::exponential(0.5, 3.0, 1e-6);
    for (auto avg : {FaceAveraging::Harmonic, FaceAveraging::Kirchhoff}) {
        Eigen::SparseMatrix<double> jac;
        residual_of(g, law, u, avg, &jac);
        const Eigen::MatrixXd dense(jac);
        for (int j = 0; j < u.size(); ++j) {
            Eigen::VectorXd up = u, um = u;
            up[j] += 1e-6;
            um[j] -= 1e-6;
            const Eigen::VectorXd col = (residual_of(g, law, up, avg) - residual_of(g, law, um, avg)) / 2e-6;
            EXPECT_LT((col - dense.col(j)).cwiseAbs().maxCoeff(), 1e-7 * std::max(1.0, dense.cwiseAbs().maxCoeff()));
        }
    }
}

TEST(TPFA, FluxAntisymmetryIsExact) {
    const auto g = BulkGrid::cartesian({0, 0, 0}, {1, 1, 1}, 3, 3, 3);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    Eigen::VectorXd u(g.num_cells());
    for (auto& x : u) x = d(rng);
    const auto law = DiffusionLaw::exponential(0.5, 5.0, 1e-6);
    for (auto avg : {FaceAveraging::Harmonic, FaceAveraging::Kirchhoff})
        for (const auto& f : g.faces()) {
            if (f.outside < 0) continue;
            GridFace flipped = f;
            std::swap(flipped.inside, flipped.outside);
            EXPECT_EQ(face_flux(f, law, u, avg), -face_flux(flipped, law, u, avg));
        }
}

TEST(TPFA, ResidualSumEqualsBoundaryOutflow) {
    auto g = BulkGrid::cartesian({0, 0, 0}, {1, 1, 1}, 4, 3, 3);
    g.set_boundary(Side::XMin, BoundaryCondition::dirichlet(0.0));
    g.set_boundary(Side::YMax, BoundaryCondition::dirichlet(1.0));
    Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(g.num_cells(), -0.3, 1.2);
    const auto law = DiffusionLaw::exponential(0.5, 1.0, 1e-6);
    for (auto avg : {FaceAveraging::Harmonic, FaceAveraging::Kirchhoff}) {
        const double sum = residual_of(g, law, u, avg).sum();
        EXPECT_NEAR(sum, boundary_outflow(g, law, u, avg), 1e-13);
    }
}

TEST(L2Error, TwoCellExample) {
    const auto g = BulkGrid::cartesian({0, 0, 0}, {2, 1, 1}, 2, 1, 1);
    const std::vector<double> num{1.1, 0.9}, ref{1.0, 1.0};
    EXPECT_NEAR(bulk_l2_error(g, num, ref, 1.0), 0.1, 1e-15);
    EXPECT_DOUBLE_EQ(bulk_l2_error(g, ref, ref, 1.0), 0.0);
}

TEST(L2Error, Homogeneous) {
    const auto g = BulkGrid::radial(1.0, 7);
    std::vector<double> ref(7), num(7), scaled(7);
    for (int i = 0; i < 7; ++i) {
        ref[i] = std::sin(i);
        num[i] = ref[i] + 0.01 * std::cos(3 * i);
        scaled[i] = ref[i] - 0.035 * std::cos(3 * i);
    }
    EXPECT_NEAR(bulk_l2_error(g, scaled, ref, 1.0), 3.5 * bulk_l2_error(g, num, ref, 1.0), 1e-15);
    EXPECT_NEAR(bulk_l2_error(g, num, ref, 0.1), 10.0 * bulk_l2_error(g, num, ref, 1.0), 1e-14);
}

TEST(L2Error, SourceErrorNormalization) {
    const std::vector<double> q{1.0, -2.2, 0.5}, exact{1.0, -2.0, 0.5};
    EXPECT_NEAR(source_l2_error(q, exact), std::sqrt(0.04 / 3.0) / 2.0, 1e-15);
    const std::vector<double> zero{0.0, 0.0};
    EXPECT_THROW(source_l2_error(zero, zero), DomainError);
}
