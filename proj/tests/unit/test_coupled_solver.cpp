#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mdtube/analytic_reference.hpp"
#include "mdtube/coupled_solver.hpp"
#include "mdtube/errors.hpp"

using namespace mdtube;

namespace {

struct Setup {
    BulkGrid grid = BulkGrid::cartesian({-0.5, -0.5, -1.0}, {0.5, 0.5, 0.0}, 5, 5, 6);
    NetworkMesh mesh;
    CouplingMap coupling;
};

// A branched network with a Dirichlet top node in a box open on five sides.
Setup branched(bool delta = true) {
    Setup s;
    for (Side side : {Side::XMin, Side::XMax, Side::YMin, Side::YMax, Side::ZMin})
        s.grid.set_boundary(side, BoundaryCondition::dirichlet(0.7));
    TubeNetwork net;
    net.add_node(0, {0.03, -0.02, 0.0});
    net.add_node(1, {0.03, -0.02, -0.45});
    net.add_node(2, {0.3, 0.25, -0.8});
    net.add_node(3, {-0.2, -0.15, -0.7});
    net.add_segment(0, 0, 1, 0.02, 3.0, 1.0, 0.5);
    net.add_segment(1, 1, 2, 0.015, 3.0, 1.5, 0.4);
    net.add_segment(2, 1, 3, 0.012, 3.0, 2.0, 0.3);
    net.set_boundary(0, {true, 0.1});
    s.mesh = discretize(net, 0.12);
    CouplingOptions co;
    co.mean_distance = delta;
    s.coupling = build_coupling(s.grid, s.mesh, co);
    return s;
}

}  // namespace

TEST(CoupledSolver, ConservesMassAtConvergence) {
    const auto s = branched();
    const auto law = DiffusionLaw::exponential(0.5, 2.0, 1e-6);
    for (auto avg : {FaceAveraging::Kirchhoff, FaceAveraging::Harmonic}) {
        CoupledOptions co;
        co.averaging = avg;
        const CoupledSystem sys(s.grid, s.mesh, s.coupling, law, co);
        const auto st = sys.solve(sys.initial_guess(0.7, 0.3));
        ASSERT_TRUE(st.converged);
        const double total = sys.total_source(st);
        EXPECT_LT(total, 0.0);  // the network drains the bulk
        EXPECT_NEAR(sys.deposited_source(st), total, 1e-12 * std::abs(total));
        EXPECT_NEAR(sys.bulk_boundary_outflow(st), total, 1e-10 * std::abs(total));
        EXPECT_NEAR(sys.network_boundary_inflow(st), total, 1e-10 * std::abs(total));
        // discrete maximum principle for this monotone setup
        EXPECT_LE(st.u_b.maxCoeff(), 0.7 + 1e-12);
        EXPECT_GE(st.u_e.minCoeff(), 0.1 - 1e-12);
    }
}

TEST(CoupledSolver, JacobianMatchesFiniteDifferences) {
    const auto s = branched();
    const auto law = DiffusionLaw::exponential(0.5, 3.0, 1e-6);
    for (auto avg : {FaceAveraging::Kirchhoff, FaceAveraging::Harmonic}) {
        CoupledOptions co;
        co.averaging = avg;
        const CoupledSystem sys(s.grid, s.mesh, s.coupling, law, co);
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> d(0.1, 0.8);
        Eigen::VectorXd x(sys.num_unknowns());
        for (auto& v : x) v = d(rng);
        Eigen::VectorXd r, rp, rm;
        Eigen::SparseMatrix<double> jac;
        sys.evaluate(x, r, &jac);
        const Eigen::MatrixXd dense(jac);
        const double scale = dense.cwiseAbs().maxCoeff();
        double worst = 0.0;
        for (int j = 0; j < x.size(); ++j) {
            Eigen::VectorXd xp = x, xm = x;
            xp[j] += 1e-6;
            xm[j] -= 1e-6;
            sys.evaluate(xp, rp, nullptr);
            sys.evaluate(xm, rm, nullptr);
            worst = std::max(worst, ((rp - rm) / 2e-6 - dense.col(j)).cwiseAbs().maxCoeff());
        }
        EXPECT_LT(worst / scale, 1e-5);
    }
}

TEST(CoupledSolver, NoExchangeWithZeroGamma) {
    const SingleTubeParams p{.radius = 0.01, .rho = 0.05, .u_hat = 0.5, .u_e = 0.1, .gamma = 0.0};
    TubeNetwork net;
    net.add_node(0, {0, 0, 0});
    net.add_node(1, {0, 0, 1});
    net.add_segment(0, 0, 1, p.radius, 5.0, 0.0, 0.0);
    const auto mesh = discretize(net, 10.0);
    auto grid = BulkGrid::radial(1.0, 20);
    grid.set_boundary(Side::XMax, BoundaryCondition::dirichlet(0.42));
    const auto cp = build_coupling(grid, mesh);
    CoupledOptions co;
    co.prescribed_network = true;
    co.prescribed_u_e = {p.u_e};
    const CoupledSystem sys(grid, mesh, cp, DiffusionLaw::exponential(0.5, 1.0, 1e-6), co);
    const auto st = sys.solve(sys.initial_guess(0.3, p.u_e));
    EXPECT_LT((st.u_b.array() - 0.42).abs().maxCoeff(), 1e-12);
    EXPECT_EQ(st.interface[0].q, 0.0);
}

TEST(CoupledSolver, SingleTubeSecondOrder) {
    const SingleTubeParams p;
    const auto law = DiffusionLaw::exponential(0.5, 1.0, 1e-6);
    const SingleTubeSolution ref(p, law);
    TubeNetwork net;
    net.add_node(0, {0, 0, 0});
    net.add_node(1, {0, 0, 1});
    net.add_segment(0, 0, 1, p.radius, p.rho / p.radius, p.gamma, 0.0);
    const auto mesh = discretize(net, 10.0);
    std::vector<double> eq;
    for (int n : {40, 80, 160}) {
        auto grid = BulkGrid::radial(1.0, n);
        grid.set_boundary(Side::XMax, BoundaryCondition::dirichlet(ref.u(1.0)));
        const auto cp = build_coupling(grid, mesh);
        CoupledOptions co;
        co.prescribed_network = true;
        co.prescribed_u_e = {p.u_e};
        const CoupledSystem sys(grid, mesh, cp, law, co);
        const auto st = sys.solve(sys.initial_guess(ref.u(1.0), p.u_e));
        const std::vector<double> q{st.interface[0].q}, qe{ref.q()};
        eq.push_back(source_l2_error(q, qe));
    }
    EXPECT_GT(std::log2(eq[0] / eq[1]), 1.8);
    EXPECT_GT(std::log2(eq[1] / eq[2]), 1.8);
}

TEST(CoupledSolver, PrescribedNetworkMatchesConvergedFullSolve) {
    const auto s = branched(false);
    const auto law = DiffusionLaw::exponential(0.5, 1.0, 1e-6);
    const CoupledSystem full(s.grid, s.mesh, s.coupling, law);
    const auto a = full.solve(full.initial_guess(0.7, 0.3));
    CoupledOptions co;
    co.prescribed_network = true;
    co.prescribed_u_e.assign(a.u_e.data(), a.u_e.data() + a.u_e.size());
    const CoupledSystem fixed(s.grid, s.mesh, s.coupling, law, co);
    EXPECT_EQ(fixed.num_unknowns(), s.grid.num_cells());
    const auto b = fixed.solve(fixed.initial_guess(0.7, 0.0));
    EXPECT_LT((a.u_b - b.u_b).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(CoupledSolver, LinearSolversAgree) {
    const auto s = branched();
    const auto law = DiffusionLaw::exponential(0.5, 1.0, 1e-6);
    const CoupledSystem sys(s.grid, s.mesh, s.coupling, law);
    Eigen::VectorXd r;
    Eigen::SparseMatrix<double> jac;
    sys.evaluate(sys.initial_guess(0.6, 0.2), r, &jac);
    const auto lu = solve_linear(jac, r, LinearSolverKind::SparseLU);
    const auto it = solve_linear(jac, r, LinearSolverKind::BiCGSTAB);
    const auto au = solve_linear(jac, r, LinearSolverKind::Auto);
    EXPECT_LT((jac * lu - r).norm(), 1e-10 * r.norm());
    EXPECT_LT((lu - it).cwiseAbs().maxCoeff(), 1e-6 * lu.cwiseAbs().maxCoeff());
    EXPECT_EQ(au, lu);  // small systems go to the direct solver
}

TEST(CoupledSolver, HistoryRecordsConvergence) {
    const auto s = branched();
    const CoupledSystem sys(s.grid, s.mesh, s.coupling, DiffusionLaw::exponential(0.5, 1.0, 1e-6));
    const auto st = sys.solve(sys.initial_guess(0.7, 0.3));
    ASSERT_GE(st.history.size(), 2u);
    EXPECT_EQ(st.history.front().iteration, 0);
    EXPECT_LT(st.history.back().residual_inf, 1e-8 * st.history.front().residual_inf);
}

TEST(CoupledSolver, ReportsNonConvergence) {
    const auto s = branched();
    const CoupledSystem sys(s.grid, s.mesh, s.coupling, DiffusionLaw::exponential(0.5, 1.0, 1e-6));
    NewtonControls nc;
    nc.max_iterations = 1;
    nc.polish_iterations = 0;
    try {
        sys.solve(sys.initial_guess(5.0, -3.0), nc);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_FALSE(e.history().empty());
    }
}
