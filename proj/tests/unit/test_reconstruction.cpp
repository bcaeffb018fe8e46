#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mdtube/errors.hpp"
#include "mdtube/reconstruction.hpp"

using namespace mdtube;

namespace {

ReconstructionInput sample_input() {
    ReconstructionInput in;
    in.u_b_delta = 0.6;
    in.u_e = 0.1;
    in.radius = 0.01;
    in.rho = 0.05;
    in.delta = 0.02;
    in.gamma = 1.0;
    return in;
}

}  // namespace

TEST(KernelProfile, ContinuousAtKernelRadius) {
    const double r = 0.01, rho = 0.05;
    EXPECT_NEAR(kernel_profile_f(rho * (1 - 1e-12), r, rho), kernel_profile_f(rho * (1 + 1e-12), r, rho), 1e-11);
    EXPECT_NEAR(kernel_profile_f(0.3, r, rho), std::log(30.0) / (2 * std::numbers::pi), 1e-15);
    // line source: rho = R gives f(R) = 0
    EXPECT_NEAR(kernel_profile_f(r, r, r), 0.0, 1e-15);
    // inside: (1/2π)(d²/(2ρ²) + ln(ρ/R) − 1/2)
    EXPECT_NEAR(kernel_profile_f(0.0, r, rho), (std::log(5.0) - 0.5) / (2 * std::numbers::pi), 1e-15);
}

TEST(Reconstruction, ConstantLawClosedForm) {
    const double d = 0.7;
    const auto law = DiffusionLaw::constant(d);
    auto in = sample_input();
    const double f = 2 * std::numbers::pi * in.radius * in.gamma * kernel_profile_f(in.delta, in.radius, in.rho);
    const auto res = reconstruct_interface(in, law);
    EXPECT_NEAR(res.u_hat, (d * in.u_b_delta + f * in.u_e) / (d + f), 1e-12);
    EXPECT_NEAR(res.q, -2 * std::numbers::pi * in.radius * in.gamma * (res.u_hat - in.u_e), 1e-14);
    EXPECT_NEAR(res.du_hat_du_b, d / (d + f), 1e-12);
    EXPECT_NEAR(res.du_hat_du_e, f / (d + f), 1e-12);
}

TEST(Reconstruction, SolvesTheTransformedEquation) {
    for (double k : {1.0, 5.0}) {
        const auto law = DiffusionLaw::exponential(0.5, k, 1e-6);
        const auto in = sample_input();
        const auto res = reconstruct_interface(in, law);
        const double p = 2 * std::numbers::pi * in.radius;
        const double g = law.transform(in.u_b_delta) - law.transform(res.u_hat) -
                         p * in.gamma * kernel_profile_f(in.delta, in.radius, in.rho) * (res.u_hat - in.u_e);
        EXPECT_NEAR(g, 0.0, 1e-13);
        // û lies between u_e and u_b,δ
        EXPECT_GT(res.u_hat, in.u_e);
        EXPECT_LT(res.u_hat, in.u_b_delta);
    }
}

TEST(Reconstruction, DerivativesMatchFiniteDifferences) {
    const auto law = DiffusionLaw::exponential(0.5, 3.0, 1e-6);
    const auto in = sample_input();
    const auto res = reconstruct_interface(in, law);
    const double h = 1e-6;
    auto shifted = [&](double dub, double due) {
        auto x = in;
        x.u_b_delta += dub;
        x.u_e += due;
        return reconstruct_interface(x, law);
    };
    EXPECT_NEAR(res.dq_du_b, (shifted(h, 0).q - shifted(-h, 0).q) / (2 * h), 1e-7);
    EXPECT_NEAR(res.dq_du_e, (shifted(0, h).q - shifted(0, -h).q) / (2 * h), 1e-7);
    EXPECT_NEAR(res.du_hat_du_b, (shifted(h, 0).u_hat - shifted(-h, 0).u_hat) / (2 * h), 1e-7);
}

TEST(Reconstruction, NoExchangeWithoutDrivingDifference) {
    const auto law = DiffusionLaw::exponential(0.5, 1.0, 1e-6);
    auto in = sample_input();
    in.u_e = in.u_b_delta;
    const auto res = reconstruct_interface(in, law);
    EXPECT_NEAR(res.u_hat, in.u_e, 1e-14);
    EXPECT_NEAR(res.q, 0.0, 1e-15);
    in = sample_input();
    in.gamma = 0.0;
    EXPECT_NEAR(reconstruct_interface(in, law).q, 0.0, 0.0);
}

TEST(Reconstruction, GeometryChecks) {
    const auto law = DiffusionLaw::constant(1.0);
    auto in = sample_input();
    in.delta = in.rho;
    EXPECT_THROW(reconstruct_interface(in, law), DomainError);
    in = sample_input();
    in.rho = 0.5 * in.radius;
    EXPECT_THROW(reconstruct_interface(in, law), DomainError);
    in = sample_input();
    in.rho = 1.2 * in.radius;  // ln(ρ/R) < 1/2
    in.delta = 0.005;
    EXPECT_TRUE(reconstruct_interface(in, law).uniqueness_warning);
    EXPECT_FALSE(reconstruct_interface(sample_input(), law).uniqueness_warning);
}

TEST(ErrorBounds, Values) {
    EXPECT_NEAR(neighbor_error_bound(0.1, 1.1), 0.01 / (4 * std::numbers::pi), 1e-15);
    EXPECT_THROW(neighbor_error_bound(0.1, 0.1), DomainError);
    EXPECT_DOUBLE_EQ(mvt_error_bound(DiffusionLaw::constant(1.0), 0.0, 1.0, 0.1, 1.0), 0.0);
    // max|D'| of 0.5 e^{u-1} on [0,1] is 0.5
    EXPECT_NEAR(mvt_error_bound(DiffusionLaw::exponential(0.5, 1.0, 1e-6), 0.0, 1.0, 0.2, 2.0), 0.5 * 0.5 * 0.04 / 2.0,
                1e-6);
}
