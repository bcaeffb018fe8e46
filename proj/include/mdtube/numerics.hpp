#pragma once

/**
 * @file numerics.hpp
 * @brief Scalar numerical kernels shared by all modules.
 *
 * Brent's bracketed root finder, tanh-sinh (double-exponential) quadrature
 * and Gauss-Legendre rules. Everything here is a pure function.
 */

#include <cstddef>
#include <functional>
#include <vector>

#include "mdtube/errors.hpp"

namespace mdtube {

struct RootResult {
    double root = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/// Brent's method on a bracket [a, b] with f(a)·f(b) <= 0.
/// Throws NumericError if the bracket is invalid or the iteration budget is exhausted.
RootResult brent(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_iterations = 200);

/// Same as brent() with precomputed endpoint values.
RootResult brent(const std::function<double(double)>& f, double a, double b,
                 double fa, double fb, double abs_tol, int max_iterations = 200);

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
    double f_lo = 0.0;
    double f_hi = 0.0;
};

/// Expands [lo, hi] geometrically (width doubling on both sides) until f changes sign.
/// Throws DomainError after max_expansions.
Bracket expand_bracket(const std::function<double(double)>& f, double lo, double hi,
                       int max_expansions = 60);

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    double abs_integral = 0.0;  ///< integral of |f|, used as the error scale
    int levels = 0;
    int evaluations = 0;
};

struct TanhSinhOptions {
    double rel_tol = 1e-12;  ///< relative to the integral of |f|
    double abs_tol = 0.0;
    int max_levels = 12;
};

/// Tanh-sinh quadrature of f over [a, b]. Endpoints are never evaluated, so
/// integrable endpoint singularities and derivative cusps are handled.
/// Throws NumericError (carrying the achieved estimate) if max_levels is reached
/// without meeting the tolerance.
QuadratureResult tanh_sinh(const std::function<double(double)>& f, double a, double b,
                           const TanhSinhOptions& options = {});

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

}  // namespace mdtube
