#include "mdtube/numerics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace mdtube {

RootResult brent(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_iterations) {
    return brent(f, a, b, f(a), f(b), abs_tol, max_iterations);
}

RootResult brent(const std::function<double(double)>& f, double a, double b,
                 double fa, double fb, double abs_tol, int max_iterations) {
    if (fa == 0.0) return {a, 0.0, 0};
    if (fb == 0.0) return {b, 0.0, 0};
    if ((fa > 0.0) == (fb > 0.0)) {
        std::ostringstream msg;
        msg << "brent: no sign change on [" << a << ", " << b << "] (f = " << fa << ", " << fb
            << ")";
        throw NumericError(msg.str());
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double c = b, fc = fb, d = b - a, e = d;
    for (int iter = 1; iter <= max_iterations; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 2.0 * eps * std::abs(b) + 0.5 * abs_tol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) return {b, fb, iter};

        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0)
                q = -q;
            else
                p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
    }
    std::ostringstream msg;
    msg << "brent: no convergence after " << max_iterations << " iterations near " << b;
    throw NumericError(msg.str(), std::abs(c - b));
}

Bracket expand_bracket(const std::function<double(double)>& f, double lo, double hi,
                       int max_expansions) {
    if (lo > hi) std::swap(lo, hi);
    double width = hi - lo;
    if (width <= 0.0) width = std::max(1.0, std::abs(lo)) * 1e-8;
    lo = lo - 0.1 * width;
    hi = hi + 0.1 * width;
    double f_lo = f(lo), f_hi = f(hi);
    for (int i = 0; i < max_expansions; ++i) {
        if ((f_lo > 0.0) != (f_hi > 0.0) || f_lo == 0.0 || f_hi == 0.0)
            return {lo, hi, f_lo, f_hi};
        width = hi - lo;
        lo -= width;
        hi += width;
        f_lo = f(lo);
        f_hi = f(hi);
    }
    if ((f_lo > 0.0) != (f_hi > 0.0) || f_lo == 0.0 || f_hi == 0.0) return {lo, hi, f_lo, f_hi};
    std::ostringstream msg;
    msg << "bracket expansion failed, last interval [" << lo << ", " << hi << "]";
    throw DomainError(msg.str());
}

QuadratureResult tanh_sinh(const std::function<double(double)>& f, double a, double b,
                           const TanhSinhOptions& options) {
    QuadratureResult out;
    if (a == b) return out;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    constexpr double half_pi = 0.5 * std::numbers::pi;
    constexpr double t_max = 3.5;
    const double hw = 0.5 * (b - a);

    double sum = 0.0;
    double abs_sum = 0.0;
    auto add_point = [&](double t) {
        const double u = half_pi * std::sinh(t);
        const double ch = std::cosh(u);
        const double weight = half_pi * std::cosh(t) / (ch * ch);
        // distance from the nearest endpoint, computed without cancellation
        const double complement = 2.0 / (1.0 + std::exp(2.0 * std::abs(u)));
        const double offset = hw * complement;
        if (t == 0.0) {
            const double v = f(a + hw);
            sum += weight * v;
            abs_sum += weight * std::abs(v);
            ++out.evaluations;
            return;
        }
        if (offset <= 0.0) return;
        const double vl = f(a + offset);
        const double vr = f(b - offset);
        sum += weight * (vl + vr);
        abs_sum += weight * (std::abs(vl) + std::abs(vr));
        out.evaluations += 2;
    };

    double h = 1.0;
    for (double t = 0.0; t <= t_max; t += h) add_point(t);
    double previous = hw * h * sum;

    for (int level = 1; level <= options.max_levels; ++level) {
        h *= 0.5;
        for (double t = h; t <= t_max; t += 2.0 * h) add_point(t);
        const double current = hw * h * sum;
        out.value = sign * current;
        out.abs_integral = hw * h * abs_sum;
        out.error_estimate = std::abs(current - previous);
        out.levels = level;
        const double tol = std::max(options.abs_tol, options.rel_tol * out.abs_integral);
        if (level >= 3 && out.error_estimate <= tol) return out;
        previous = current;
    }
    if (out.error_estimate <= 1e3 * std::max(options.abs_tol, options.rel_tol * out.abs_integral))
        return out;  // stagnation at round-off level
    std::ostringstream msg;
    msg << "tanh-sinh quadrature on [" << a << ", " << b << "] did not converge, estimate "
        << out.error_estimate;
    throw NumericError(msg.str(), out.error_estimate);
}

namespace {

GaussRule build_gauss(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 2.0;
    }
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    if (order < 1) throw ConfigError("gauss_legendre: order must be >= 1");
    std::lock_guard lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, build_gauss(order)).first;
    return it->second;
}

}  // namespace mdtube
