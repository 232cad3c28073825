#pragma once

#include <mest/types.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace mest::quad {

// Double-exponential (tanh-sinh / exp-sinh) rules.  Endpoint singularities
// and heavy tails are absorbed by the transform; non-finite evaluations at
// the extreme nodes are treated as zero, which is valid for integrable
// singularities because the weights there are doubly-exponentially small.

namespace detail {
constexpr double kTMax = 4.0;
constexpr int kMaxLevel = 11;
constexpr double kHalfPi = 1.5707963267948966;

template <typename F>
double de_sum(F&& g, double h, bool midpoints_only) {
    double sum = 0.0;
    if (!midpoints_only) {
        const double g0 = g(0.0);
        if (std::isfinite(g0)) sum += g0;
    }
    const double step = midpoints_only ? 2.0 * h : h;
    for (double t = h; t <= kTMax; t += step) {
        const double a = g(t);
        const double b = g(-t);
        if (std::isfinite(a)) sum += a;
        if (std::isfinite(b)) sum += b;
    }
    return sum;
}

template <typename F>
double de_integrate(F&& g, double tol) {
    double h = 0.5;
    double sum = de_sum(g, h, false);
    double prev = h * sum;
    for (int level = 0; level < kMaxLevel; ++level) {
        h *= 0.5;
        sum += de_sum(g, h, true);
        const double cur = h * sum;
        if (level >= 2 && std::abs(cur - prev) <= std::max(tol, 1e-16 * std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}
}  // namespace detail

/// Integral over the finite interval (a, b) by tanh-sinh.  Abscissae are
/// computed as distances from the nearer endpoint, so integrable endpoint
/// singularities are resolved to full precision.
template <typename F>
double integrate_finite(F&& f, double a, double b, double tol = 1e-10) {
    if (a == b) return 0.0;
    if (a > b) return -integrate_finite(f, b, a, tol);
    const double half = 0.5 * (b - a);
    auto g = [&](double t) {
        const double s = detail::kHalfPi * std::sinh(t);
        const double ch = std::cosh(s);
        const double w = detail::kHalfPi * std::cosh(t) / (ch * ch);
        const double d = half * 2.0 / (1.0 + std::exp(2.0 * std::abs(s)));
        const double x = t >= 0.0 ? b - d : a + d;
        if (x <= a || x >= b) return 0.0;
        return w * f(x);
    };
    return half * detail::de_integrate(g, tol / std::max(1.0, half));
}

/// Integral over (a, +inf) by exp-sinh.
template <typename F>
double integrate_to_infinity(F&& f, double a, double tol = 1e-10) {
    auto g = [&](double t) {
        const double s = detail::kHalfPi * std::sinh(t);
        const double ex = std::exp(s);
        const double w = detail::kHalfPi * std::cosh(t) * ex;
        return w * f(a + ex);
    };
    return detail::de_integrate(g, tol);
}

/// Integral over (0, +inf) of a function with interior breakpoints (kinks or
/// density-support edges).  Splits at the breakpoints, integrates each finite
/// segment by tanh-sinh and the tail by exp-sinh.
template <typename F>
double integrate_positive_axis(F&& f, std::vector<double> breakpoints, double tol = 1e-10) {
    breakpoints.erase(
        std::remove_if(breakpoints.begin(), breakpoints.end(),
                       [](double x) { return !(x > 0.0) || !std::isfinite(x); }),
        breakpoints.end());
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

    const double seg_tol = tol / static_cast<double>(breakpoints.size() + 1);
    double total = 0.0;
    double lo = 0.0;
    for (double b : breakpoints) {
        total += integrate_finite(f, lo, b, seg_tol);
        lo = b;
    }
    total += integrate_to_infinity(f, lo, seg_tol);
    return total;
}

/// Classic adaptive Simpson on [a, b]; used for the short score-increment
/// integrals where the integrand is piecewise smooth.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-10, int max_depth = 40) {
    struct Rec {
        const std::remove_reference_t<F>& f;
        int max_depth;
        double run(double a, double fa, double b, double fb, double m, double fm, double whole,
                   double tol, int depth) const {
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double h = b - a;
            const double left = h / 12.0 * (fa + 4.0 * flm + fm);
            const double right = h / 12.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;
            if (depth >= max_depth || std::abs(delta) <= 15.0 * tol)
                return left + right + delta / 15.0;
            return run(a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1) +
                   run(m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1);
        }
    };
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return Rec{f, max_depth}.run(a, fa, b, fb, m, fm, whole, tol, 0);
}

}  // namespace mest::quad
