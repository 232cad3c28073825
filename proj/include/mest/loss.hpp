#pragma once

#include <mest/reports.hpp>
#include <mest/types.hpp>

#include <cmath>
#include <type_traits>
#include <utility>
#include <vector>

namespace mest {

enum class LossKind { huber, power, quantile };

/// Convex loss rho with one-sided derivatives psi- and psi+ and a selected
/// score psi with psi-(u) <= psi(u) <= psi+(u).  At kinks the selection is
/// the midpoint (psi- + psi+)/2, so LAD selects psi(0) = 0 and the
/// alpha-quantile loss selects psi(0) = alpha - 1/2.
///
/// Immutable after construction; safe to share across threads.
class ConvexLoss {
  public:
    static ConvexLoss huber(double c) {
        if (!(c > 0.0)) throw ConfigError("huber: c must be positive");
        return ConvexLoss(LossKind::huber, c);
    }
    static ConvexLoss power(double q) {
        if (!(q >= 1.0 && q <= 2.0)) throw ConfigError("power: q must lie in [1,2]");
        return ConvexLoss(LossKind::power, q);
    }
    static ConvexLoss quantile(double alpha) {
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("quantile: alpha must lie in (0,1)");
        return ConvexLoss(LossKind::quantile, alpha);
    }

    LossKind kind() const { return kind_; }
    double param() const { return param_; }

  private:
    ConvexLoss(LossKind k, double p) : kind_(k), param_(p) {}
    LossKind kind_;
    double param_;
};

/// rho(x) for the three families:
///   huber:    x^2/2 on |x|<=c, c|x| - c^2/2 outside
///   power:    |x|^q, 1 <= q <= 2
///   quantile: alpha x^+ + (1-alpha)(-x)^+
template <typename Scalar>
    requires std::is_arithmetic_v<Scalar>
Scalar rho(const ConvexLoss& loss, Scalar x) {
    const Scalar p = static_cast<Scalar>(loss.param());
    switch (loss.kind()) {
        case LossKind::huber: {
            const Scalar ax = std::abs(x);
            return ax <= p ? x * x / Scalar(2) : p * ax - p * p / Scalar(2);
        }
        case LossKind::power:
            return std::pow(std::abs(x), p);
        default: {  // quantile
            return x >= Scalar(0) ? p * x : (p - Scalar(1)) * x;
        }
    }
}

/// Selected score psi(u); midpoint selection at kinks.
template <typename Scalar>
    requires std::is_arithmetic_v<Scalar>
Scalar psi(const ConvexLoss& loss, Scalar u) {
    const Scalar p = static_cast<Scalar>(loss.param());
    switch (loss.kind()) {
        case LossKind::huber:
            return std::clamp(u, -p, p);
        case LossKind::power: {
            // Midpoint selection at the kink: 0 for q = 1, and the continuous
            // limit for q > 1, so the q < 1.01 regime needs no special case
            // beyond this branch.
            if (u == Scalar(0)) return Scalar(0);
            if (p == Scalar(1)) return u > Scalar(0) ? Scalar(1) : Scalar(-1);
            return p * (u > Scalar(0) ? Scalar(1) : Scalar(-1)) * std::pow(std::abs(u), p - Scalar(1));
        }
        default: {  // quantile
            if (u > Scalar(0)) return p;
            if (u < Scalar(0)) return p - Scalar(1);
            return p - Scalar(0.5);
        }
    }
}

/// Exact one-sided derivatives (psi-(u), psi+(u)); closed forms, no numerics.
template <typename Scalar>
    requires std::is_arithmetic_v<Scalar>
std::pair<Scalar, Scalar> psi_one_sided(const ConvexLoss& loss, Scalar u) {
    const Scalar p = static_cast<Scalar>(loss.param());
    switch (loss.kind()) {
        case LossKind::huber: {
            const Scalar v = std::clamp(u, -p, p);
            return {v, v};
        }
        case LossKind::power: {
            if (p == Scalar(1)) {
                if (u > Scalar(0)) return {Scalar(1), Scalar(1)};
                if (u < Scalar(0)) return {Scalar(-1), Scalar(-1)};
                return {Scalar(-1), Scalar(1)};
            }
            const Scalar v = psi(loss, u);
            return {v, v};
        }
        default: {  // quantile
            if (u > Scalar(0)) return {p, p};
            if (u < Scalar(0)) return {p - Scalar(1), p - Scalar(1)};
            return {p - Scalar(1), p};
        }
    }
}

inline Array rho(const ConvexLoss& loss, const Array& x) {
    return x.unaryExpr([&loss](double v) { return rho(loss, v); });
}

inline Array psi(const ConvexLoss& loss, const Array& u) {
    return u.unaryExpr([&loss](double v) { return psi(loss, v); });
}

/// Locations where the selected psi is non-smooth (jump or derivative kink).
inline std::vector<double> psi_kinks(const ConvexLoss& loss) {
    switch (loss.kind()) {
        case LossKind::huber:
            return {-loss.param(), loss.param()};
        case LossKind::power:
            return loss.param() == 2.0 ? std::vector<double>{} : std::vector<double>{0.0};
        default:
            return {0.0};
    }
}

/// sup |psi|; +inf for unbounded scores (power with q > 1).
inline double psi_sup(const ConvexLoss& loss) {
    switch (loss.kind()) {
        case LossKind::huber:
            return loss.param();
        case LossKind::power:
            return loss.param() == 1.0 ? 1.0 : std::numeric_limits<double>::infinity();
        default:
            return std::max(loss.param(), 1.0 - loss.param());
    }
}

/// Growth order r of |psi(u)| ~ |u|^r; 0 for bounded scores.  E|psi(e)| is
/// finite exactly when the error law has a finite r-th absolute moment.
inline double psi_moment_order(const ConvexLoss& loss) {
    return loss.kind() == LossKind::power ? loss.param() - 1.0 : 0.0;
}

struct GridSpec {
    double u_min = -50.0;
    double u_max = 50.0;
    double u_step = 0.01;
    std::vector<double> h_fractions = {0.1, 0.5, 1.0 - 1e-6};  // multiples of delta
};

/// Increment-bound evidence: C0 = sup over the grid of psi(u+h) - psi(u) for
/// h in (0, delta), plus the closed-form supremum for each family
/// (huber min(delta, 2c); LAD 2; power 2q(delta/2)^(q-1); quantile 1).
inline ConditionReport increment_bound(const ConvexLoss& loss, double delta,
                                       const GridSpec& grid = {}) {
    if (!(delta > 0.0)) throw ConfigError("increment_bound: delta must be positive");
    if (!(grid.u_step > 0.0) || grid.u_min >= grid.u_max || grid.h_fractions.empty())
        throw ConfigError("increment_bound: empty grid");

    ConditionReport report;
    report.delta = delta;
    double sup = 0.0;
    for (double frac : grid.h_fractions) {
        const double h = delta * frac;
        double row_sup = 0.0;
        for (double u = grid.u_min; u <= grid.u_max; u += grid.u_step) {
            row_sup = std::max(row_sup, psi(loss, u + h) - psi(loss, u));
        }
        // kink-straddling probes the plain grid can miss
        for (double k : psi_kinks(loss)) {
            row_sup = std::max(row_sup, psi(loss, k + h * 0.5) - psi(loss, k - h * 0.5));
            row_sup = std::max(row_sup, psi(loss, k + h * 0.999) - psi(loss, k - h * 0.001));
        }
        report.evidence_grid.emplace_back(h, row_sup);
        sup = std::max(sup, row_sup);
    }
    report.c0 = sup;

    switch (loss.kind()) {
        case LossKind::huber:
            report.c0_closed = std::min(delta, 2.0 * loss.param());
            break;
        case LossKind::power: {
            const double q = loss.param();
            report.c0_closed = q == 1.0 ? 2.0 : 2.0 * q * std::pow(delta / 2.0, q - 1.0);
            break;
        }
        default:
            report.c0_closed = 1.0;
            break;
    }
    report.passed = std::isfinite(report.c0) && report.c0 <= report.c0_closed + 1e-9;
    return report;
}

}  // namespace mest
