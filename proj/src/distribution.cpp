#include <mest/distribution.hpp>

#include <mest/quadrature.hpp>

#include <algorithm>
#include <cmath>

namespace mest {

namespace detail {

namespace {
// int_x^inf dt / (t^2 ln^2 t) = e^{-a} * int_0^inf e^{-u} / (u+a)^2 du with
// a = ln x.  The scaled integrand keeps relative accuracy for large x where
// the raw value underflows any absolute tolerance.
double scaled_tail_integral(double a) {
    return quad::integrate_to_infinity(
        [a](double u) { return std::exp(-u) / ((u + a) * (u + a)); }, 0.0, 1e-13);
}

double log_raw_tail_integral(double x) {
    const double a = std::log(x);
    return -a + std::log(scaled_tail_integral(a));
}
}  // namespace

LogParetoTable::LogParetoTable(double x0_in) : x0(x0_in) {
    k = 0.5 * std::exp(-log_raw_tail_integral(x0));
    constexpr int kKnots = 10000;
    const double lo = std::log(x0), hi = std::log(1e15);
    log_x.reserve(kKnots);
    log_tail.reserve(kKnots);
    const double log_2k = std::log(2.0 * k);
    for (int i = 0; i < kKnots; ++i) {
        const double lx = lo + (hi - lo) * i / (kKnots - 1);
        log_x.push_back(lx);
        log_tail.push_back(log_2k + log_raw_tail_integral(std::exp(lx)));
    }
}

double LogParetoTable::tail_prob(double x) const {
    if (x <= x0) return 1.0;
    return 2.0 * k * std::exp(log_raw_tail_integral(x));
}

double LogParetoTable::inverse_tail(double tail) const {
    if (tail >= 1.0) return x0;
    const double lt = std::log(tail);
    if (lt <= log_tail.back()) {
        // Beyond the table: asymptotic tail P(|e|>x) ~ 2K/(x ln^2 x).
        double x = std::exp(log_x.back());
        for (int it = 0; it < 8; ++it) {
            const double lx = std::log(2.0 * k / tail) - 2.0 * std::log(std::log(x));
            x = std::exp(lx);
        }
        return x;
    }
    // log_tail is strictly decreasing; binary search for the bracket.
    const auto it = std::lower_bound(log_tail.begin(), log_tail.end(), lt,
                                     [](double a, double b) { return a > b; });
    const auto j = static_cast<std::size_t>(it - log_tail.begin());
    if (j == 0) return x0;
    const double t0 = log_tail[j - 1], t1 = log_tail[j];
    const double w = (lt - t0) / (t1 - t0);
    return std::exp(log_x[j - 1] + w * (log_x[j] - log_x[j - 1]));
}

}  // namespace detail

ErrorDistribution::ErrorDistribution(DistKind kind, double param) : kind_(kind), param_(param) {
    if (kind_ == DistKind::log_pareto)
        table_ = std::make_shared<const detail::LogParetoTable>(param_);
}

ErrorDistribution ErrorDistribution::gaussian(double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("gaussian: sigma must be positive");
    return {DistKind::gaussian, sigma};
}
ErrorDistribution ErrorDistribution::laplace(double b) {
    if (!(b > 0.0)) throw ConfigError("laplace: b must be positive");
    return {DistKind::laplace, b};
}
ErrorDistribution ErrorDistribution::cauchy(double scale) {
    if (!(scale > 0.0)) throw ConfigError("cauchy: scale must be positive");
    return {DistKind::cauchy, scale};
}
ErrorDistribution ErrorDistribution::student_t(double nu) {
    if (!(nu > 0.0)) throw ConfigError("student_t: nu must be positive");
    return {DistKind::student_t, nu};
}
ErrorDistribution ErrorDistribution::log_pareto(double x0) {
    if (!(x0 >= std::exp(1.0))) throw ConfigError("log_pareto: x0 must be >= e");
    return {DistKind::log_pareto, x0};
}

std::string ErrorDistribution::label() const {
    switch (kind_) {
        case DistKind::gaussian: return "gaussian(" + std::to_string(param_) + ")";
        case DistKind::laplace: return "laplace(" + std::to_string(param_) + ")";
        case DistKind::cauchy: return "cauchy(" + std::to_string(param_) + ")";
        case DistKind::student_t: return "student_t(" + std::to_string(param_) + ")";
        default: return "log_pareto(" + std::to_string(param_) + ")";
    }
}

double ErrorDistribution::density(double x) const {
    switch (kind_) {
        case DistKind::gaussian: {
            const double z = x / param_;
            return std::exp(-0.5 * z * z) / (param_ * std::sqrt(2.0 * M_PI));
        }
        case DistKind::laplace:
            return std::exp(-std::abs(x) / param_) / (2.0 * param_);
        case DistKind::cauchy: {
            const double z = x / param_;
            return 1.0 / (M_PI * param_ * (1.0 + z * z));
        }
        case DistKind::student_t: {
            const double nu = param_;
            const double lg = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu);
            return std::exp(lg) / std::sqrt(nu * M_PI) *
                   std::pow(1.0 + x * x / nu, -0.5 * (nu + 1.0));
        }
        default: {
            const double ax = std::abs(x);
            if (ax <= param_) return 0.0;
            const double lx = std::log(ax);
            return table_->k / (x * x * lx * lx);
        }
    }
}

double ErrorDistribution::cdf(double x) const {
    switch (kind_) {
        case DistKind::gaussian:
            return 0.5 * std::erfc(-x / (param_ * std::sqrt(2.0)));
        case DistKind::laplace:
            return x < 0.0 ? 0.5 * std::exp(x / param_) : 1.0 - 0.5 * std::exp(-x / param_);
        case DistKind::cauchy:
            return 0.5 + std::atan(x / param_) / M_PI;
        case DistKind::student_t: {
            // Symmetric quadrature of the density; adequate for diagnostics.
            if (x < 0.0) return 1.0 - cdf(-x);
            return 0.5 + quad::integrate_finite([this](double t) { return density(t); }, 0.0, x,
                                                1e-12);
        }
        default:
            return x < 0.0 ? 0.5 * tail_prob(-x) : 1.0 - 0.5 * tail_prob(x);
    }
}

double ErrorDistribution::tail_prob(double x) const {
    if (x <= 0.0) return 1.0;
    switch (kind_) {
        case DistKind::log_pareto:
            return table_->tail_prob(x);
        default:
            return 2.0 * (1.0 - cdf(x));
    }
}

double ErrorDistribution::sample(Rng& rng) const {
    switch (kind_) {
        case DistKind::gaussian:
            return param_ * rng.normal();
        case DistKind::laplace: {
            const double u = rng.uniform01() - 0.5;
            return -param_ * std::copysign(std::log1p(-2.0 * std::abs(u)), u);
        }
        case DistKind::cauchy:
            return param_ * std::tan(M_PI * (rng.uniform01() - 0.5));
        case DistKind::student_t: {
            const double z = rng.normal();
            const double v = 2.0 * rng.gamma(0.5 * param_);
            return z / std::sqrt(v / param_);
        }
        default: {
            const double sign = rng.rademacher();
            return sign * table_->inverse_tail(rng.uniform01());
        }
    }
}

Vector ErrorDistribution::sample(Index n, std::uint64_t seed) const {
    if (n < 1) throw ConfigError("sample: n must be >= 1");
    Rng rng(seed);
    Vector out(n);
    for (Index i = 0; i < n; ++i) out[i] = sample(rng);
    return out;
}

bool ErrorDistribution::has_abs_moment(double r) const {
    if (r <= 0.0) return true;
    switch (kind_) {
        case DistKind::gaussian:
        case DistKind::laplace:
            return true;
        case DistKind::cauchy:
            return r < 1.0;
        case DistKind::student_t:
            return r < param_;
        default:
            return r <= 1.0;
    }
}

std::vector<double> ErrorDistribution::positive_breakpoints() const {
    if (kind_ == DistKind::log_pareto) return {param_};
    return {};
}

}  // namespace mest
