#pragma once

#include <mest/rng.hpp>
#include <mest/types.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace mest {

enum class DistKind { gaussian, laplace, cauchy, student_t, log_pareto };

namespace detail {
/// Normalization constant and tail table for the log-Pareto law with density
/// K / (x^2 ln^2 |x|) on |x| > x0.  Built once per x0 by quadrature; the
/// inverse CDF is a monotone interpolation in (log tail, log x).
struct LogParetoTable {
    explicit LogParetoTable(double x0);
    double x0;
    double k;                     // normalization constant
    std::vector<double> log_x;    // ascending
    std::vector<double> log_tail; // descending, log P(|e| > x)
    double tail_prob(double x) const;       // P(|e| > x), exact quadrature form
    double inverse_tail(double tail) const; // x with P(|e| > x) = tail
};
}  // namespace detail

/// Symmetric error laws, including the first-moment-only log-Pareto tail.
/// Immutable after construction; samplers are pure functions of the seed.
class ErrorDistribution {
  public:
    static ErrorDistribution gaussian(double sigma);
    static ErrorDistribution laplace(double b);
    static ErrorDistribution cauchy(double scale);
    static ErrorDistribution student_t(double nu);
    static ErrorDistribution log_pareto(double x0);

    DistKind kind() const { return kind_; }
    double param() const { return param_; }
    std::string label() const;

    double density(double x) const;
    double cdf(double x) const;
    double sample(Rng& rng) const;
    Vector sample(Index n, std::uint64_t seed) const;

    /// P(|e| > x).
    double tail_prob(double x) const;

    /// Whether E|e|^r is finite (closed-form rule per law).
    bool has_abs_moment(double r) const;

    /// Support edges and density kinks on the positive axis, used as
    /// quadrature breakpoints.
    std::vector<double> positive_breakpoints() const;

  private:
    ErrorDistribution(DistKind kind, double param);
    DistKind kind_;
    double param_;
    std::shared_ptr<const detail::LogParetoTable> table_;
};

}  // namespace mest
