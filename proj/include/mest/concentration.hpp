#pragma once

#include <mest/conditions.hpp>
#include <mest/design.hpp>
#include <mest/distribution.hpp>
#include <mest/loss.hpp>
#include <mest/types.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace mest {

/// min(1, 2 exp(-eps^2 / (2 b eps + 2 bsq))): the Bennett tail bound for
/// |sum X_i| with EX_i = 0, |X_i| <= b, sum EX_i^2 = bsq.
double bennett_bound(double eps, double b, double bsq);

/// A centered variable with a certified sup bound, for Bennett verification:
/// either Rademacher or a centered score psi(e) - E psi(e) with bounded psi.
class BoundedVarSpec {
  public:
    static BoundedVarSpec rademacher();
    /// Throws UnboundedSpec when sup|psi| = inf (power loss with q > 1).
    static BoundedVarSpec centered_score(const ConvexLoss& loss, const ErrorDistribution& dist);

    double bound() const { return bound_; }          // certified b
    double second_moment() const { return second_; } // E X^2
    double draw(Rng& rng) const;
    std::string label() const;

  private:
    BoundedVarSpec() = default;
    bool rademacher_ = true;
    double bound_ = 1.0;
    double second_ = 1.0;
    double mean_psi_ = 0.0;
    std::optional<ConvexLoss> loss_;
    std::optional<ErrorDistribution> dist_;
};

struct TailReport {
    struct Row {
        double eps = 0.0;
        double bound = 0.0;      // Bennett bound at this eps
        double empirical = 0.0;  // frequency of |sum X_i| > eps
        double slack = 0.0;      // 3 binomial standard errors
        bool dominated = false;
    };
    int n = 0;
    int reps = 0;
    std::vector<Row> rows;
    bool passed = false;
};

/// Empirical tail frequencies of |sum_{i<=n} X_i| against the Bennett bound.
TailReport verify_bennett(const BoundedVarSpec& spec, int n, const std::vector<double>& eps_grid,
                          int reps, std::uint64_t seed);

struct WeightSpec {
    enum class Kind { one_over_n, design_column, one_over_sqrt_n };
    Kind kind = Kind::one_over_n;
    int column = 0;            // design_column only
    DesignGenSpec design = {}; // design_column only
    std::string label() const;
};

struct SllnReport {
    std::vector<Index> n_grid;
    std::vector<double> medians;       // per n, median over seeds of |sum a_ni psi(e_i)|
    double max_scaled_weight = 0.0;    // max over grid of n * max_i |a_ni|
    double weight_growth_slope = 0.0;  // slope of log(n max|a_ni|) vs log n
    double threshold = 0.02;
    bool medians_nonincreasing = false;
    bool passed = false;
};

/// Weighted strong-law evidence: paths n -> |sum a_ni psi(e_i)| with
/// max|a_ni| = O(1/n).
/// Throws WeightTooLarge when the weights grow too fast and NonIntegrable
/// when E|psi(e)| diverges.
SllnReport verify_weighted_slln(const ErrorDistribution& dist, const ConvexLoss& loss,
                                const WeightSpec& weights, const std::vector<Index>& n_grid,
                                int seeds, std::uint64_t seed = 0);

}  // namespace mest
