#include <mest/concentration.hpp>

#include <algorithm>
#include <cmath>

namespace mest {

double bennett_bound(double eps, double b, double bsq) {
    if (!(eps >= 0.0) || !(b > 0.0) || !(bsq >= 0.0))
        throw ConfigError("bennett_bound: need eps >= 0, b > 0, bsq >= 0");
    if (eps == 0.0) return 1.0;
    const double denom = 2.0 * b * eps + 2.0 * bsq;
    return std::min(1.0, 2.0 * std::exp(-eps * eps / denom));
}

BoundedVarSpec BoundedVarSpec::rademacher() {
    BoundedVarSpec spec;
    spec.rademacher_ = true;
    spec.bound_ = 1.0;
    spec.second_ = 1.0;
    return spec;
}

BoundedVarSpec BoundedVarSpec::centered_score(const ConvexLoss& loss,
                                              const ErrorDistribution& dist) {
    const double sup = psi_sup(loss);
    if (!std::isfinite(sup))
        throw UnboundedSpec("centered_score: sup|psi| is infinite for this loss");
    BoundedVarSpec spec;
    spec.rademacher_ = false;
    spec.loss_ = loss;
    spec.dist_ = dist;
    spec.mean_psi_ = g_function(dist, loss, 0.0);
    spec.bound_ = sup + std::abs(spec.mean_psi_);
    const double raw_second = psi_second_moment(dist, loss);
    spec.second_ = raw_second - spec.mean_psi_ * spec.mean_psi_;
    return spec;
}

double BoundedVarSpec::draw(Rng& rng) const {
    if (rademacher_) return rng.rademacher();
    return psi(*loss_, dist_->sample(rng)) - mean_psi_;
}

std::string BoundedVarSpec::label() const {
    if (rademacher_) return "rademacher";
    return "centered_score(" + dist_->label() + ")";
}

TailReport verify_bennett(const BoundedVarSpec& spec, int n, const std::vector<double>& eps_grid,
                          int reps, std::uint64_t seed) {
    if (n < 1 || reps < 1 || eps_grid.empty())
        throw ConfigError("verify_bennett: need n >= 1, reps >= 1, nonempty eps grid");

    TailReport report;
    report.n = n;
    report.reps = reps;
    const double bsq = static_cast<double>(n) * spec.second_moment();

    std::vector<int> exceed(eps_grid.size(), 0);
    for (int r = 0; r < reps; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r)));
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += spec.draw(rng);
        const double abs_sum = std::abs(sum);
        for (std::size_t j = 0; j < eps_grid.size(); ++j)
            if (abs_sum > eps_grid[j]) ++exceed[j];
    }

    report.passed = true;
    for (std::size_t j = 0; j < eps_grid.size(); ++j) {
        TailReport::Row row;
        row.eps = eps_grid[j];
        row.bound = bennett_bound(eps_grid[j], spec.bound(), bsq);
        row.empirical = static_cast<double>(exceed[j]) / reps;
        row.slack = 3.0 * std::sqrt(row.bound * (1.0 - row.bound) / reps);
        row.dominated = row.empirical <= row.bound + row.slack;
        report.passed = report.passed && row.dominated;
        report.rows.push_back(row);
    }
    return report;
}

std::string WeightSpec::label() const {
    switch (kind) {
        case Kind::one_over_n: return "1/n";
        case Kind::design_column:
            return "x_ni[" + std::to_string(column) + "]/sqrt(n) from " + design.label();
        default: return "1/sqrt(n)";
    }
}

namespace {

Vector make_weights(const WeightSpec& spec, Index n, std::uint64_t seed) {
    switch (spec.kind) {
        case WeightSpec::Kind::one_over_n:
            return Vector::Constant(n, 1.0 / static_cast<double>(n));
        case WeightSpec::Kind::one_over_sqrt_n:
            return Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
        default: {
            if (spec.column < 0 || spec.column >= spec.design.p)
                throw ConfigError("weighted_slln: column out of range");
            const Matrix design = generate_design(spec.design, n, seed);
            const NormalizedDesign normalized = normalize(design, summarize(design));
            return normalized.rows.col(spec.column) / std::sqrt(static_cast<double>(n));
        }
    }
}

}  // namespace

SllnReport verify_weighted_slln(const ErrorDistribution& dist, const ConvexLoss& loss,
                                const WeightSpec& weights, const std::vector<Index>& n_grid,
                                int seeds, std::uint64_t seed) {
    if (n_grid.size() < 2 || seeds < 1)
        throw ConfigError("verify_weighted_slln: need >= 2 sample sizes and >= 1 seed");
    if (!dist.has_abs_moment(psi_moment_order(loss)))
        throw NonIntegrable("verify_weighted_slln: E|psi(e)| diverges for " + dist.label());

    SllnReport report;
    report.n_grid = n_grid;
    const double mean_psi = g_function(dist, loss, 0.0);  // centering, 0 for odd selections

    // Hypothesis check: n * max|a_ni| must stay bounded over the grid.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<Vector> weight_arrays;
    for (Index n : n_grid) {
        Vector a = make_weights(weights, n, seed);
        const double scaled = static_cast<double>(n) * a.cwiseAbs().maxCoeff();
        report.max_scaled_weight = std::max(report.max_scaled_weight, scaled);
        const double lx = std::log(static_cast<double>(n)), ly = std::log(scaled);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        weight_arrays.push_back(std::move(a));
    }
    const double m = static_cast<double>(n_grid.size());
    report.weight_growth_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    if (report.weight_growth_slope > 0.25)
        throw WeightTooLarge("verify_weighted_slln: n * max|a_ni| grows like n^" +
                             std::to_string(report.weight_growth_slope) +
                             "; the strong-law hypothesis needs max|a_ni| = O(1/n)");

    for (std::size_t g = 0; g < n_grid.size(); ++g) {
        const Index n = n_grid[g];
        const Vector& a = weight_arrays[g];
        std::vector<double> values(seeds);
        for (int s = 0; s < seeds; ++s) {
            const Vector e =
                dist.sample(n, derive_seed(seed, static_cast<std::uint64_t>(n),
                                           static_cast<std::uint64_t>(s)));
            const Array scores = psi(loss, e.array()) - mean_psi;
            values[s] = std::abs(a.dot(scores.matrix()));
        }
        std::nth_element(values.begin(), values.begin() + seeds / 2, values.end());
        double median = values[seeds / 2];
        if (seeds % 2 == 0) {
            const double lower = *std::max_element(values.begin(), values.begin() + seeds / 2);
            median = 0.5 * (median + lower);
        }
        report.medians.push_back(median);
    }

    report.medians_nonincreasing = true;
    const std::size_t count = report.medians.size();
    const std::size_t window = std::min<std::size_t>(3, count);
    for (std::size_t i = count - window + 1; i < count; ++i)
        if (report.medians[i] > report.medians[i - 1]) report.medians_nonincreasing = false;
    report.passed = report.medians_nonincreasing && report.medians.back() < report.threshold;
    return report;
}

}  // namespace mest
