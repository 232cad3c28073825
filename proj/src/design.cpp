#include <mest/design.hpp>

#include <mest/rng.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>

namespace mest {

std::string DesignGenSpec::label() const {
    switch (kind) {
        case Kind::orthogonal_blocks: return "orthogonal_blocks(" + std::to_string(p) + ")";
        case Kind::gaussian_iid: return "gaussian_iid(" + std::to_string(p) + ")";
        case Kind::decay:
            return "decay(" + std::to_string(p) + ",delta=" + std::to_string(delta) + ")";
        default: return "adversarial_leverage(" + std::to_string(p) + ")";
    }
}

Matrix inv_sqrt_spd(const Matrix& sym, const std::string& context) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    const Vector& values = eig.eigenvalues();
    const double max_eig = values.maxCoeff();
    if (!(max_eig > 0.0) || values.minCoeff() < kGramEigFloor * max_eig)
        throw SingularGram(context + ": Gram matrix is singular (min eigenvalue " +
                           std::to_string(values.minCoeff()) + ", max " +
                           std::to_string(max_eig) + ")");
    return eig.eigenvectors() * values.cwiseSqrt().cwiseInverse().asDiagonal() *
           eig.eigenvectors().transpose();
}

namespace {

bool prefix_positive_definite(const Matrix& gram) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    const double max_eig = eig.eigenvalues().maxCoeff();
    return max_eig > 0.0 && eig.eigenvalues().minCoeff() >= kGramEigFloor * max_eig;
}

Index find_n0(const Matrix& design) {
    const Index n = design.rows(), p = design.cols();
    Matrix gram = Matrix::Zero(p, p);
    for (Index i = 0; i < n; ++i) {
        gram.selfadjointView<Eigen::Lower>().rankUpdate(design.row(i).transpose());
        if (i + 1 < p) continue;
        Matrix full = gram.selfadjointView<Eigen::Lower>();
        if (prefix_positive_definite(full)) return i + 1;
    }
    return n;  // capped; summarize() has already established S_n > 0
}

}  // namespace

DesignSummary summarize(const Matrix& design) {
    const Index n = design.rows(), p = design.cols();
    if (n < 1 || p < 1) throw ConfigError("summarize: empty design");
    if (n < p) throw ConfigError("summarize: need n >= p");
    if (!design.allFinite()) throw ConfigError("summarize: non-finite design entry");

    DesignSummary s;
    s.n = n;
    s.p = p;
    s.gram = design.transpose() * design;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s.gram);
    s.max_eig = eig.eigenvalues().maxCoeff();
    const double min_eig = eig.eigenvalues().minCoeff();
    if (!(s.max_eig > 0.0) || min_eig < kGramEigFloor * s.max_eig)
        throw SingularGram("summarize: Gram matrix is singular (min eigenvalue " +
                           std::to_string(min_eig) + ", max " + std::to_string(s.max_eig) + ")");
    s.min_eig_sqrt = std::sqrt(min_eig);
    s.gram_inv_sqrt = eig.eigenvectors() *
                      eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                      eig.eigenvectors().transpose();
    s.leverage = (design * s.gram_inv_sqrt).rowwise().squaredNorm().maxCoeff();
    s.n0 = find_n0(design);
    return s;
}

NormalizedDesign normalize(const Matrix& design, const DesignSummary& summary) {
    return NormalizedDesign{design * summary.gram_inv_sqrt};
}

DecayReport leverage_decay_fit(const std::vector<Matrix>& designs) {
    if (designs.size() < 4)
        throw InsufficientPoints("leverage_decay_fit: need at least 4 sample sizes");

    DecayReport report;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const Matrix& design : designs) {
        const DesignSummary s = summarize(design);
        report.points.emplace_back(s.n, s.leverage);
        report.c2 = std::max(report.c2, static_cast<double>(s.n) * s.leverage);
        const double lx = std::log(static_cast<double>(s.n));
        const double ly = std::log(s.leverage);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double m = static_cast<double>(designs.size());
    report.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    report.delta_hat = -report.slope;
    if (report.delta_hat >= 0.95)
        report.verdict = DecayVerdict::theorem1;
    else if (report.delta_hat <= 0.05)
        report.verdict = DecayVerdict::fails;
    else
        report.verdict = DecayVerdict::theoremA;
    return report;
}

EigenGrowth eigen_growth_check(const DesignSummary& summary, Index n) {
    if (n < 1) throw ConfigError("eigen_growth_check: n must be positive");
    EigenGrowth out;
    out.c5 = std::sqrt(static_cast<double>(n)) / summary.min_eig_sqrt;

    // tr(AB) >= mu(A) zeta(B) on pairs assembled from the summary itself:
    // (S_n^{-1}, S_n) and (S_n^{-1/2}, S_n).
    auto holds = [](const Matrix& a, const Matrix& b) {
        Eigen::SelfAdjointEigenSolver<Matrix> ea(a, Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Matrix> eb(b, Eigen::EigenvaluesOnly);
        const double lhs = (a * b).trace();
        return lhs >= ea.eigenvalues().maxCoeff() * eb.eigenvalues().minCoeff() - 1e-9 * std::abs(lhs);
    };
    const Matrix inv = summary.gram_inv_sqrt * summary.gram_inv_sqrt;
    out.trace_inequality_ok = holds(inv, summary.gram) && holds(summary.gram_inv_sqrt, summary.gram);
    return out;
}

Matrix generate_design(const DesignGenSpec& spec, Index n, std::uint64_t seed) {
    const Index p = spec.p;
    if (p < 1) throw ConfigError("generate_design: p must be >= 1");
    if (n < p) throw ConfigError("generate_design: need n >= p");

    Matrix design = Matrix::Zero(n, p);
    switch (spec.kind) {
        case DesignGenSpec::Kind::orthogonal_blocks:
            for (Index i = 0; i < n; ++i) design(i, i % p) = 1.0;
            break;
        case DesignGenSpec::Kind::gaussian_iid: {
            Rng rng(derive_seed(seed, 0x9d2c5680, static_cast<std::uint64_t>(n)));
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < p; ++j) design(i, j) = rng.normal();
            break;
        }
        case DesignGenSpec::Kind::decay: {
            if (!(spec.delta > 0.0 && spec.delta <= 1.0))
                throw ConfigError("generate_design: decay needs delta in (0,1]");
            // One row of norm n^{(1-delta)/2} among cycled unit rows gives
            // d_n = Theta(n^{-delta}).
            design(0, 0) = std::pow(static_cast<double>(n), 0.5 * (1.0 - spec.delta));
            for (Index i = 1; i < n; ++i) design(i, (i - 1) % p) = 1.0;
            break;
        }
        default: {  // adversarial_leverage: one row of norm sqrt(n), d_n -> constant
            design(0, 0) = std::sqrt(static_cast<double>(n));
            for (Index i = 1; i < n; ++i) design(i, (i - 1) % p) = 1.0;
            break;
        }
    }
    return design;
}

}  // namespace mest
