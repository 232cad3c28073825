#pragma once

#include <mest/reports.hpp>
#include <mest/types.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace mest {

/// Gram-matrix diagnostics of a design X (rows are observations x_i').
struct DesignSummary {
    Matrix gram;           // S_n = sum x_i x_i'
    Matrix gram_inv_sqrt;  // S_n^{-1/2}
    double leverage = 0.0; // d_n = max_i x_i' S_n^{-1} x_i
    Index n0 = 0;          // smallest prefix length with S_{n0} > 0
    double min_eig_sqrt = 0.0;  // zeta(S_n^{1/2})
    double max_eig = 0.0;       // mu(S_n)
    Index n = 0;
    Index p = 0;
};

/// Rows x_ni = S_n^{-1/2} x_i; satisfies sum x_ni x_ni' = I_p,
/// sum ||x_ni||^2 = p, max ||x_ni||^2 = d_n.
struct NormalizedDesign {
    Matrix rows;
};

struct EigenGrowth {
    double c5 = 0.0;  // sqrt(n) / zeta(S_n^{1/2})
    bool trace_inequality_ok = false;
};

struct DesignGenSpec {
    enum class Kind { orthogonal_blocks, gaussian_iid, decay, adversarial_leverage };
    Kind kind = Kind::orthogonal_blocks;
    int p = 1;
    double delta = 1.0;  // decay only
    std::string label() const;
};

/// Relative eigenvalue floor below which S_n counts as singular.
inline constexpr double kGramEigFloor = 1e-12;

DesignSummary summarize(const Matrix& design);
NormalizedDesign normalize(const Matrix& design, const DesignSummary& summary);
DecayReport leverage_decay_fit(const std::vector<Matrix>& designs);
EigenGrowth eigen_growth_check(const DesignSummary& summary, Index n);
Matrix generate_design(const DesignGenSpec& spec, Index n, std::uint64_t seed);

/// Symmetric inverse square root with relative eigenvalue floor; throws
/// SingularGram below the floor.
Matrix inv_sqrt_spd(const Matrix& sym, const std::string& context);

}  // namespace mest
