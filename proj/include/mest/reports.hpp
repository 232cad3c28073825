#pragma once

#include <mest/types.hpp>

#include <limits>
#include <utility>
#include <vector>

namespace mest {

/// Evidence for the score conditions: estimated increment bound C0,
/// identification slope C1 on |u| < delta, and the mean score E psi(e).
/// increment_bound fills only the C0 side (c1/mean_psi stay NaN);
/// check_identification fills everything.
struct ConditionReport {
    double c0 = std::numeric_limits<double>::quiet_NaN();
    double c0_closed = std::numeric_limits<double>::quiet_NaN();
    double c1 = std::numeric_limits<double>::quiet_NaN();
    double delta = std::numeric_limits<double>::quiet_NaN();
    double mean_psi = std::numeric_limits<double>::quiet_NaN();
    bool passed = false;
    std::vector<std::pair<double, double>> evidence_grid;  // (u, G(u)) or (u, sup increment)
};

enum class DecayVerdict { theorem1, theoremA, fails };

inline const char* to_string(DecayVerdict v) {
    switch (v) {
        case DecayVerdict::theorem1: return "theorem1";
        case DecayVerdict::theoremA: return "theoremA";
        default: return "fails";
    }
}

/// Log-log regression of leverage d_n against n across a family of designs.
struct DecayReport {
    double slope = 0.0;       // slope of log d_n vs log n
    double delta_hat = 0.0;   // -slope
    double c2 = 0.0;          // max_n n * d_n
    DecayVerdict verdict = DecayVerdict::fails;
    std::vector<std::pair<Index, double>> points;  // (n, d_n)
};

}  // namespace mest
