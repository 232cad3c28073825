#pragma once

#include <mest/design.hpp>
#include <mest/loss.hpp>
#include <mest/types.hpp>

#include <cstdint>

namespace mest {

struct SolverOpts {
    double grad_tol = 1e-8;
    double obj_tol = 1e-9;
    int max_iter = 500;          // per smoothing stage
    double smooth_init = 1e-2;
    double smooth_final = 1e-8;
};

struct FitResult {
    Vector beta_hat;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    double smoothing_final = 0.0;
};

/// sum_i rho(y_i - x_i' beta).
double objective(const Matrix& design, const Vector& y, const ConvexLoss& loss,
                 const Vector& beta);

/// Minimizes the M-estimation objective by majorize-minimize (IRLS) on a
/// smoothed loss with smoothing continuation.  Deterministic; returns
/// converged = false (never throws) when the last stage exhausts max_iter
/// without meeting the stationarity test.
FitResult fit(const Matrix& design, const Vector& y, const ConvexLoss& loss,
              const SolverOpts& opts = {});

struct BoxSpec {
    Vector center;
    Vector half_width;  // per axis
};

/// Verification oracle: nested grid refinement over the box, 5 rounds of 41
/// points per axis (p <= 3).  Throws MinimizerOnBoundary when the best point
/// lands on the box boundary.
FitResult brute_force_fit(const Matrix& design, const Vector& y, const ConvexLoss& loss,
                          const BoxSpec& box);

/// One directional slice of the proof's process D_n(eps sqrt(n) gamma) and
/// its I1n/I2n split, in simulation mode (errors known).
struct DnTrace {
    Vector gamma;
    double eps = 0.0;
    double total = 0.0;  // D_n(eps sqrt(n) gamma)
    double i1 = 0.0;     // total - i2
    double i2 = 0.0;     // sum w_ni' gamma psi(e_i)
    double i1_quadrature = 0.0;  // independent recomputation; NaN when skipped
};

DnTrace dn_trace(const NormalizedDesign& normalized, const Vector& errors, const ConvexLoss& loss,
                 double eps, const Vector& gamma, bool with_quadrature = true);

struct BoundReport {
    double eps = 0.0;
    double c1 = 0.0;
    double i1_threshold = 0.0;  // C1 eps^2 n / 8
    double min_total = 0.0;
    double min_i1 = 0.0;
    double max_abs_i2 = 0.0;
    double max_decomposition_residual = 0.0;  // max |total - (i1+i2)|
    double quadrature_rel_err = 0.0;          // on the first sampled direction
    double c2 = 0.0;             // n * d_n for this design
    double max_abs_shift = 0.0;  // eps sqrt(n) max||x_ni||, the largest |w_ni' gamma|
    int n_directions = 0;
    bool i1_bound_holds = false;
    bool total_positive = false;
};

/// Samples directions uniformly on the unit sphere and reports the empirical
/// version of the appendix bounds inf I1n >= C1 eps^2 n / 8 and inf D_n > 0.
BoundReport verify_dn_lower_bound(const NormalizedDesign& normalized, const Vector& errors,
                                  const ConvexLoss& loss, double eps, int n_directions,
                                  std::uint64_t seed, double c1);

}  // namespace mest
