#include <mest/solver.hpp>

#include <mest/quadrature.hpp>
#include <mest/rng.hpp>

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace mest {

namespace {

// Smoothed score: kinks bridged by a quadratic of half-width s.  The IRLS
// weight w(r) satisfies psi_s(r) = w(r) r + kappa identically, where kappa is
// the asymmetric linear part (alpha - 1/2 for quantile losses, else 0), so
// the weighted-least-squares fixed point is a stationary point of the
// smoothed objective.
struct SmoothedLoss {
    const ConvexLoss& loss;
    double s;

    double kappa() const {
        return loss.kind() == LossKind::quantile ? loss.param() - 0.5 : 0.0;
    }

    double psi(double r) const {
        switch (loss.kind()) {
            case LossKind::huber:
                return std::clamp(r, -loss.param(), loss.param());
            case LossKind::power: {
                const double q = loss.param();
                if (q == 2.0) return 2.0 * r;
                const double ar = std::abs(r);
                if (q == 1.0) return ar <= s ? r / s : (r > 0 ? 1.0 : -1.0);
                if (ar <= s) return q * std::pow(s, q - 2.0) * r;
                return q * std::copysign(std::pow(ar, q - 1.0), r);
            }
            default: {  // quantile: (1/2) smoothed |r| + kappa r
                const double ar = std::abs(r);
                return (ar <= s ? r / (2.0 * s) : std::copysign(0.5, r)) + kappa();
            }
        }
    }

    double weight(double r) const {
        const double ar = std::abs(r);
        switch (loss.kind()) {
            case LossKind::huber:
                return ar <= loss.param() ? 1.0 : loss.param() / ar;
            case LossKind::power: {
                const double q = loss.param();
                if (q == 2.0) return 2.0;
                return q * std::pow(std::max(ar, s), q - 2.0);
            }
            default:
                return 0.5 / std::max(ar, s);
        }
    }

    double rho(double r) const {
        switch (loss.kind()) {
            case LossKind::huber:
                return mest::rho(loss, r);
            case LossKind::power: {
                const double q = loss.param();
                if (q == 2.0) return r * r;
                const double ar = std::abs(r);
                if (q == 1.0) return ar <= s ? r * r / (2.0 * s) + 0.5 * s : ar;
                if (ar <= s)
                    return 0.5 * q * std::pow(s, q - 2.0) * r * r + (1.0 - 0.5 * q) * std::pow(s, q);
                return std::pow(ar, q);
            }
            default: {
                const double ar = std::abs(r);
                const double habs = ar <= s ? r * r / (2.0 * s) + 0.5 * s : ar;
                return 0.5 * habs + kappa() * r;
            }
        }
    }
};

bool needs_smoothing(const ConvexLoss& loss) {
    switch (loss.kind()) {
        case LossKind::huber: return false;
        case LossKind::power: return loss.param() != 2.0;
        default: return true;
    }
}

}  // namespace

double objective(const Matrix& design, const Vector& y, const ConvexLoss& loss,
                 const Vector& beta) {
    if (design.rows() != y.size() || design.cols() != beta.size())
        throw ConfigError("objective: dimension mismatch");
    return rho(loss, (y - design * beta).array()).sum();
}

FitResult fit(const Matrix& design, const Vector& y, const ConvexLoss& loss,
              const SolverOpts& opts) {
    const Index n = design.rows();
    if (y.size() != n) throw ConfigError("fit: dimension mismatch");

    const Matrix gram = design.transpose() * design;
    {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
        const double max_eig = eig.eigenvalues().maxCoeff();
        if (!(max_eig > 0.0) || eig.eigenvalues().minCoeff() < kGramEigFloor * max_eig)
            throw SingularGram("fit: Gram matrix is singular");
    }

    FitResult result;
    result.beta_hat = gram.ldlt().solve(design.transpose() * y);  // OLS start
    result.iterations = 0;

    std::vector<double> stages;
    if (needs_smoothing(loss)) {
        for (double s = opts.smooth_init; s > opts.smooth_final * (1.0 - 1e-12); s *= 0.1)
            stages.push_back(s);
        if (stages.empty() || stages.back() > opts.smooth_final) stages.push_back(opts.smooth_final);
    } else {
        stages.push_back(opts.smooth_final);
    }

    Vector residual = y - design * result.beta_hat;
    Vector weights(n), psi_vals(n);
    bool grad_stationary = false;

    for (std::size_t stage = 0; stage < stages.size(); ++stage) {
        const double s = stages[stage];
        const bool final_stage = stage + 1 == stages.size();
        const SmoothedLoss sm{loss, s};
        double prev_obj = std::numeric_limits<double>::infinity();
        grad_stationary = false;
        for (int iter = 0; iter < opts.max_iter; ++iter) {
            ++result.iterations;
            for (Index i = 0; i < n; ++i) weights[i] = sm.weight(residual[i]);

            // Solve X' W X beta = X' W y + kappa X' 1.
            Matrix wx = design;
            for (Index i = 0; i < n; ++i) wx.row(i) *= weights[i];
            Matrix normal = design.transpose() * wx;
            Vector rhs = wx.transpose() * y;
            if (sm.kappa() != 0.0) rhs += sm.kappa() * design.colwise().sum().transpose();
            Vector beta_next = normal.ldlt().solve(rhs);

            result.beta_hat = beta_next;
            residual = y - design * result.beta_hat;

            // Relative first-order stationarity of the smoothed objective.
            // The computed gradient carries evaluation noise of about
            // slope(psi_s) * ulp(residual) per term (the slope reaches 1/(2s)
            // inside a smoothing bridge), which no iteration can beat; allow
            // for it explicitly.
            for (Index i = 0; i < n; ++i) psi_vals[i] = sm.psi(residual[i]);
            const Vector grad = -(design.transpose() * psi_vals);
            const double gscale =
                1.0 + (design.cwiseAbs().transpose() * psi_vals.cwiseAbs()).maxCoeff();
            const double grad_norm = grad.cwiseAbs().maxCoeff();
            // residuals accumulate about p+2 roundings (dot product, subtract,
            // solve), each of size ulp(|y| + |x'beta|)
            const double resid_eps =
                static_cast<double>(design.cols() + 2) * std::numeric_limits<double>::epsilon();
            Vector noise_terms(n);
            for (Index i = 0; i < n; ++i)
                noise_terms[i] = sm.weight(residual[i]) *
                                 (std::abs(y[i]) + std::abs(y[i] - residual[i])) * resid_eps;
            const double grad_noise =
                (design.cwiseAbs().transpose() * noise_terms).maxCoeff();
            if (grad_norm <= opts.grad_tol * gscale + grad_noise) {
                grad_stationary = true;
                break;
            }

            // The objective plateaus in double precision long before the
            // gradient does (the gap scales with grad^2), so only the
            // continuation stages may exit on an objective stall; the final
            // stage runs on the gradient alone (IRLS plateaus can last
            // hundreds of iterations before dropping).
            if (!final_stage) {
                double obj = 0.0;
                for (Index i = 0; i < n; ++i) obj += sm.rho(residual[i]);
                if (std::abs(prev_obj - obj) <= opts.obj_tol * (1.0 + std::abs(obj))) break;
                prev_obj = obj;
            }
        }
        result.smoothing_final = s;
    }

    result.converged = grad_stationary;
    result.objective = objective(design, y, loss, result.beta_hat);
    return result;
}

FitResult brute_force_fit(const Matrix& design, const Vector& y, const ConvexLoss& loss,
                          const BoxSpec& box) {
    const Index p = design.cols();
    if (p > 3) throw ConfigError("brute_force_fit: p must be <= 3");
    if (box.center.size() != p || box.half_width.size() != p)
        throw ConfigError("brute_force_fit: box dimension mismatch");

    constexpr int kPoints = 41;
    constexpr int kRounds = 6;  // initial scan + 5 refinement rounds

    Vector center = box.center;
    Vector half = box.half_width;
    Vector best = center;
    double best_obj = objective(design, y, loss, best);

    const Vector outer_lo = box.center - box.half_width;
    const Vector outer_hi = box.center + box.half_width;

    for (int round = 0; round < kRounds; ++round) {
        // Clamp the round's box into the original one.
        Vector lo(p), hi(p);
        for (Index j = 0; j < p; ++j) {
            lo[j] = std::max(center[j] - half[j], outer_lo[j]);
            hi[j] = std::min(center[j] + half[j], outer_hi[j]);
        }

        Eigen::Vector3i idx = Eigen::Vector3i::Zero();
        Vector point = Vector::Zero(p);
        const int axes = static_cast<int>(p);
        bool done = false;
        while (!done) {
            for (Index j = 0; j < p; ++j)
                point[j] = lo[j] + (hi[j] - lo[j]) * idx[static_cast<int>(j)] / (kPoints - 1);
            const double obj = objective(design, y, loss, point);
            if (obj < best_obj) {
                best_obj = obj;
                best = point;
            }
            int axis = 0;
            for (;;) {
                if (++idx[axis] < kPoints) break;
                idx[axis] = 0;
                if (++axis == axes) {
                    done = true;
                    break;
                }
            }
        }

        if (round == 0) {
            for (Index j = 0; j < p; ++j)
                if (best[j] <= outer_lo[j] + 1e-12 || best[j] >= outer_hi[j] - 1e-12)
                    throw MinimizerOnBoundary(
                        "brute_force_fit: best point on the box boundary (axis " +
                        std::to_string(j) + "); enlarge the box");
        }

        // The discrete argmin of a convex objective sits within one grid
        // spacing of the continuous one; keep two for safety.
        const Vector spacing = (hi - lo) / (kPoints - 1);
        center = best;
        half = 2.0 * spacing;
    }

    for (Index j = 0; j < p; ++j)
        if (best[j] <= outer_lo[j] + 1e-12 || best[j] >= outer_hi[j] - 1e-12)
            throw MinimizerOnBoundary("brute_force_fit: refinement pinned to the box boundary");

    // Piecewise-linear losses have a minimizer where p residuals vanish and
    // grid refinement alone cannot track their diagonal valleys to the
    // required accuracy, so exhaust those basic points as well.
    const bool piecewise_linear =
        loss.kind() == LossKind::quantile ||
        (loss.kind() == LossKind::power && loss.param() == 1.0);
    if (piecewise_linear) {
        const Index n = design.rows();
        std::vector<Index> combo(p);
        for (Index j = 0; j < p; ++j) combo[j] = j;
        Matrix sub(p, p);
        Vector rhs(p);
        for (;;) {
            for (Index j = 0; j < p; ++j) {
                sub.row(j) = design.row(combo[j]);
                rhs[j] = y[combo[j]];
            }
            Eigen::FullPivLU<Matrix> lu(sub);
            lu.setThreshold(1e-10);
            if (lu.isInvertible()) {
                const Vector candidate = lu.solve(rhs);
                bool inside = true;
                for (Index j = 0; j < p; ++j)
                    inside = inside && candidate[j] > outer_lo[j] && candidate[j] < outer_hi[j];
                if (inside) {
                    const double obj = objective(design, y, loss, candidate);
                    if (obj < best_obj) {
                        best_obj = obj;
                        best = candidate;
                    }
                }
            }
            Index axis = p - 1;
            while (axis >= 0 && combo[axis] == n - p + axis) --axis;
            if (axis < 0) break;
            ++combo[axis];
            for (Index j = axis + 1; j < p; ++j) combo[j] = combo[j - 1] + 1;
        }
    }

    FitResult result;
    result.beta_hat = best;
    result.objective = best_obj;
    result.converged = true;
    result.iterations = kRounds;
    return result;
}

DnTrace dn_trace(const NormalizedDesign& normalized, const Vector& errors, const ConvexLoss& loss,
                 double eps, const Vector& gamma, bool with_quadrature) {
    const Index n = normalized.rows.rows();
    if (errors.size() != n) throw ConfigError("dn_trace: dimension mismatch");
    if (std::abs(gamma.norm() - 1.0) > 1e-8)
        throw ConfigError("dn_trace: gamma must be a unit vector");

    DnTrace trace;
    trace.gamma = gamma;
    trace.eps = eps;

    const double scale = eps * std::sqrt(static_cast<double>(n));
    const Vector shift = scale * (normalized.rows * gamma);  // eps sqrt(n) x_ni' gamma

    double total = 0.0, i2 = 0.0;
    for (Index i = 0; i < n; ++i) {
        total += rho(loss, errors[i] - shift[i]) - rho(loss, errors[i]);
        i2 += -shift[i] * psi(loss, errors[i]);  // w_ni' gamma = -shift_i
    }
    trace.total = total;
    trace.i2 = i2;
    trace.i1 = total - i2;

    if (with_quadrature) {
        // Independent route: I1n = sum_i int_0^{w_ni' gamma} {psi(e_i+t) - psi(e_i)} dt,
        // adaptive Simpson with segments split at score kinks.
        const std::vector<double> kinks = psi_kinks(loss);
        double i1q = 0.0;
        for (Index i = 0; i < n; ++i) {
            const double w = -shift[i];
            if (w == 0.0) continue;
            const double e = errors[i];
            const double pe = psi(loss, e);
            auto f = [&](double t) { return psi(loss, e + t) - pe; };
            std::vector<double> cuts = {0.0, w};
            for (double k : kinks) {
                const double t = k - e;
                if ((w > 0.0 && t > 0.0 && t < w) || (w < 0.0 && t < 0.0 && t > w))
                    cuts.push_back(t);
            }
            // oriented from 0 towards w so the signed integral is preserved
            std::sort(cuts.begin(), cuts.end());
            if (w < 0.0) std::reverse(cuts.begin(), cuts.end());
            for (std::size_t seg = 1; seg < cuts.size(); ++seg)
                i1q += quad::adaptive_simpson(f, cuts[seg - 1], cuts[seg], 1e-11);
        }
        trace.i1_quadrature = i1q;
    } else {
        trace.i1_quadrature = std::numeric_limits<double>::quiet_NaN();
    }
    return trace;
}

BoundReport verify_dn_lower_bound(const NormalizedDesign& normalized, const Vector& errors,
                                  const ConvexLoss& loss, double eps, int n_directions,
                                  std::uint64_t seed, double c1) {
    if (n_directions < 1) throw ConfigError("verify_dn_lower_bound: need >= 1 direction");
    const Index n = normalized.rows.rows();
    const Index p = normalized.rows.cols();

    BoundReport report;
    report.eps = eps;
    report.c1 = c1;
    report.n_directions = n_directions;
    report.i1_threshold = c1 * eps * eps * static_cast<double>(n) / 8.0;
    report.min_total = std::numeric_limits<double>::infinity();
    report.min_i1 = std::numeric_limits<double>::infinity();
    const double d_n = normalized.rows.rowwise().squaredNorm().maxCoeff();
    report.c2 = static_cast<double>(n) * d_n;
    report.max_abs_shift = eps * std::sqrt(static_cast<double>(n) * d_n);

    Rng rng(derive_seed(seed, 0x51f7, static_cast<std::uint64_t>(n)));
    for (int d = 0; d < n_directions; ++d) {
        const Vector gamma = random_unit_vector(p, rng);
        const DnTrace trace = dn_trace(normalized, errors, loss, eps, gamma, d == 0);
        report.min_total = std::min(report.min_total, trace.total);
        report.min_i1 = std::min(report.min_i1, trace.i1);
        report.max_abs_i2 = std::max(report.max_abs_i2, std::abs(trace.i2));
        report.max_decomposition_residual = std::max(
            report.max_decomposition_residual, std::abs(trace.total - (trace.i1 + trace.i2)));
        if (d == 0) {
            const double denom = std::max({std::abs(trace.i1), std::abs(trace.i1_quadrature), 1e-12});
            report.quadrature_rel_err = std::abs(trace.i1 - trace.i1_quadrature) / denom;
        }
    }
    report.i1_bound_holds = report.min_i1 >= report.i1_threshold;
    report.total_positive = report.min_total > 0.0;
    return report;
}

}  // namespace mest
