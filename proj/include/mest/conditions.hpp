#pragma once

#include <mest/distribution.hpp>
#include <mest/loss.hpp>
#include <mest/reports.hpp>
#include <mest/types.hpp>

#include <vector>

namespace mest {

/// G(t) = E psi(e + t) by quadrature against the error density.  Uses the
/// symmetrized integrand over the positive axis, so heavy-tailed laws whose
/// raw first-moment integrand decays only like 1/(x ln^2 x) stay integrable
/// in double precision.  Throws NonIntegrable when E|psi(e+t)| diverges.
double g_function(const ErrorDistribution& dist, const ConvexLoss& loss, double t,
                  double tol = 1e-10);

/// Identification-bound evidence on the grid u = +-delta*k/50: c1 = min |G(u)|/|u|,
/// mean_psi = G(0); passed iff c1 > 0 and |G(0)| <= 1e-6.  Also fills the
/// increment-bound fields from increment_bound.
ConditionReport check_identification(const ErrorDistribution& dist, const ConvexLoss& loss,
                                     double delta);

/// E[|psi(e)|^r 1{|e| <= cap}] by quadrature.
double truncated_psi_moment(const ErrorDistribution& dist, const ConvexLoss& loss, double r,
                            double cap);

/// E[psi(e)^2]; requires a bounded score or a law with the needed moments.
double psi_second_moment(const ErrorDistribution& dist, const ConvexLoss& loss);

/// Numerical finiteness classification of E|psi(e)|^r via truncated-moment
/// growth across decades: convergent moments have geometrically shrinking
/// decade increments, divergent ones do not.
struct MomentAudit {
    double exponent = 0.0;
    std::vector<double> caps;       // truncation levels
    std::vector<double> values;     // truncated moments
    double last_increment_ratio = 0.0;
    bool divergent = false;
    bool closed_form_divergent = false;  // from the law's moment rule
};

MomentAudit audit_psi_moment(const ErrorDistribution& dist, const ConvexLoss& loss, double r);

}  // namespace mest
