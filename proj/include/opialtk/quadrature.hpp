#pragma once

#include <functional>
#include <vector>

#include "opialtk/interval.hpp"

namespace opialtk {

/// Composite Gauss-Legendre policy: rule order, starting panel count,
/// tolerances, refinement cap, known breakpoints, and geometric grading
/// toward the integration endpoints (ratio 1/4 per level) for integrands
/// with mild endpoint singularities.
struct QuadratureSpec {
    int base_rule_order = 10;
    int initial_panels = 8;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_doublings = 10;
    std::vector<double> breakpoints;
    int endpoint_grading_levels = 6;

    void validate() const;

    /// Policy for integrals nested inside another integrand: tolerances
    /// tightened by 10x, same structure otherwise.
    QuadratureSpec inner() const {
        QuadratureSpec s = *this;
        s.rel_tol /= 10.0;
        s.abs_tol /= 10.0;
        return s;
    }
};

struct IntegralResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int panels_used = 0;
    bool converged = true;

    /// Function evaluations implied by the final refinement level.
    long nodes(const QuadratureSpec& spec) const {
        return static_cast<long>(panels_used) * spec.base_rule_order;
    }
};

/// Oriented integral of f over [lo, hi] (negative when hi < lo). Panels are
/// split at registered breakpoints; refinement doubles every panel until the
/// successive-value difference meets tolerance or max_doublings is reached
/// (converged = false in that case). Non-finite integrand values raise
/// EvaluationError.
IntegralResult integrate(const std::function<double(double)>& f, double lo, double hi,
                         const QuadratureSpec& spec);

/// One inner integral per outer node: integrand over [lo, hi], combined
/// into the outer integrand value by `combine`.
struct InnerIntegral {
    std::function<double(double)> integrand;
    double lo = 0.0;
    double hi = 0.0;
    std::function<double(double)> combine; // outer integrand value from inner value
};

/// Nested integral: the outer integrand at s is combine(inner integral at s).
/// Inner integrations run under spec.inner(); the returned error estimate
/// adds the inner estimates weighted by the outer rule, and a non-converged
/// inner integral marks the whole result non-converged.
IntegralResult integrate_nested(const std::function<InnerIntegral(double)>& outer, double lo,
                                double hi, const QuadratureSpec& spec);

/// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1]
/// (cached per order).
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_rule(int order);

} // namespace opialtk
