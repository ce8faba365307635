#pragma once

#include <optional>
#include <string>

#include "opialtk/function.hpp"
#include "opialtk/quadrature.hpp"
#include "opialtk/widder.hpp"

namespace opialtk {

struct ExponentTriple {
    double alpha = 1.0;
    double beta = 1.0;
    double r = 2.0;
};

enum class RegimeTag {
    main,
    i,
    ii,
    iii,
    iv,
    v,
    vi,
    vii,
    viii,
    ix,
    unclassified,
};

enum class BoundDirection { upper, lower, none };

struct Regime {
    RegimeTag tag = RegimeTag::unclassified;
    BoundDirection direction = BoundDirection::none;
};

const char* to_string(RegimeTag tag);
const char* to_string(BoundDirection dir);
RegimeTag parse_regime_tag(const std::string& text);

/// First match in the order: the main (upper-bound) region r > max(1, alpha)
/// with alpha, beta > 0, then conditions I..IX. Condition I coincides with
/// the main region, so triples in it always classify as MAIN; verifiers
/// treat MAIN and I interchangeably.
Regime classify_regime(const ExponentTriple& e);

/// One weighted-inequality instance: kernel, weights, h, optional explicit
/// y (absent -> y(s) is the representation integral of the kernel against
/// |h|, i.e. the equality case of the domination hypothesis), the base and
/// evaluation points, exponents, and the quadrature policy.
struct OpialProblem {
    KernelHandle kernel;
    SmoothFunction weight_u;
    SmoothFunction weight_v;
    SmoothFunction h;
    std::optional<SmoothFunction> y;
    double base_point = 0.0;
    double eval_point = 1.0;
    ExponentTriple exponents;
    QuadratureSpec quad;
    double v_floor = 1e-12;
    double value_floor = 0.0; // 0 -> 1e-6 x grid max of the floored quantity

    /// Validates weights/domains and merges function breakpoints into the
    /// quadrature policy. Throws WeightError / DomainError.
    static OpialProblem make(KernelHandle kernel, SmoothFunction u, SmoothFunction v,
                             SmoothFunction h, std::optional<SmoothFunction> y, double a,
                             double x, ExponentTriple exponents, QuadratureSpec quad = {});

    bool y_derived() const { return !y.has_value(); }
    Interval range() const;
    /// y(s), either the explicit function or the derived representation
    /// integral (by inner quadrature).
    double y_value(double s) const;
};

struct InequalityReport {
    std::string theorem; // classical | main | r2 | extreme | regime
    Regime regime;
    double lhs = 0.0;
    double constant = 0.0;
    double rhs_core = 0.0;
    double bound = 0.0;
    double ratio = 0.0; // lhs/bound for upper bounds, bound/lhs for lower
    bool satisfied = false;
    double quad_error = 0.0;
    bool as_printed_flag = false;
    bool converged = true; // engine diagnostic, not serialized
};

/// Inner weight profile P(s) = | integral_a^s v(t)^(-1/(r-1)) Phi(s,t)^(r/(r-1)) dt |.
/// Throws KernelNegativityError when Phi is genuinely negative on the range
/// and WeightError when v dips below its floor.
double p_weight(const OpialProblem& prob, double s);
IntegralResult p_weight_result(const OpialProblem& prob, double s);

/// Variant that raises the product v(t)^(-1/(r-1)) Phi(s,t) to r/(r-1) as a
/// whole. Kept for delta diagnostics against the standard form; the engine
/// itself never uses it.
double p_weight_alt(const OpialProblem& prob, double s);

/// The sharp-constant functional
/// C(x) = (alpha/(alpha+beta))^(alpha/r) *
///        | integral_a^x (u^r v^-alpha)^(1/(r-alpha)) P(s)^(beta(r-1)/(r-alpha)) ds |^((r-alpha)/r).
/// When the P-exponent is negative the outer integrand has a power-law
/// endpoint singularity at a; it is integrated under the smoothing
/// substitution s = a + (x-a) tau^4.
double opial_constant(const OpialProblem& prob);
IntegralResult opial_constant_result(const OpialProblem& prob);

/// Left-hand functional | integral_a^x u(s) |y(s)|^beta |h(s)|^alpha ds |.
double lhs_functional(const OpialProblem& prob);
IntegralResult lhs_functional_result(const OpialProblem& prob);

/// Right-hand core | integral_a^x v(s) |h(s)|^r ds |.
double rhs_core(const OpialProblem& prob);
IntegralResult rhs_core_result(const OpialProblem& prob);

/// Upper bound with the general constant; requires the MAIN regime.
InequalityReport verify_main(const OpialProblem& prob);

/// The r = 2 specialization evaluated through its own displayed formulas
/// (no delegation to the general path); requires r = 2, 0 < alpha < 2,
/// beta > 0.
InequalityReport verify_r2(const OpialProblem& prob);

/// Sup-norm analogue evaluated exactly as displayed (inner integral runs to
/// x, the v sup-norm carries exponent beta). Known not to be scale-correct
/// in v; reports carry as_printed_flag = true and satisfaction is recorded,
/// not asserted.
InequalityReport extreme_bound(const OpialProblem& prob);

/// Direction-aware verification for regimes I..IX (MAIN accepted as I):
/// I-III upper bound, IV-IX lower bound, with the general constant.
/// Requires derived y (the equality case).
InequalityReport verify_regime(const OpialProblem& prob);

/// Classical bound lhs <= (|x-a|/4) rhs_core for alpha = beta = 1, r = 2,
/// unit weights; y must be supplied.
InequalityReport verify_classical(const OpialProblem& prob);

/// Direction-appropriate slack: 10 x quad_error + 1e-9 max(|lhs|, |bound|).
double tolerance_slack(const InequalityReport& report);

} // namespace opialtk
