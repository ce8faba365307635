#include "opialtk/opial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "opialtk/errors.hpp"
#include "opialtk/util.hpp"

namespace opialtk {

namespace {

constexpr double kExpTol = 1e-12;
constexpr int kTransformPower = 4;

double pow_checked(double base, double expo, const char* what) {
    if (base < 0.0) {
        if (base > -1e-12) {
            base = 0.0;
        } else {
            throw ExponentError(std::string(what) + ": negative base " + format_double(base) +
                                " raised to power " + format_double(expo));
        }
    }
    if (base == 0.0) {
        if (expo > 0.0) return 0.0;
        if (expo == 0.0) return 1.0;
        throw ExponentError(std::string(what) + ": zero base raised to negative power " +
                            format_double(expo));
    }
    const double v = std::pow(base, expo);
    if (!std::isfinite(v)) {
        throw EvaluationError(std::string(what) + ": pow(" + format_double(base) + ", " +
                              format_double(expo) + ") not finite");
    }
    return v;
}

/// Kernel wrapper that zeroes determinant-round-off negatives and rejects
/// genuinely negative values (the domination hypothesis needs Phi >= 0).
std::function<double(double, double)> nonneg_kernel(const KernelHandle& kernel) {
    auto peak = std::make_shared<double>(1.0);
    return [kernel, peak](double x, double t) {
        const double phi = kernel(x, t);
        if (!std::isfinite(phi)) {
            throw EvaluationError("non-finite kernel value at (" + format_double(x) + ", " +
                                  format_double(t) + ")");
        }
        if (phi < 0.0) {
            if (phi >= -1e-8 * *peak) return 0.0;
            throw KernelNegativityError("kernel negative at (" + format_double(x) + ", " +
                                        format_double(t) + "): " + format_double(phi));
        }
        if (phi > *peak) *peak = phi;
        return phi;
    };
}

double grid_max_abs(const std::function<double(double)>& f, const Interval& range, int n = 257) {
    double m = 0.0;
    for (double x : linspace(range.lo, range.hi, n)) m = std::max(m, std::fabs(f(x)));
    return m;
}

double floor_for(const OpialProblem& prob, const std::function<double(double)>& f) {
    if (prob.value_floor > 0.0) return prob.value_floor;
    return 1e-6 * grid_max_abs(f, prob.range());
}

void require_floored(const OpialProblem& prob, const std::function<double(double)>& f,
                     const char* name) {
    const double floor = floor_for(prob, f);
    for (double s : linspace(prob.range().lo, prob.range().hi, 257)) {
        if (std::fabs(f(s)) < floor) {
            throw DegenerateIntegrandError(std::string(name) + " falls below its floor " +
                                           format_double(floor) + " near s=" + format_double(s) +
                                           " (negative-exponent regime)");
        }
    }
}

/// Outer-integral policy along [a, x]. Integrands with a power-law zero at
/// the base point are integrated under s = a + (x - a) tau^4, which keeps
/// P(s)^q and |y|^beta integrands bounded for the exponent ranges the
/// generators emit (q, beta > -0.75).
struct OuterPath {
    double a = 0.0;
    double x = 1.0;
    bool transformed = false;

    double s_of(double tau) const {
        double p = tau * tau;
        p *= p;
        return a + (x - a) * p;
    }
    double jacobian(double tau) const {
        return (x - a) * kTransformPower * tau * tau * tau;
    }
};

QuadratureSpec outer_spec(const OpialProblem& prob, const OuterPath& path) {
    QuadratureSpec spec = prob.quad;
    if (!path.transformed) return spec;
    std::vector<double> mapped;
    for (double bp : spec.breakpoints) {
        const double ratio = (bp - path.a) / (path.x - path.a);
        if (ratio > 0.0 && ratio < 1.0) {
            mapped.push_back(std::pow(ratio, 1.0 / kTransformPower));
        }
    }
    spec.breakpoints = std::move(mapped);
    return spec;
}

IntegralResult integrate_outer(const OpialProblem& prob, const OuterPath& path,
                               const std::function<double(double)>& f) {
    const QuadratureSpec spec = outer_spec(prob, path);
    if (!path.transformed) return integrate(f, path.a, path.x, spec);
    auto g = [&path, &f](double tau) {
        if (tau <= 0.0) return 0.0;
        return f(path.s_of(tau)) * path.jacobian(tau);
    };
    return integrate(g, 0.0, 1.0, spec);
}

IntegralResult integrate_outer_nested(const OpialProblem& prob, const OuterPath& path,
                                      const std::function<InnerIntegral(double)>& make_inner) {
    const QuadratureSpec spec = outer_spec(prob, path);
    if (!path.transformed) return integrate_nested(make_inner, path.a, path.x, spec);
    auto outer = [&path, &make_inner](double tau) {
        InnerIntegral inner = make_inner(path.s_of(tau));
        const double jac = tau <= 0.0 ? 0.0 : path.jacobian(tau);
        auto base = std::move(inner.combine);
        inner.combine = [base = std::move(base), jac](double v) {
            return jac == 0.0 ? 0.0 : base(v) * jac;
        };
        return inner;
    };
    return integrate_nested(outer, 0.0, 1.0, spec);
}

/// Inner integrand of P(s): v(t)^(-1/(r-1)) Phi(s,t)^(r/(r-1)) on [a, s].
InnerIntegral make_p_inner(const OpialProblem& prob, double s,
                           const std::function<double(double, double)>& phi) {
    const double r = prob.exponents.r;
    const double v_exp = -1.0 / (r - 1.0);
    const double k_exp = r / (r - 1.0);
    InnerIntegral inner;
    inner.lo = prob.base_point;
    inner.hi = s;
    inner.integrand = [&prob, s, phi, v_exp, k_exp](double t) {
        const double vt = prob.weight_v(t);
        if (vt < prob.v_floor) {
            throw WeightError("v(" + format_double(t) + ") = " + format_double(vt) +
                              " below floor " + format_double(prob.v_floor));
        }
        return std::pow(vt, v_exp) * pow_checked(phi(s, t), k_exp, "P kernel power");
    };
    inner.combine = [](double v) { return std::fabs(v); };
    return inner;
}

void require_r_not_one(const OpialProblem& prob) {
    if (std::fabs(prob.exponents.r - 1.0) < kExpTol) {
        throw ExponentError("r = 1 makes the inner exponent r/(r-1) degenerate");
    }
}

double safe_ratio(double num, double den) {
    if (den != 0.0) return num / den;
    if (num == 0.0) return 1.0;
    return std::numeric_limits<double>::infinity();
}

InequalityReport zero_length_report(const OpialProblem& prob, const char* theorem,
                                    BoundDirection dir, bool as_printed = false) {
    InequalityReport rep;
    rep.theorem = theorem;
    rep.regime = classify_regime(prob.exponents);
    rep.regime.direction = dir;
    rep.lhs = rep.constant = rep.rhs_core = rep.bound = 0.0;
    rep.ratio = 1.0;
    rep.satisfied = true;
    rep.quad_error = 0.0;
    rep.as_printed_flag = as_printed;
    return rep;
}

struct BoundPieces {
    double bound = 0.0;
    double error = 0.0;
};

/// bound = C * rhs^p with first-order error propagation.
BoundPieces combine_bound(const IntegralResult& c, const IntegralResult& rhs, double p) {
    BoundPieces out;
    const double rhs_pow = pow_checked(rhs.value, p, "rhs core power");
    out.bound = c.value * rhs_pow;
    out.error = rhs_pow * c.error_estimate;
    if (rhs.value > 0.0) {
        out.error += std::fabs(c.value * p) * std::pow(rhs.value, p - 1.0) * rhs.error_estimate;
    }
    return out;
}

} // namespace

const char* to_string(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::main: return "MAIN";
        case RegimeTag::i: return "I";
        case RegimeTag::ii: return "II";
        case RegimeTag::iii: return "III";
        case RegimeTag::iv: return "IV";
        case RegimeTag::v: return "V";
        case RegimeTag::vi: return "VI";
        case RegimeTag::vii: return "VII";
        case RegimeTag::viii: return "VIII";
        case RegimeTag::ix: return "IX";
        case RegimeTag::unclassified: return "UNCLASSIFIED";
    }
    return "UNCLASSIFIED";
}

const char* to_string(BoundDirection dir) {
    switch (dir) {
        case BoundDirection::upper: return "upper-bound";
        case BoundDirection::lower: return "lower-bound";
        case BoundDirection::none: return "n/a";
    }
    return "n/a";
}

RegimeTag parse_regime_tag(const std::string& text) {
    static const std::pair<const char*, RegimeTag> table[] = {
        {"MAIN", RegimeTag::main}, {"I", RegimeTag::i},     {"II", RegimeTag::ii},
        {"III", RegimeTag::iii},   {"IV", RegimeTag::iv},   {"V", RegimeTag::v},
        {"VI", RegimeTag::vi},     {"VII", RegimeTag::vii}, {"VIII", RegimeTag::viii},
        {"IX", RegimeTag::ix},     {"UNCLASSIFIED", RegimeTag::unclassified},
    };
    for (const auto& [name, tag] : table) {
        if (text == name) return tag;
    }
    throw ParseError("unknown regime tag '" + text + "'");
}

Regime classify_regime(const ExponentTriple& e) {
    const double a = e.alpha, b = e.beta, r = e.r;
    auto upper = [](RegimeTag t) { return Regime{t, BoundDirection::upper}; };
    auto lower = [](RegimeTag t) { return Regime{t, BoundDirection::lower}; };
    if (r > std::max(1.0, a) && a > 0.0 && b > 0.0) return upper(RegimeTag::main);
    if (r > 1.0 && b > 0.0 && 0.0 < a && a < r) return upper(RegimeTag::i); // subsumed by MAIN
    if (r < a && a < 0.0 && b < 0.0) return upper(RegimeTag::ii);
    if (-a < b && b < 0.0 && 0.0 < a && a < r && r < 1.0) return upper(RegimeTag::iii);
    if (b > 0.0 && 0.0 < r && r < std::min(a, 1.0)) return lower(RegimeTag::iv);
    if (a < 0.0 && 0.0 < r && r < 1.0 && 0.0 < b && b < -a) return lower(RegimeTag::v);
    if (b < 0.0 && a < 0.0 && r > 1.0) return lower(RegimeTag::vi);
    if (1.0 < r && r < a && -a < b && b < 0.0) return lower(RegimeTag::vii);
    if (b > 0.0 && r < 0.0 && 0.0 < a) return lower(RegimeTag::viii);
    if (a < r && r < 0.0 && 0.0 < b && b < -a) return lower(RegimeTag::ix);
    return Regime{RegimeTag::unclassified, BoundDirection::none};
}

OpialProblem OpialProblem::make(KernelHandle kernel, SmoothFunction u, SmoothFunction v,
                                SmoothFunction h, std::optional<SmoothFunction> y, double a,
                                double x, ExponentTriple exponents, QuadratureSpec quad) {
    quad.validate();
    if (!std::isfinite(a) || !std::isfinite(x)) throw DomainError("a and x must be finite");
    OpialProblem prob;
    prob.kernel = std::move(kernel);
    prob.weight_u = std::move(u);
    prob.weight_v = std::move(v);
    prob.h = std::move(h);
    prob.y = std::move(y);
    prob.base_point = a;
    prob.eval_point = x;
    prob.exponents = exponents;
    prob.quad = std::move(quad);

    if (a != x) {
        const Interval range = prob.range();
        auto check_domain = [&range](const SmoothFunction& f, const char* name) {
            if (!f.domain().contains(range)) {
                throw DomainError(std::string(name) + " domain does not cover [a, x]");
            }
        };
        check_domain(prob.weight_u, "u");
        check_domain(prob.weight_v, "v");
        check_domain(prob.h, "h");
        if (prob.y) check_domain(*prob.y, "y");
        if (prob.kernel.source() == KernelHandle::Source::widder &&
            !prob.kernel.family().domain().contains(range)) {
            throw DomainError("kernel family domain does not cover [a, x]");
        }

        double u_scale = 1.0;
        for (double s : linspace(range.lo, range.hi, 257)) {
            u_scale = std::max(u_scale, std::fabs(prob.weight_u(s)));
        }
        for (double s : linspace(range.lo, range.hi, 257)) {
            if (prob.weight_u(s) < -1e-12 * u_scale) {
                throw WeightError("u(" + format_double(s) + ") is negative");
            }
            if (prob.weight_v(s) < prob.v_floor) {
                throw WeightError("v(" + format_double(s) + ") below floor " +
                                  format_double(prob.v_floor));
            }
        }

        auto merge = [&prob, &range](const SmoothFunction& f) {
            for (double bp : f.breakpoints()) {
                if (bp > range.lo && bp < range.hi) prob.quad.breakpoints.push_back(bp);
            }
        };
        merge(prob.weight_u);
        merge(prob.weight_v);
        merge(prob.h);
        if (prob.y) merge(*prob.y);
        std::sort(prob.quad.breakpoints.begin(), prob.quad.breakpoints.end());
        prob.quad.breakpoints.erase(
            std::unique(prob.quad.breakpoints.begin(), prob.quad.breakpoints.end()),
            prob.quad.breakpoints.end());
    }
    return prob;
}

Interval OpialProblem::range() const {
    const double lo = std::min(base_point, eval_point);
    const double hi = std::max(base_point, eval_point);
    if (lo == hi) {
        // Degenerate span; widen trivially so Interval stays valid.
        return Interval(lo, hi + 1.0);
    }
    return Interval(lo, hi);
}

double OpialProblem::y_value(double s) const {
    if (y) return (*y)(s);
    auto phi = nonneg_kernel(kernel);
    auto res = integrate(
        [this, s, &phi](double t) { return phi(s, t) * std::fabs(h(t)); }, base_point, s,
        quad.inner());
    return res.value;
}

IntegralResult p_weight_result(const OpialProblem& prob, double s) {
    require_r_not_one(prob);
    if (s == prob.base_point) return {0.0, 0.0, 0, true};
    auto phi = nonneg_kernel(prob.kernel);
    InnerIntegral inner = make_p_inner(prob, s, phi);
    IntegralResult res = integrate(inner.integrand, inner.lo, inner.hi, prob.quad);
    res.value = std::fabs(res.value);
    return res;
}

double p_weight(const OpialProblem& prob, double s) { return p_weight_result(prob, s).value; }

double p_weight_alt(const OpialProblem& prob, double s) {
    require_r_not_one(prob);
    if (s == prob.base_point) return 0.0;
    const double r = prob.exponents.r;
    const double v_exp = -1.0 / (r - 1.0);
    const double k_exp = r / (r - 1.0);
    auto phi = nonneg_kernel(prob.kernel);
    auto res = integrate(
        [&, s](double t) {
            const double vt = prob.weight_v(t);
            if (vt < prob.v_floor) throw WeightError("v below floor");
            return pow_checked(std::pow(vt, v_exp) * phi(s, t), k_exp, "P-alt power");
        },
        prob.base_point, s, prob.quad);
    return std::fabs(res.value);
}

IntegralResult opial_constant_result(const OpialProblem& prob) {
    require_r_not_one(prob);
    const double alpha = prob.exponents.alpha;
    const double beta = prob.exponents.beta;
    const double r = prob.exponents.r;
    if (std::fabs(alpha + beta) < kExpTol) {
        throw ExponentError("alpha + beta = 0 degenerates the constant");
    }
    if (std::fabs(r - alpha) < kExpTol) {
        throw ExponentError("r = alpha degenerates the constant");
    }
    if (prob.eval_point == prob.base_point) return {0.0, 0.0, 0, true};

    const double lead = pow_checked(alpha / (alpha + beta), alpha / r, "constant prefactor");
    const double w_exp = 1.0 / (r - alpha);
    const double p_exp = beta * (r - 1.0) / (r - alpha);
    const double outer_exp = (r - alpha) / r;

    auto phi = nonneg_kernel(prob.kernel);
    OuterPath path{prob.base_point, prob.eval_point, p_exp < -kExpTol};
    auto make_inner = [&prob, &phi, w_exp, p_exp](double s) {
        InnerIntegral inner = make_p_inner(prob, s, phi);
        inner.combine = [&prob, s, w_exp, p_exp](double p_raw) {
            const double us = prob.weight_u(s);
            const double vs = prob.weight_v(s);
            const double weight = pow_checked(
                std::pow(us, prob.exponents.r) * std::pow(vs, -prob.exponents.alpha), w_exp,
                "constant weight");
            return weight * pow_checked(std::fabs(p_raw), p_exp, "P power in constant");
        };
        return inner;
    };
    const IntegralResult outer = integrate_outer_nested(prob, path, make_inner);

    IntegralResult res;
    const double core = std::fabs(outer.value);
    res.value = lead * pow_checked(core, outer_exp, "constant outer power");
    if (core > 0.0) {
        res.error_estimate =
            lead * std::fabs(outer_exp) * std::pow(core, outer_exp - 1.0) * outer.error_estimate;
    } else {
        res.error_estimate = lead * std::pow(outer.error_estimate, std::max(outer_exp, 0.0));
    }
    res.panels_used = outer.panels_used;
    res.converged = outer.converged;
    return res;
}

double opial_constant(const OpialProblem& prob) { return opial_constant_result(prob).value; }

IntegralResult lhs_functional_result(const OpialProblem& prob) {
    const double alpha = prob.exponents.alpha;
    const double beta = prob.exponents.beta;
    if (prob.eval_point == prob.base_point) return {0.0, 0.0, 0, true};

    if (alpha < 0.0) {
        require_floored(prob, [&prob](double s) { return prob.h(s); }, "|h|");
    }
    if (beta < 0.0 && !prob.y_derived()) {
        require_floored(prob, [&prob](double s) { return (*prob.y)(s); }, "|y|");
    }

    // A derived y vanishes at the base point, so negative beta makes the
    // integrand singular there; route through the smoothing substitution.
    OuterPath path{prob.base_point, prob.eval_point, beta < -kExpTol && prob.y_derived()};

    IntegralResult res;
    if (prob.y_derived()) {
        auto phi = nonneg_kernel(prob.kernel);
        auto make_inner = [&prob, &phi, alpha, beta](double s) {
            InnerIntegral inner;
            inner.lo = prob.base_point;
            inner.hi = s;
            inner.integrand = [&prob, &phi, s](double t) {
                return phi(s, t) * std::fabs(prob.h(t));
            };
            inner.combine = [&prob, s, alpha, beta](double y_raw) {
                return prob.weight_u(s) *
                       pow_checked(std::fabs(y_raw), beta, "|y|^beta") *
                       pow_checked(std::fabs(prob.h(s)), alpha, "|h|^alpha");
            };
            return inner;
        };
        res = integrate_outer_nested(prob, path, make_inner);
    } else {
        auto f = [&prob, alpha, beta](double s) {
            return prob.weight_u(s) * pow_checked(std::fabs((*prob.y)(s)), beta, "|y|^beta") *
                   pow_checked(std::fabs(prob.h(s)), alpha, "|h|^alpha");
        };
        res = integrate_outer(prob, path, f);
    }
    res.value = std::fabs(res.value);
    return res;
}

double lhs_functional(const OpialProblem& prob) { return lhs_functional_result(prob).value; }

IntegralResult rhs_core_result(const OpialProblem& prob) {
    const double r = prob.exponents.r;
    if (prob.eval_point == prob.base_point) return {0.0, 0.0, 0, true};
    if (r < 0.0) {
        require_floored(prob, [&prob](double s) { return prob.h(s); }, "|h|");
    }
    auto f = [&prob, r](double s) {
        return prob.weight_v(s) * pow_checked(std::fabs(prob.h(s)), r, "|h|^r");
    };
    IntegralResult res = integrate(f, prob.base_point, prob.eval_point, prob.quad);
    res.value = std::fabs(res.value);
    return res;
}

double rhs_core(const OpialProblem& prob) { return rhs_core_result(prob).value; }

InequalityReport verify_main(const OpialProblem& prob) {
    const Regime regime = classify_regime(prob.exponents);
    if (regime.tag != RegimeTag::main) {
        throw RegimeError(std::string("verify_main needs the MAIN regime, got ") +
                          to_string(regime.tag));
    }
    if (prob.eval_point == prob.base_point) {
        return zero_length_report(prob, "main", BoundDirection::upper);
    }
    const IntegralResult lhs = lhs_functional_result(prob);
    const IntegralResult c = opial_constant_result(prob);
    const IntegralResult rhs = rhs_core_result(prob);
    const double p = (prob.exponents.alpha + prob.exponents.beta) / prob.exponents.r;
    const BoundPieces bp = combine_bound(c, rhs, p);

    InequalityReport rep;
    rep.theorem = "main";
    rep.regime = regime;
    rep.lhs = lhs.value;
    rep.constant = c.value;
    rep.rhs_core = rhs.value;
    rep.bound = bp.bound;
    rep.quad_error = lhs.error_estimate + bp.error;
    rep.ratio = safe_ratio(rep.lhs, rep.bound);
    rep.satisfied = rep.lhs <= rep.bound + tolerance_slack(rep);
    rep.converged = lhs.converged && c.converged && rhs.converged;
    return rep;
}

InequalityReport verify_r2(const OpialProblem& prob) {
    const double alpha = prob.exponents.alpha;
    const double beta = prob.exponents.beta;
    if (std::fabs(prob.exponents.r - 2.0) > kExpTol) {
        throw RegimeError("the r = 2 specialization needs r = 2, got r = " +
                          format_double(prob.exponents.r));
    }
    if (!(alpha > 0.0 && alpha < 2.0 && beta > 0.0)) {
        throw RegimeError("the r = 2 specialization needs 0 < alpha < 2 and beta > 0");
    }
    if (prob.eval_point == prob.base_point) {
        return zero_length_report(prob, "r2", BoundDirection::upper);
    }

    // Specialized displays: P~(s) = |int v^-1 Phi^2| and
    // C~(x) = (a/(a+b))^(a/2) (int (u^2 v^-a)^(1/(2-a)) P~^(b/(2-a)))^((2-a)/2).
    auto phi = nonneg_kernel(prob.kernel);
    auto make_inner = [&prob, &phi, alpha, beta](double s) {
        InnerIntegral inner;
        inner.lo = prob.base_point;
        inner.hi = s;
        inner.integrand = [&prob, &phi, s](double t) {
            const double vt = prob.weight_v(t);
            if (vt < prob.v_floor) throw WeightError("v below floor");
            const double k = phi(s, t);
            return k * k / vt;
        };
        inner.combine = [&prob, s, alpha, beta](double p_raw) {
            const double us = prob.weight_u(s);
            const double vs = prob.weight_v(s);
            const double weight =
                pow_checked(us * us * std::pow(vs, -alpha), 1.0 / (2.0 - alpha), "r2 weight");
            return weight *
                   pow_checked(std::fabs(p_raw), beta / (2.0 - alpha), "r2 P power");
        };
        return inner;
    };
    OuterPath path{prob.base_point, prob.eval_point, false};
    const IntegralResult outer = integrate_outer_nested(prob, path, make_inner);

    IntegralResult c;
    const double lead = pow_checked(alpha / (alpha + beta), alpha / 2.0, "r2 prefactor");
    const double core = std::fabs(outer.value);
    const double outer_exp = (2.0 - alpha) / 2.0;
    c.value = lead * pow_checked(core, outer_exp, "r2 outer power");
    c.error_estimate = core > 0.0 ? lead * outer_exp * std::pow(core, outer_exp - 1.0) *
                                        outer.error_estimate
                                  : lead * std::pow(outer.error_estimate, outer_exp);
    c.converged = outer.converged;

    const IntegralResult lhs = lhs_functional_result(prob);
    const IntegralResult rhs = rhs_core_result(prob);
    const BoundPieces bp = combine_bound(c, rhs, (alpha + beta) / 2.0);

    InequalityReport rep;
    rep.theorem = "r2";
    rep.regime = classify_regime(prob.exponents);
    rep.lhs = lhs.value;
    rep.constant = c.value;
    rep.rhs_core = rhs.value;
    rep.bound = bp.bound;
    rep.quad_error = lhs.error_estimate + bp.error;
    rep.ratio = safe_ratio(rep.lhs, rep.bound);
    rep.satisfied = rep.lhs <= rep.bound + tolerance_slack(rep);
    rep.converged = lhs.converged && c.converged && rhs.converged;
    return rep;
}

InequalityReport extreme_bound(const OpialProblem& prob) {
    const double alpha = prob.exponents.alpha;
    const double beta = prob.exponents.beta;
    const double r = prob.exponents.r;
    if (!(alpha > 0.0 && beta > 0.0 && r > std::max(1.0, alpha))) {
        throw RegimeError("the sup-norm bound needs alpha, beta > 0 and r > max(1, alpha)");
    }
    if (prob.eval_point == prob.base_point) {
        return zero_length_report(prob, "extreme", BoundDirection::upper, true);
    }

    // As displayed: the inner integral runs over the whole [a, x] for every
    // outer w, the kernel enters unsigned inside |.|, and the v sup-norm
    // carries the beta exponent.
    const double inner_exp = (r - alpha) / r;
    auto make_inner = [&prob, inner_exp](double w) {
        InnerIntegral inner;
        inner.lo = prob.base_point;
        inner.hi = prob.eval_point;
        inner.integrand = [&prob, w](double t) { return prob.weight_v(t) * prob.kernel(w, t); };
        inner.combine = [&prob, w, inner_exp](double raw) {
            return prob.weight_u(w) *
                   pow_checked(std::fabs(raw), inner_exp, "extreme inner power");
        };
        return inner;
    };
    OuterPath path{prob.base_point, prob.eval_point, false};
    const IntegralResult outer = integrate_outer_nested(prob, path, make_inner);

    const Interval range = prob.range();
    const double sup_v = grid_max_abs([&prob](double s) { return prob.weight_v(s); }, range, 1025);
    const double sup_h = grid_max_abs([&prob](double s) { return prob.h(s); }, range, 1025);
    const double factors =
        pow_checked(sup_v, beta, "||v|| power") * pow_checked(sup_h, alpha + beta, "||h|| power");

    const IntegralResult lhs = lhs_functional_result(prob);

    InequalityReport rep;
    rep.theorem = "extreme";
    rep.regime = classify_regime(prob.exponents);
    rep.regime.direction = BoundDirection::upper;
    rep.lhs = lhs.value;
    rep.constant = factors; // the sup-norm multiplier
    rep.rhs_core = std::fabs(outer.value);
    rep.bound = std::fabs(outer.value) * factors;
    rep.quad_error = lhs.error_estimate + factors * outer.error_estimate;
    rep.ratio = safe_ratio(rep.lhs, rep.bound);
    rep.satisfied = rep.lhs <= rep.bound + tolerance_slack(rep);
    rep.as_printed_flag = true;
    rep.converged = lhs.converged && outer.converged;
    return rep;
}

InequalityReport verify_regime(const OpialProblem& prob) {
    const Regime regime = classify_regime(prob.exponents);
    if (regime.tag == RegimeTag::unclassified) {
        throw RegimeError("exponents fall in no verification regime");
    }
    if (!prob.y_derived()) {
        throw RegimeError("regime verification needs the representation-derived y "
                          "(the equality case of the domination hypothesis)");
    }
    if (prob.eval_point == prob.base_point) {
        return zero_length_report(prob, "regime", regime.direction);
    }
    const IntegralResult lhs = lhs_functional_result(prob);
    const IntegralResult c = opial_constant_result(prob);
    const IntegralResult rhs = rhs_core_result(prob);
    const double p = (prob.exponents.alpha + prob.exponents.beta) / prob.exponents.r;
    const BoundPieces bp = combine_bound(c, rhs, p);

    InequalityReport rep;
    rep.theorem = "regime";
    rep.regime = regime;
    rep.lhs = lhs.value;
    rep.constant = c.value;
    rep.rhs_core = rhs.value;
    rep.bound = bp.bound;
    rep.quad_error = lhs.error_estimate + bp.error;
    if (regime.direction == BoundDirection::upper) {
        rep.ratio = safe_ratio(rep.lhs, rep.bound);
        rep.satisfied = rep.lhs <= rep.bound + tolerance_slack(rep);
    } else {
        rep.ratio = safe_ratio(rep.bound, rep.lhs);
        rep.satisfied = rep.lhs >= rep.bound - tolerance_slack(rep);
    }
    rep.converged = lhs.converged && c.converged && rhs.converged;
    return rep;
}

InequalityReport verify_classical(const OpialProblem& prob) {
    if (prob.y_derived()) {
        throw RegimeError("the classical bound compares a supplied y = f against h = f'");
    }
    const ExponentTriple e = prob.exponents;
    if (std::fabs(e.alpha - 1.0) > kExpTol || std::fabs(e.beta - 1.0) > kExpTol ||
        std::fabs(e.r - 2.0) > kExpTol) {
        throw RegimeError("the classical bound needs alpha = beta = 1 and r = 2");
    }
    if (prob.eval_point == prob.base_point) {
        return zero_length_report(prob, "classical", BoundDirection::upper);
    }
    const Interval range = prob.range();
    for (double s : linspace(range.lo, range.hi, 33)) {
        if (std::fabs(prob.weight_u(s) - 1.0) > 1e-12 ||
            std::fabs(prob.weight_v(s) - 1.0) > 1e-12) {
            throw RegimeError("the classical bound needs unit weights");
        }
    }
    const IntegralResult lhs = lhs_functional_result(prob);
    const IntegralResult rhs = rhs_core_result(prob);
    const double quarter = std::fabs(prob.eval_point - prob.base_point) / 4.0;

    InequalityReport rep;
    rep.theorem = "classical";
    rep.regime = classify_regime(prob.exponents);
    rep.lhs = lhs.value;
    rep.constant = quarter;
    rep.rhs_core = rhs.value;
    rep.bound = quarter * rhs.value;
    rep.quad_error = lhs.error_estimate + quarter * rhs.error_estimate;
    rep.ratio = safe_ratio(rep.lhs, rep.bound);
    rep.satisfied = rep.lhs <= rep.bound + tolerance_slack(rep);
    rep.converged = lhs.converged && rhs.converged;
    return rep;
}

double tolerance_slack(const InequalityReport& report) {
    return 10.0 * report.quad_error +
           1e-9 * std::max(std::fabs(report.lhs), std::fabs(report.bound));
}

} // namespace opialtk
