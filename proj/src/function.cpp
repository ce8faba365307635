#include "opialtk/function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "opialtk/errors.hpp"
#include "opialtk/util.hpp"

namespace opialtk {

namespace {

constexpr int kFallbackOrderCap = 6;

/// Weights of the finite-difference rule for derivative order k at point z
/// over the given nodes (Fornberg's recurrence).
std::vector<double> fd_weights(double z, const std::vector<double>& nodes, int k) {
    const int n = static_cast<int>(nodes.size());
    std::vector<double> w(static_cast<std::size_t>(n) * static_cast<std::size_t>(k + 1), 0.0);
    auto at = [&](int i, int m) -> double& {
        return w[static_cast<std::size_t>(i) * static_cast<std::size_t>(k + 1) +
                 static_cast<std::size_t>(m)];
    };
    double c1 = 1.0;
    double c4 = nodes[0] - z;
    at(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, k);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[static_cast<std::size_t>(i)] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[static_cast<std::size_t>(i)] - nodes[static_cast<std::size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int m = mn; m >= 1; --m) {
                    at(i, m) = c1 * (m * at(i - 1, m - 1) - c5 * at(i - 1, m)) / c2;
                }
                at(i, 0) = -c1 * c5 * at(i - 1, 0) / c2;
            }
            for (int m = mn; m >= 1; --m) {
                at(j, m) = (c4 * at(j, m) - m * at(j, m - 1)) / c3;
            }
            at(j, 0) = c4 * at(j, 0) / c3;
        }
        c1 = c2;
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = at(i, k);
    return out;
}

struct StencilPlan {
    std::vector<double> offsets; // node offsets in units of h
    bool symmetric = true;
};

/// Integer-offset stencil for order k at step h around x, slid to stay in
/// the domain. Symmetric when it fits; one-sided otherwise.
StencilPlan plan_stencil(const Interval& dom, int k, double x, double h) {
    // Symmetric stencil: odd node count, second-order accurate with an even
    // error expansion. One-sided replacements keep k+2 nodes so the leading
    // error stays O(h^2).
    const int n_sym = (k % 2 == 0) ? k + 1 : k + 2;
    const int half = (n_sym - 1) / 2;
    const double slack = 1e-12 * dom.width();
    auto fits = [&](double lo_off, double hi_off) {
        return x + lo_off * h >= dom.lo - slack && x + hi_off * h <= dom.hi + slack;
    };
    StencilPlan plan;
    if (fits(-half, half)) {
        for (int j = -half; j <= half; ++j) plan.offsets.push_back(j);
        plan.symmetric = true;
        return plan;
    }
    const int n_one = k + 2;
    // Slide an n_one-node window of unit spacing to fit inside the domain.
    const double span = (n_one - 1) * h;
    if (span > dom.width() + slack) {
        throw DomainError("derivative stencil does not fit in the domain (k=" +
                          std::to_string(k) + ", h=" + format_double(h) + ")");
    }
    double start = -static_cast<double>(n_one - 1) / 2.0;
    const double min_start = (dom.lo - x) / h;
    const double max_start = (dom.hi - x) / h - (n_one - 1);
    start = std::max(start, min_start);
    start = std::min(start, max_start);
    for (int j = 0; j < n_one; ++j) plan.offsets.push_back(start + j);
    plan.symmetric = false;
    return plan;
}

double apply_stencil(const SmoothFunction& f, const StencilPlan& plan, int k, double x,
                     double h) {
    std::vector<double> nodes;
    nodes.reserve(plan.offsets.size());
    for (double off : plan.offsets) nodes.push_back(x + off * h);
    const auto w = fd_weights(x, nodes, k);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double v = f(nodes[i]);
        if (!std::isfinite(v)) {
            throw EvaluationError("non-finite function value at x=" + format_double(nodes[i]));
        }
        acc += w[i] * v;
    }
    if (!std::isfinite(acc)) {
        throw EvaluationError("non-finite derivative estimate at x=" + format_double(x));
    }
    return acc;
}

void spot_check_continuity(const Interval& dom, const std::function<double(int, double)>& eval) {
    const double delta = 1e-9 * dom.width();
    double scale = 1.0;
    std::vector<double> probes = linspace(dom.lo + delta, dom.hi - delta, 9);
    std::vector<double> values;
    values.reserve(probes.size());
    for (double x : probes) {
        const double v = eval(0, x);
        if (!std::isfinite(v)) {
            throw EvaluationError("non-finite value at x=" + format_double(x));
        }
        values.push_back(v);
        scale = std::max(scale, std::fabs(v));
    }
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const double up = eval(0, probes[i] + delta);
        const double dn = eval(0, probes[i] - delta);
        if (std::fabs(up - values[i]) > 1e-3 * scale || std::fabs(dn - values[i]) > 1e-3 * scale) {
            throw EvaluationError("order-0 evaluation not continuous near x=" +
                                  format_double(probes[i]));
        }
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = s.find(sep, pos);
        if (next == std::string::npos) {
            parts.push_back(s.substr(pos));
            break;
        }
        parts.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return parts;
}

double parse_number(const std::string& text, const std::string& spec) {
    bool ok = false;
    const double v = parse_double(text, ok);
    if (!ok || !std::isfinite(v)) {
        throw ParseError("bad number '" + text + "' in function spec '" + spec + "'");
    }
    return v;
}

} // namespace

struct SmoothFunction::Impl {
    Interval domain;
    int max_order = 0;
    Kind kind = Kind::exact_derivatives;
    int exact_orders = 0; // orders served by eval directly; beyond -> FD of order 0
    std::function<double(int, double)> eval;
    std::string spec;
    std::vector<double> breakpoints;
};

SmoothFunction SmoothFunction::exact(Interval domain, int max_order,
                                     std::function<double(int, double)> eval, std::string spec,
                                     std::vector<double> breakpoints) {
    spot_check_continuity(domain, eval);
    auto impl = std::make_shared<Impl>();
    impl->domain = domain;
    impl->max_order = max_order;
    impl->kind = Kind::exact_derivatives;
    impl->exact_orders = max_order;
    impl->eval = std::move(eval);
    impl->spec = std::move(spec);
    impl->breakpoints = std::move(breakpoints);
    SmoothFunction f;
    f.impl_ = std::move(impl);
    return f;
}

SmoothFunction SmoothFunction::fallback(Interval domain, std::function<double(double)> values,
                                        int max_order, std::string spec,
                                        std::vector<double> breakpoints) {
    auto eval = [fn = std::move(values)](int k, double x) -> double {
        (void)k;
        return fn(x);
    };
    return fallback_with_exact_orders(domain, 0, max_order, std::move(eval), std::move(spec),
                                      std::move(breakpoints));
}

SmoothFunction SmoothFunction::fallback_with_exact_orders(
    Interval domain, int exact_orders, int max_order, std::function<double(int, double)> eval,
    std::string spec, std::vector<double> breakpoints) {
    if (max_order > kFallbackOrderCap && exact_orders < max_order) {
        max_order = std::max(exact_orders, kFallbackOrderCap);
    }
    spot_check_continuity(domain, eval);
    auto impl = std::make_shared<Impl>();
    impl->domain = domain;
    impl->max_order = max_order;
    impl->kind = Kind::finite_difference_fallback;
    impl->exact_orders = exact_orders;
    impl->eval = std::move(eval);
    impl->spec = std::move(spec);
    impl->breakpoints = std::move(breakpoints);
    SmoothFunction f;
    f.impl_ = std::move(impl);
    return f;
}

const Interval& SmoothFunction::domain() const { return impl_->domain; }
int SmoothFunction::max_order() const { return impl_->max_order; }
SmoothFunction::Kind SmoothFunction::kind() const { return impl_->kind; }
const std::string& SmoothFunction::spec() const { return impl_->spec; }
const std::vector<double>& SmoothFunction::breakpoints() const { return impl_->breakpoints; }

double SmoothFunction::derivative(int k, double x) const {
    if (!impl_) throw EvaluationError("evaluation of an empty SmoothFunction");
    if (k < 0 || k > impl_->max_order) {
        throw DomainError("derivative order " + std::to_string(k) + " beyond max_order " +
                          std::to_string(impl_->max_order));
    }
    if (!impl_->domain.contains(x)) {
        throw DomainError("x=" + format_double(x) + " outside domain [" +
                          format_double(impl_->domain.lo) + ", " + format_double(impl_->domain.hi) +
                          "]");
    }
    x = impl_->domain.clamp(x);
    if (k <= impl_->exact_orders) {
        const double v = impl_->eval(k, x);
        if (!std::isfinite(v)) {
            throw EvaluationError("non-finite value (order " + std::to_string(k) + ") at x=" +
                                  format_double(x));
        }
        return v;
    }
    return numeric_derivative(*this, k, x, default_fd_step(k, x)).value;
}

double default_fd_step(int k, double x) {
    // Two Richardson levels push the truncation order to ~6, so the balance
    // point against eps/h^k round-off sits at eps^(1/(k+6)).
    const double eps = std::numeric_limits<double>::epsilon();
    return (1.0 + std::fabs(x)) * std::pow(eps, 1.0 / static_cast<double>(k + 6));
}

DerivEstimate numeric_derivative(const SmoothFunction& f, int k, double x, double h0) {
    if (k < 0 || k > kFallbackOrderCap) {
        throw DomainError("numeric derivative order must be in [0, 6], got " + std::to_string(k));
    }
    if (!(h0 > 0.0) || !std::isfinite(h0)) {
        throw DomainError("step h0 must be positive and finite");
    }
    if (!f.domain().contains(x)) {
        throw DomainError("x=" + format_double(x) + " outside domain");
    }
    if (k == 0) return {f(x), 0.0};

    // Shrink the step until the widest stencil fits; the one-sided slide in
    // plan_stencil handles proximity to a single endpoint.
    const int n_max = k + 2;
    double h = h0;
    while ((n_max - 1) * h > f.domain().width() && h > 1e-14) h *= 0.5;

    const auto plan = plan_stencil(f.domain(), k, x, h);
    const double d0 = apply_stencil(f, plan, k, x, h);
    const double d1 = apply_stencil(f, plan, k, x, h / 2.0);
    const double d2 = apply_stencil(f, plan, k, x, h / 4.0);

    // Leading error is O(h^2) either way; the second elimination order
    // depends on whether the expansion is even.
    const double r1a = (4.0 * d1 - d0) / 3.0;
    const double r1b = (4.0 * d2 - d1) / 3.0;
    const double f2 = plan.symmetric ? 16.0 : 8.0;
    const double r2 = (f2 * r1b - r1a) / (f2 - 1.0);
    if (!std::isfinite(r2)) {
        throw EvaluationError("non-finite derivative extrapolation at x=" + format_double(x));
    }
    return {r2, std::fabs(r2 - r1b)};
}

SmoothFunction derivative_function(const SmoothFunction& f, int k) {
    if (k < 0 || k > f.max_order()) {
        throw DomainError("derivative_function order out of range");
    }
    const int rem = f.max_order() - k;
    std::string tag = f.spec().empty() ? std::string{} : "d" + std::to_string(k) + "(" + f.spec() + ")";
    return SmoothFunction::exact(
        f.domain(), rem, [f, k](int j, double x) { return f.derivative(j + k, x); },
        std::move(tag), f.breakpoints());
}

namespace {

SmoothFunction make_const(double c, const Interval& dom, const std::string& spec) {
    return SmoothFunction::exact(
        dom, std::numeric_limits<int>::max(),
        [c](int k, double) { return k == 0 ? c : 0.0; }, spec);
}

SmoothFunction make_poly(std::vector<double> coeffs, const Interval& dom,
                         const std::string& spec) {
    return SmoothFunction::exact(
        dom, std::numeric_limits<int>::max(),
        [coeffs = std::move(coeffs)](int k, double x) {
            const std::size_t deg = coeffs.size();
            if (static_cast<std::size_t>(k) >= deg) return 0.0;
            // Horner on the k-times differentiated coefficient array.
            double acc = 0.0;
            for (std::size_t i = deg; i-- > static_cast<std::size_t>(k);) {
                double c = coeffs[i];
                for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j) {
                    c *= static_cast<double>(i - j);
                }
                acc = acc * x + c;
            }
            return acc;
        },
        spec);
}

SmoothFunction make_exp(double lambda, const Interval& dom, const std::string& spec) {
    return SmoothFunction::exact(
        dom, std::numeric_limits<int>::max(),
        [lambda](int k, double x) { return std::pow(lambda, k) * std::exp(lambda * x); }, spec);
}

SmoothFunction make_trig(bool is_sin, double omega, const Interval& dom,
                         const std::string& spec) {
    return SmoothFunction::exact(
        dom, std::numeric_limits<int>::max(),
        [is_sin, omega](int k, double x) {
            const double phase = omega * x + k * 1.5707963267948966;
            const double amp = std::pow(omega, k);
            return amp * (is_sin ? std::sin(phase) : std::cos(phase));
        },
        spec);
}

SmoothFunction make_tent(double a, const Interval& dom, const std::string& spec) {
    if (!(a > 0.0)) throw ParseError("tent width must be positive in '" + spec + "'");
    if (dom.lo < -1e-12 * a || dom.hi > a * (1.0 + 1e-12)) {
        throw ParseError("tent domain must lie inside [0, " + format_double(a) + "]");
    }
    const double mid = a / 2.0;
    return SmoothFunction::exact(
        dom, 1,
        [a, mid](int k, double x) {
            if (k == 0) return x <= mid ? x : a - x;
            return x < mid ? 1.0 : -1.0;
        },
        spec, {mid});
}

} // namespace

SmoothFunction parse_function(const std::string& spec, const Interval& domain) {
    const std::size_t colon = spec.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= spec.size()) {
        throw ParseError("malformed function spec '" + spec + "'");
    }
    const std::string head = spec.substr(0, colon);
    const std::string args = spec.substr(colon + 1);
    if (head == "const") {
        return make_const(parse_number(args, spec), domain, spec);
    }
    if (head == "poly") {
        std::vector<double> coeffs;
        for (const auto& part : split(args, ',')) coeffs.push_back(parse_number(part, spec));
        if (coeffs.empty()) throw ParseError("poly spec needs coefficients: '" + spec + "'");
        return make_poly(std::move(coeffs), domain, spec);
    }
    if (head == "exp") {
        return make_exp(parse_number(args, spec), domain, spec);
    }
    if (head == "sin" || head == "cos") {
        return make_trig(head == "sin", parse_number(args, spec), domain, spec);
    }
    if (head == "tent") {
        return make_tent(parse_number(args, spec), domain, spec);
    }
    throw ParseError("unknown function family '" + head + "' in '" + spec + "'");
}

SmoothFunction parse_function(const std::string& spec) {
    if (spec.rfind("tent:", 0) == 0) {
        const double a = parse_number(spec.substr(5), spec);
        if (!(a > 0.0)) throw ParseError("tent width must be positive in '" + spec + "'");
        return make_tent(a, Interval(0.0, a), spec);
    }
    return parse_function(spec, Interval(0.0, 1.0));
}

} // namespace opialtk
