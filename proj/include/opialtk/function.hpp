#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "opialtk/interval.hpp"

namespace opialtk {

/// Central-difference derivative estimate with its extrapolation-based
/// error bound.
struct DerivEstimate {
    double value = 0.0;
    double error = 0.0;
};

/// Scalar function on an interval with derivative evaluation up to a
/// declared order. Immutable after construction; cheap to copy.
///
/// `exact_derivatives` functions evaluate every order from a closed-form
/// rule; `finite_difference_fallback` functions own an order-0 evaluator
/// and serve higher orders through Richardson-extrapolated central
/// differences (orders 1..6).
class SmoothFunction {
public:
    enum class Kind { exact_derivatives, finite_difference_fallback };

    SmoothFunction() = default;

    /// Function with closed-form derivatives of every order <= max_order.
    static SmoothFunction exact(Interval domain, int max_order,
                                std::function<double(int, double)> eval,
                                std::string spec = {},
                                std::vector<double> breakpoints = {});

    /// Function known only through its values; derivatives come from the
    /// numeric fallback (order cap 6).
    static SmoothFunction fallback(Interval domain, std::function<double(double)> values,
                                   int max_order = 6, std::string spec = {},
                                   std::vector<double> breakpoints = {});

    /// As `fallback`, but with a caller-supplied evaluator that already
    /// serves orders <= exact_orders; orders beyond that use finite
    /// differences of the order-0 values.
    static SmoothFunction fallback_with_exact_orders(
        Interval domain, int exact_orders, int max_order,
        std::function<double(int, double)> eval, std::string spec = {},
        std::vector<double> breakpoints = {});

    bool valid() const { return impl_ != nullptr; }
    const Interval& domain() const;
    int max_order() const;
    Kind kind() const;
    const std::string& spec() const;
    const std::vector<double>& breakpoints() const;

    /// f(x).
    double operator()(double x) const { return derivative(0, x); }

    /// f^(k)(x). Throws DomainError for x outside the domain or k beyond
    /// max_order; EvaluationError on non-finite results.
    double derivative(int k, double x) const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

/// k-th derivative of f at x estimated from central differences with two
/// levels of Richardson extrapolation. The stencil slides one-sidedly when
/// x is too close to an endpoint; if it cannot fit at all the call throws
/// DomainError. k = 0 returns f(x) with zero error.
DerivEstimate numeric_derivative(const SmoothFunction& f, int k, double x, double h0);

/// Step size balancing truncation against round-off for the extrapolated
/// stencil of order k.
double default_fd_step(int k, double x);

/// View of f's k-th derivative as a function in its own right
/// (max_order reduced by k, same breakpoints).
SmoothFunction derivative_function(const SmoothFunction& f, int k = 1);

/// Builds one of the built-in families from its spec string:
///   const:<c>            constant c
///   poly:<c0>,<c1>,...   coefficients low-to-high degree
///   exp:<lambda>         e^(lambda x)
///   sin:<omega>          sin(omega x)
///   cos:<omega>          cos(omega x)
///   tent:<a>             piecewise-linear tent on [0,a], peak at a/2
/// All except tent have exact derivatives of any order; tent has
/// max_order 1 and registers a breakpoint at a/2.
SmoothFunction parse_function(const std::string& spec, const Interval& domain);

/// parse_function with the tent's implied domain [0,a] when the spec is a
/// tent and no narrower domain is wanted.
SmoothFunction parse_function(const std::string& spec);

} // namespace opialtk
