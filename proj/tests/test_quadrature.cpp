#include <cmath>
#include <limits>

#include "doctest.h"
#include "opialtk/errors.hpp"
#include "opialtk/function.hpp"
#include "opialtk/quadrature.hpp"

using namespace opialtk;

TEST_CASE("rule exactness on a single panel") {
    QuadratureSpec spec;
    spec.initial_panels = 1;
    spec.endpoint_grading_levels = 0;
    // degree 19 is within the order-10 rule's exactness.
    auto f = [](double x) {
        double p = 1.0;
        for (int i = 0; i < 19; ++i) p *= x;
        return p;
    };
    const auto res = integrate(f, 0.0, 1.0, spec);
    CHECK(res.value == doctest::Approx(1.0 / 20.0).epsilon(1e-14));
    CHECK(res.converged);
    CHECK(res.error_estimate <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(res.value)));
}

TEST_CASE("simple integrals and orientation") {
    QuadratureSpec spec;
    const auto sq = integrate([](double x) { return x * x; }, 0.0, 1.0, spec);
    CHECK(sq.value == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    const auto rev = integrate([](double x) { return x; }, 1.0, 0.0, spec);
    CHECK(rev.value == doctest::Approx(-0.5).epsilon(1e-14));

    const auto fwd = integrate([](double x) { return std::exp(x); }, 0.0, 2.0, spec);
    const auto bwd = integrate([](double x) { return std::exp(x); }, 2.0, 0.0, spec);
    CHECK(fwd.value == doctest::Approx(-bwd.value).epsilon(1e-14));
}

TEST_CASE("piecewise integrand with a registered breakpoint") {
    const auto tent = parse_function("tent:1");
    QuadratureSpec spec;
    spec.breakpoints = tent.breakpoints();
    const auto res = integrate(
        [&tent](double x) {
            const double d = tent.derivative(1, x);
            return d * d;
        },
        0.0, 1.0, spec);
    CHECK(res.value == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(res.converged);
}

TEST_CASE("additivity across a registered breakpoint") {
    auto f = [](double x) { return std::cos(3.0 * x) + x; };
    QuadratureSpec spec;
    const auto whole_spec = [&] {
        QuadratureSpec s = spec;
        s.breakpoints = {0.6};
        return s;
    }();
    const auto whole = integrate(f, 0.0, 1.4, whole_spec);
    const auto left = integrate(f, 0.0, 0.6, spec);
    const auto right = integrate(f, 0.6, 1.4, spec);
    CHECK(std::fabs(whole.value - (left.value + right.value)) <=
          whole.error_estimate + left.error_estimate + right.error_estimate + 1e-13);
}

TEST_CASE("non-finite integrand raises EvaluationError") {
    QuadratureSpec spec;
    auto f = [](double x) {
        return x > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
    };
    CHECK_THROWS_AS((void)integrate(f, 0.0, 1.0, spec), EvaluationError);
}

TEST_CASE("non-convergence is flagged, value still returned") {
    QuadratureSpec spec;
    spec.max_doublings = 1;
    spec.rel_tol = 1e-16;
    spec.abs_tol = 1e-18;
    // A kink off any breakpoint stalls at this tolerance within one doubling.
    const auto res = integrate([](double x) { return std::fabs(x - 0.3141); }, 0.0, 1.0, spec);
    CHECK_FALSE(res.converged);
    CHECK(res.value == doctest::Approx(0.5 - 0.3141 + 0.3141 * 0.3141).epsilon(1e-3));
}

TEST_CASE("nested integrals with tightened inner tolerances") {
    QuadratureSpec spec;
    const auto tri = integrate_nested(
        [](double s) {
            InnerIntegral inner;
            inner.integrand = [](double) { return 1.0; };
            inner.lo = 0.0;
            inner.hi = s;
            inner.combine = [](double v) { return v; };
            return inner;
        },
        0.0, 1.0, spec);
    CHECK(tri.value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(tri.converged);

    const auto cubic = integrate_nested(
        [](double s) {
            InnerIntegral inner;
            inner.integrand = [](double t) { return t; };
            inner.lo = 0.0;
            inner.hi = s;
            inner.combine = [](double v) { return v; };
            return inner;
        },
        0.0, 1.0, spec);
    CHECK(cubic.value == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("nested non-convergence propagates to the outer flag") {
    QuadratureSpec spec;
    spec.max_doublings = 1;
    spec.rel_tol = 1e-15;
    spec.abs_tol = 1e-17;
    const auto res = integrate_nested(
        [](double s) {
            InnerIntegral inner;
            inner.integrand = [](double t) { return std::fabs(t - 0.3); };
            inner.lo = 0.0;
            inner.hi = 1.0 + 0.0 * s;
            inner.combine = [](double v) { return v; };
            return inner;
        },
        0.0, 1.0, spec);
    CHECK_FALSE(res.converged);
    CHECK(std::isfinite(res.value));
}

TEST_CASE("endpoint grading handles a mild power-law singularity") {
    QuadratureSpec spec;
    spec.rel_tol = 1e-10;
    const auto res = integrate([](double x) { return std::pow(x, 1.2); }, 0.0, 1.0, spec);
    CHECK(res.value == doctest::Approx(1.0 / 2.2).epsilon(1e-9));
}

TEST_CASE("gauss-legendre rules integrate their exactness degree") {
    for (int order : {2, 4, 6, 10, 16}) {
        const auto& [nodes, weights] = gauss_legendre_rule(order);
        REQUIRE(static_cast<int>(nodes.size()) == order);
        // integral of x^(2n-1) over [-1,1] is 0; of x^(2n-2) it is 2/(2n-1).
        double even = 0.0, odd = 0.0;
        for (int i = 0; i < order; ++i) {
            even += weights[static_cast<std::size_t>(i)] *
                    std::pow(nodes[static_cast<std::size_t>(i)], 2 * order - 2);
            odd += weights[static_cast<std::size_t>(i)] *
                   std::pow(nodes[static_cast<std::size_t>(i)], 2 * order - 1);
        }
        CHECK(even == doctest::Approx(2.0 / (2.0 * order - 1.0)).epsilon(1e-12));
        CHECK(std::fabs(odd) < 1e-14);
    }
}
