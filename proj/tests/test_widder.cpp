#include <cmath>
#include <vector>

#include "doctest.h"
#include "opialtk/errors.hpp"
#include "opialtk/util.hpp"
#include "opialtk/widder.hpp"

using namespace opialtk;

namespace {

BasisFamily monomials(int n, Interval dom = Interval(0.0, 1.0)) {
    return parse_basis("monomials:" + std::to_string(n), dom);
}

} // namespace

TEST_CASE("wronskians of simple families") {
    const auto fam2 = monomials(2);
    for (double x : linspace(0.0, 1.0, 7)) {
        CHECK(wronskian(fam2, 2, x) == doctest::Approx(2.0).epsilon(1e-13));
        CHECK(wronskian(fam2, 1, x) == doctest::Approx(1.0).epsilon(1e-13));
    }
    const auto constant = parse_basis("custom:const:3.5", Interval(0.0, 1.0));
    CHECK(wronskian(constant, 0, 0.42) == doctest::Approx(3.5));
}

TEST_CASE("widder derivatives reduce to ordinary derivatives for monomials") {
    const auto fam = monomials(3);
    const auto f = parse_function("poly:0,0,0,0,1", Interval(0.0, 1.0)); // x^4
    CHECK(widder_derivative(fam, f, 2, 1.0) == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(widder_derivative(fam, f, 0, 0.5) == doctest::Approx(0.0625));
}

TEST_CASE("widder derivative annihilates earlier members") {
    const auto fam = monomials(3);
    for (int i = 1; i <= 3; ++i) {
        for (int j = 0; j < i; ++j) {
            for (double x : linspace(0.1, 0.9, 5)) {
                CHECK(std::fabs(widder_derivative(fam, fam.member(j), i, x)) <= 1e-9);
            }
        }
    }
}

TEST_CASE("widder derivative of an exponential pair by hand") {
    const Interval dom(-1.0, 1.0);
    const auto fam = parse_basis("custom:const:1|exp:1", dom);
    const auto f = parse_function("exp:2", dom);
    // W[1, e^{2x}]/W_0 = 2 e^{2x}.
    CHECK(widder_derivative(fam, f, 1, 0.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(widder_derivative(fam, f, 1, 0.5) == doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("widder derivative is linear") {
    const Interval dom(0.0, 1.0);
    const auto fam = parse_basis("exp-basis:0.5,1.0,1.5", dom);
    const auto f = parse_function("sin:1", dom);
    const auto g = parse_function("poly:1,0,2", dom);
    const double a = 1.3, b = -0.4;
    const auto combo = SmoothFunction::exact(dom, 8, [f, g, a, b](int k, double x) {
        return a * f.derivative(k, x) + b * g.derivative(k, x);
    });
    for (int i = 1; i <= 3; ++i) {
        const double lhs = widder_derivative(fam, combo, i, 0.6);
        const double rhs = a * widder_derivative(fam, f, i, 0.6) +
                           b * widder_derivative(fam, g, i, 0.6);
        CHECK(std::fabs(lhs - rhs) <= 1e-9 * std::max(1.0, std::fabs(lhs)));
    }
}

TEST_CASE("monomial kernels reduce to (x-t)^i / i!") {
    const auto fam = monomials(5);
    double factorial = 1.0;
    for (int i = 0; i <= 5; ++i) {
        if (i > 0) factorial *= i;
        for (double x : linspace(0.0, 1.0, 11)) {
            for (double t : linspace(0.0, 1.0, 11)) {
                const double expected = std::pow(x - t, i) / factorial;
                CHECK(std::fabs(kernel_g(fam, i, x, t) - expected) <= 1e-9);
            }
        }
    }
}

TEST_CASE("kernel diagonal vanishes for i >= 1") {
    const auto fam = parse_basis("exp-basis:0.3,0.9,1.7", Interval(0.0, 2.0));
    for (int i = 1; i <= 2; ++i) {
        for (double x : linspace(0.1, 1.9, 9)) {
            CHECK(std::fabs(kernel_g(fam, i, x, x)) <= 1e-12 * std::exp(3.0 * x));
        }
    }
    const auto constant = parse_basis("custom:const:2", Interval(0.0, 1.0));
    CHECK(kernel_g(constant, 0, 0.3, 0.8) == doctest::Approx(1.0));
}

TEST_CASE("greens function determinant ratios by hand") {
    const Interval dom(-0.5, 3.0);
    std::vector<SmoothFunction> d2 = {parse_function("const:1", dom),
                                      parse_function("poly:0,1", dom)};
    CHECK(greens_function(d2, 2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(greens_function(d2, 0.25, 0.25) == doctest::Approx(0.0));

    std::vector<SmoothFunction> harmonic = {parse_function("sin:1", dom),
                                            parse_function("cos:1", dom)};
    const double pi_2 = 1.5707963267948966;
    CHECK(greens_function(harmonic, pi_2, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double x : linspace(0.0, 2.0, 9)) {
        for (double t : linspace(0.0, 2.0, 9)) {
            CHECK(greens_function(harmonic, x, t) ==
                  doctest::Approx(std::sin(x - t)).epsilon(1e-11));
        }
    }
}

TEST_CASE("family validation enforces positive wronskians") {
    const auto diag = validate_family(monomials(3));
    REQUIRE(diag.entries.size() == 4);
    CHECK(diag.ok);
    const std::vector<double> expected{1.0, 1.0, 2.0, 12.0};
    for (int i = 0; i <= 3; ++i) {
        CHECK(diag.entries[static_cast<std::size_t>(i)].min_wronskian ==
              doctest::Approx(expected[static_cast<std::size_t>(i)]).epsilon(1e-10));
    }

    // Sign flip: {1, -x} has W_1 = -1.
    std::vector<SmoothFunction> flipped = {parse_function("const:1", Interval(0.0, 1.0)),
                                           parse_function("poly:0,-1", Interval(0.0, 1.0))};
    CHECK_THROWS_AS(BasisFamily(flipped, Interval(0.0, 1.0)), SingularWronskianError);

    // Zero crossing: {x} on [-1, 1].
    std::vector<SmoothFunction> crossing = {parse_function("poly:0,1", Interval(-1.0, 1.0))};
    CHECK_THROWS_AS(BasisFamily(crossing, Interval(-1.0, 1.0), 1e-12), SingularWronskianError);
}

TEST_CASE("denominators below the floor raise SingularWronskianError") {
    const Interval dom(0.0, 1.0);
    std::vector<SmoothFunction> d2 = {parse_function("const:1", dom),
                                      parse_function("poly:0,1", dom)};
    CHECK_THROWS_AS((void)greens_function(d2, 0.5, 0.2, 10.0), SingularWronskianError);
}

TEST_CASE("kernel handles expose their sources") {
    const auto fam = monomials(2);
    const auto unit = KernelHandle::unit();
    CHECK(unit(0.3, 0.9) == 1.0);
    CHECK(unit.source() == KernelHandle::Source::unit);

    const auto widder = KernelHandle::widder(fam, 2);
    CHECK(widder(1.0, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(widder.source() == KernelHandle::Source::widder);
    CHECK(widder.index() == 2);
    CHECK_THROWS_AS((void)unit.family(), DomainError);

    const auto custom = KernelHandle::custom("difference", [](double x, double t) { return x - t; });
    CHECK(custom(2.0, 0.5) == doctest::Approx(1.5));
}

TEST_CASE("basis spec parsing") {
    CHECK_THROWS_AS(parse_basis("monomials:x", Interval(0.0, 1.0)), ParseError);
    CHECK_THROWS_AS(parse_basis("junk", Interval(0.0, 1.0)), ParseError);
    const auto expfam = parse_basis("exp-basis:0.5,1.0", Interval(0.0, 1.0));
    CHECK(expfam.size() == 2);
    // W_1 = 0.5 e^{1.5 x} for rates (0.5, 1.0).
    CHECK(wronskian(expfam, 1, 0.4) == doctest::Approx(0.5 * std::exp(1.5 * 0.4)).epsilon(1e-12));
    const auto custom = parse_basis("custom:const:2|poly:0,1", Interval(0.0, 1.0));
    CHECK(custom.top_index() == 1);
}
