#include <cmath>

#include "doctest.h"
#include "opialtk/errors.hpp"
#include "opialtk/taylor.hpp"
#include "opialtk/testgen.hpp"
#include "opialtk/util.hpp"

using namespace opialtk;

namespace {

const RegimeTag kAllTags[] = {RegimeTag::main, RegimeTag::i,    RegimeTag::ii,  RegimeTag::iii,
                              RegimeTag::iv,   RegimeTag::v,    RegimeTag::vi,  RegimeTag::vii,
                              RegimeTag::viii, RegimeTag::ix};

} // namespace

TEST_CASE("splitmix64 is deterministic and uniform-ish") {
    SplitMix64 a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    SplitMix64 c(42);
    double mean = 0.0;
    for (int i = 0; i < 10000; ++i) mean += c.uniform();
    mean /= 10000.0;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("identical seeds reproduce identical suites") {
    SuiteConfig cfg;
    cfg.seed = 987654321;
    const auto s1 = gen_suite(cfg, RegimeTag::main, 5);
    const auto s2 = gen_suite(cfg, RegimeTag::main, 5);
    REQUIRE(s1.size() == s2.size());
    for (std::size_t i = 0; i < s1.size(); ++i) {
        CHECK(s1[i].to_line() == s2[i].to_line());
    }
    SuiteConfig other = cfg;
    other.seed = 11;
    const auto s3 = gen_suite(other, RegimeTag::main, 5);
    CHECK(s1[0].to_line() != s3[0].to_line());
}

TEST_CASE("manifest lines round-trip") {
    SuiteConfig cfg;
    cfg.seed = 5;
    for (const auto& inst : gen_suite(cfg, RegimeTag::vi, 3)) {
        const auto parsed = GeneratedInstance::from_line(inst.to_line());
        CHECK(parsed.to_line() == inst.to_line());
        CHECK(parsed.regime == inst.regime);
        CHECK(parsed.exponents.alpha == inst.exponents.alpha);
        CHECK(parsed.exponents.beta == inst.exponents.beta);
        CHECK(parsed.exponents.r == inst.exponents.r);
        CHECK(parsed.a == inst.a);
        CHECK(parsed.x == inst.x);
        CHECK(parsed.seed == inst.seed);
    }
    CHECK_THROWS_AS(GeneratedInstance::from_line("regime=MAIN; junk"), ParseError);
}

TEST_CASE("exponent generation round-trips through the classifier") {
    for (RegimeTag tag : kAllTags) {
        SplitMix64 rng(1000 + static_cast<std::uint64_t>(tag));
        const RegimeTag expected = tag == RegimeTag::i ? RegimeTag::main : tag;
        for (int i = 0; i < 1000; ++i) {
            const auto exps = gen_exponents(tag, rng);
            CHECK(classify_regime(exps).tag == expected);
        }
    }
}

TEST_CASE("generated bases satisfy the positivity hypothesis") {
    SuiteConfig cfg;
    SplitMix64 rng(77);
    for (int i = 0; i < 20; ++i) {
        const auto family = gen_basis(cfg, rng, 3);
        const auto diag = validate_family(family);
        CHECK(diag.ok);
        for (const auto& entry : diag.entries) CHECK(entry.min_wronskian > 0.0);
    }
}

TEST_CASE("generated weights respect their floors") {
    SuiteConfig cfg;
    SplitMix64 rng(31337);
    auto [u_fwd, v_fwd] = gen_weights(cfg, rng, false);
    auto [u_rev, v_rev] = gen_weights(cfg, rng, true);
    for (double s : linspace(0.0, 1.0, 257)) {
        CHECK(u_fwd(s) >= 0.0);
        CHECK(v_fwd(s) >= cfg.v_floor - 1e-12);
        CHECK(u_rev(s) >= cfg.u_floor - 1e-12);
        CHECK(v_rev(s) >= cfg.v_floor - 1e-12);
    }
}

TEST_CASE("equality instances satisfy their constructive hypotheses") {
    SuiteConfig cfg;
    cfg.seed = 2024;
    for (RegimeTag tag : {RegimeTag::main, RegimeTag::iv, RegimeTag::vi, RegimeTag::ix}) {
        SuiteConfig tag_cfg = cfg;
        tag_cfg.seed = cfg.seed + static_cast<std::uint64_t>(tag);
        for (const auto& inst : gen_suite(tag_cfg, tag, 3)) {
            const RegimeTag expected = tag == RegimeTag::i ? RegimeTag::main : tag;
            CHECK(inst.regime == expected);
            const auto prob = instantiate(inst, QuadratureSpec{});
            CHECK(prob.y_derived());
            // h stays above its floor.
            for (double s : linspace(inst.a, inst.x, 33)) {
                CHECK(std::fabs(prob.h(s)) >= cfg.value_floor - 1e-12);
            }
            // The kernel is nonnegative over the integration triangle.
            for (double s : linspace(inst.a, inst.x, 9)) {
                for (double t : linspace(inst.a, s, 9)) {
                    CHECK(prob.kernel(s, t) >= -1e-10);
                }
            }
        }
    }
}

TEST_CASE("derived y matches the representation integral on a grid") {
    SuiteConfig cfg;
    cfg.seed = 424242;
    const auto inst = gen_suite(cfg, RegimeTag::main, 1).front();
    const auto prob = instantiate(inst, QuadratureSpec{});
    const auto family = parse_basis(inst.basis_spec, inst.domain);
    // Generated h is nonnegative, so the representation equals the
    // |h|-integral that the derived y uses.
    const auto represented = represent_from_h(family, prob.h, inst.a);
    for (double s : linspace(inst.a, inst.x, 33)) {
        CHECK(std::fabs(prob.y_value(s) - represented(s)) <= 1e-8);
    }
}

TEST_CASE("derived y scales linearly with h") {
    const Interval dom(0.0, 1.0);
    const auto family = parse_basis("monomials:1", dom);
    const auto make_prob = [&](const std::string& h_spec) {
        return OpialProblem::make(KernelHandle::widder(family, 1),
                                  parse_function("const:1", dom), parse_function("const:1", dom),
                                  parse_function(h_spec, dom), std::nullopt, 0.0, 1.0,
                                  {1.0, 1.0, 2.0});
    };
    const auto base = make_prob("const:1");
    const auto scaled = make_prob("const:3");
    for (double s : {0.3, 0.8}) {
        CHECK(scaled.y_value(s) == doctest::Approx(3.0 * base.y_value(s)).epsilon(1e-10));
        // Hand value: integral of (s - t) over [0, s] is s^2/2.
        CHECK(base.y_value(s) == doctest::Approx(s * s / 2.0).epsilon(1e-10));
    }
}
