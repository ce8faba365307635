#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "opialtk/opial.hpp"

namespace opialtk {

/// Deterministic 64-bit generator (splitmix64). The algorithm identifier is
/// recorded in run manifests so suite composition is reproducible from the
/// spec lines alone.
class SplitMix64 {
public:
    static constexpr const char* kAlgorithm = "splitmix64";

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

    /// Independent child stream.
    SplitMix64 split() { return SplitMix64(next()); }

private:
    std::uint64_t state_;
};

struct SuiteConfig {
    std::uint64_t seed = 1;
    int count_per_regime = 50;
    Interval interval{0.0, 1.0};
    double value_floor = 0.05; // additive floor for generated h
    double u_floor = 0.05;     // additive floor for u in reversed regimes
    double v_floor = 0.05;     // additive floor for v always
    QuadratureSpec quad;

    void validate() const;
};

/// One generated instance as manifest data; `to_line` round-trips through
/// `from_line` losslessly (shortest round-trip float formatting).
struct GeneratedInstance {
    RegimeTag regime = RegimeTag::main;
    Interval domain{0.0, 1.0};
    std::string basis_spec;
    std::string u_spec;
    std::string v_spec;
    std::string h_spec;
    ExponentTriple exponents;
    double a = 0.0;
    double x = 1.0;
    std::uint64_t seed = 0;

    std::string to_line() const;
    static GeneratedInstance from_line(const std::string& line);
};

/// Builds the runnable problem: kernel = the family's top-index Widder
/// kernel, y derived from the representation (the equality case).
OpialProblem instantiate(const GeneratedInstance& inst, const QuadratureSpec& quad);

/// Family from the generator pool (monomials, exponential systems,
/// constant + monomials), re-drawn on validation failure (at most 10
/// attempts, then GenerationError). max_top_index caps the family size.
BasisFamily gen_basis(const SuiteConfig& cfg, SplitMix64& rng, int max_top_index = 3);

/// Weight pair (u, v): squared random polynomials, v floored always, u
/// floored only for reversed (lower-bound) regimes.
std::pair<SmoothFunction, SmoothFunction> gen_weights(const SuiteConfig& cfg, SplitMix64& rng,
                                                      bool reversed);

/// Exponent triple sampled from a box interior to the regime's region.
/// Re-draws until the classifier round-trips and the singular-exponent
/// guards hold (the kernel-vanishing order at the base point must stay
/// above -0.45 for both the lhs and the constant's integrand).
ExponentTriple gen_exponents(RegimeTag tag, SplitMix64& rng);

/// Full equality-case instance for a regime. The kernel's grid
/// nonnegativity over the integration triangle is asserted; failures
/// re-draw the basis (at most 10 attempts).
GeneratedInstance gen_equality_instance(const SuiteConfig& cfg, RegimeTag tag, SplitMix64& rng);

/// count instances for one regime, seeded per instance from the config
/// seed stream.
std::vector<GeneratedInstance> gen_suite(const SuiteConfig& cfg, RegimeTag tag, int count);

} // namespace opialtk
