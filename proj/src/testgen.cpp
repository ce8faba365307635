#include "opialtk/testgen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "opialtk/errors.hpp"
#include "opialtk/util.hpp"

namespace opialtk {

namespace {

constexpr int kMaxBasisAttempts = 10;
constexpr int kMaxExponentDraws = 400;
// Power-law start exponents below this make the smoothing substitution and
// the trapezoid cross-checks too slow to trust at suite tolerances.
constexpr double kSingularExponentFloor = -0.45;

std::string poly_spec(const std::vector<double>& coeffs) {
    std::string out = "poly:";
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        out += (i ? "," : "") + format_double(coeffs[i]);
    }
    return out;
}

std::vector<double> square_poly(const std::vector<double>& c) {
    std::vector<double> out(2 * c.size() - 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = 0; j < c.size(); ++j) out[i + j] += c[i] * c[j];
    }
    return out;
}

std::vector<double> random_poly(SplitMix64& rng, int max_degree) {
    const int degree = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_degree + 1)));
    std::vector<double> coeffs;
    coeffs.reserve(static_cast<std::size_t>(degree) + 1);
    for (int i = 0; i <= degree; ++i) coeffs.push_back(rng.uniform(-1.0, 1.0));
    return coeffs;
}

/// Squared random polynomial plus an additive floor, as a spec string.
std::string floored_square_spec(SplitMix64& rng, double floor) {
    auto sq = square_poly(random_poly(rng, 3));
    sq[0] += floor;
    return poly_spec(sq);
}

std::string gen_basis_spec(SplitMix64& rng, int max_top_index) {
    if (max_top_index <= 0) {
        // Strictly positive kernels only: a single-member family, so the
        // kernel is u_0(x)/u_0(t).
        if (rng.below(2) == 0) {
            return "custom:const:" + format_double(rng.uniform(0.5, 2.0));
        }
        return "exp-basis:" + format_double(rng.uniform(0.3, 1.5));
    }
    const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_top_index)));
    switch (rng.below(3)) {
        case 0:
            return "monomials:" + std::to_string(n);
        case 1: {
            // Sorted distinct rates give positive Wronskians on any interval.
            std::vector<double> rates;
            for (int i = 0; i <= n; ++i) rates.push_back(rng.uniform(0.1, 2.0));
            std::sort(rates.begin(), rates.end());
            bool spaced = true;
            for (std::size_t i = 0; i + 1 < rates.size(); ++i) {
                if (rates[i + 1] - rates[i] < 0.08) spaced = false;
            }
            if (!spaced) return gen_basis_spec(rng, max_top_index);
            std::string out = "exp-basis:";
            for (std::size_t i = 0; i < rates.size(); ++i) {
                out += (i ? "," : "") + format_double(rates[i]);
            }
            return out;
        }
        default: {
            std::string out = "custom:const:" + format_double(rng.uniform(0.5, 2.0));
            for (int i = 1; i <= n; ++i) {
                std::vector<double> coeffs(static_cast<std::size_t>(i) + 1, 0.0);
                coeffs.back() = 1.0;
                out += "|" + poly_spec(coeffs);
            }
            return out;
        }
    }
}

bool needs_positive_kernel(double r) { return r < 1.0; }

struct SingularityGuards {
    // Vanishing order of the kernel on its diagonal: the family top index
    // for Widder kernels (0 for single-member families).
    static double lhs_exponent(double beta, int kernel_order) {
        return beta >= 0.0 ? 0.0 : beta * (kernel_order + 1);
    }
    static double constant_exponent(const ExponentTriple& e, int kernel_order) {
        const double q = e.beta * (e.r - 1.0) / (e.r - e.alpha);
        if (q >= 0.0) return 0.0;
        const double k_exp = e.r / (e.r - 1.0);
        const double rho = 1.0 + kernel_order * std::max(k_exp, 0.0);
        return q * rho;
    }
    static bool ok(const ExponentTriple& e, int kernel_order) {
        return lhs_exponent(e.beta, kernel_order) >= kSingularExponentFloor &&
               constant_exponent(e, kernel_order) >= kSingularExponentFloor;
    }
};

int max_kernel_order(const ExponentTriple& e) {
    if (needs_positive_kernel(e.r)) return 0;
    int n = 0;
    while (n < 3 && SingularityGuards::ok(e, n + 1)) ++n;
    return n;
}

ExponentTriple draw_box(RegimeTag tag, SplitMix64& rng) {
    ExponentTriple e;
    switch (tag) {
        case RegimeTag::main:
        case RegimeTag::i: {
            e.alpha = rng.uniform(0.15, 1.85);
            e.beta = rng.uniform(0.1, 2.0);
            e.r = rng.below(2) == 0 ? 2.0 : rng.uniform(std::max(1.0, e.alpha) + 0.1, 3.5);
            break;
        }
        case RegimeTag::ii: {
            e.alpha = rng.uniform(-0.6, -0.05);
            e.r = rng.uniform(e.alpha - 1.2, e.alpha - 0.3);
            const double depth =
                std::min(0.45, 0.45 * (e.alpha - e.r) / (1.0 - e.r));
            e.beta = rng.uniform(-std::max(depth - 0.01, 0.02), -0.02);
            break;
        }
        case RegimeTag::iii: {
            e.alpha = rng.uniform(0.1, 0.6);
            e.r = rng.uniform(e.alpha + 0.1, 0.92);
            e.beta = rng.uniform(std::max(-e.alpha, -0.45) + 0.02, -0.03);
            break;
        }
        case RegimeTag::iv: {
            e.alpha = rng.uniform(0.4, 2.2);
            e.r = rng.uniform(0.08, 0.85 * std::min(e.alpha, 1.0));
            e.beta = rng.uniform(0.1, 1.5);
            break;
        }
        case RegimeTag::v: {
            e.alpha = rng.uniform(-1.6, -0.4);
            e.r = rng.uniform(0.15, 0.85);
            const double cap =
                std::min({-e.alpha - 0.02, 0.45 * (e.r - e.alpha) / (1.0 - e.r), 0.9});
            e.beta = rng.uniform(0.03, std::max(cap, 0.04));
            break;
        }
        case RegimeTag::vi: {
            e.alpha = rng.uniform(-1.2, -0.1);
            e.r = rng.uniform(1.15, 2.6);
            const double depth =
                std::min(0.45, 0.45 * (e.r - e.alpha) / (e.r - 1.0));
            e.beta = rng.uniform(-std::max(depth - 0.01, 0.02), -0.02);
            break;
        }
        case RegimeTag::vii: {
            e.r = rng.uniform(1.1, 2.0);
            e.alpha = rng.uniform(e.r + 0.15, 3.5);
            e.beta = rng.uniform(std::max(-e.alpha, -0.45) + 0.02, -0.03);
            break;
        }
        case RegimeTag::viii: {
            e.alpha = rng.uniform(0.2, 2.0);
            e.r = rng.uniform(-2.0, -0.15);
            e.beta = rng.uniform(0.1, 1.5);
            break;
        }
        case RegimeTag::ix: {
            e.alpha = rng.uniform(-2.2, -0.5);
            e.r = rng.uniform(e.alpha + 0.1, -0.08);
            const double cap =
                std::min({-e.alpha - 0.02, 0.45 * (e.r - e.alpha) / (1.0 - e.r), 1.0});
            e.beta = rng.uniform(0.03, std::max(cap, 0.04));
            break;
        }
        case RegimeTag::unclassified:
            throw GenerationError("cannot generate exponents for UNCLASSIFIED");
    }
    return e;
}

std::string take_field(const std::string& line, const std::string& key) {
    const std::string needle = key + "=";
    std::size_t pos = 0;
    while (pos < line.size()) {
        std::size_t end = line.find("; ", pos);
        if (end == std::string::npos) end = line.size();
        const std::string field = line.substr(pos, end - pos);
        if (field.rfind(needle, 0) == 0) return field.substr(needle.size());
        pos = end + (end == line.size() ? 0 : 2);
    }
    throw ParseError("manifest line missing field '" + key + "': " + line);
}

} // namespace

void SuiteConfig::validate() const {
    if (count_per_regime < 1) throw DomainError("count_per_regime must be >= 1");
    if (!(value_floor > 0.0) || !(u_floor > 0.0) || !(v_floor > 0.0)) {
        throw DomainError("floors must be positive");
    }
    quad.validate();
}

std::string GeneratedInstance::to_line() const {
    std::ostringstream out;
    out << "regime=" << to_string(regime);
    out << "; domain=" << format_double(domain.lo) << "," << format_double(domain.hi);
    out << "; basis=" << basis_spec;
    out << "; u=" << u_spec;
    out << "; v=" << v_spec;
    out << "; h=" << h_spec;
    out << "; alpha=" << format_double(exponents.alpha);
    out << "; beta=" << format_double(exponents.beta);
    out << "; r=" << format_double(exponents.r);
    out << "; a=" << format_double(a);
    out << "; x=" << format_double(x);
    out << "; seed=" << seed;
    return out.str();
}

GeneratedInstance GeneratedInstance::from_line(const std::string& line) {
    GeneratedInstance inst;
    inst.regime = parse_regime_tag(take_field(line, "regime"));
    const std::string dom = take_field(line, "domain");
    const std::size_t comma = dom.find(',');
    if (comma == std::string::npos) throw ParseError("bad domain field: " + dom);
    bool ok1 = false, ok2 = false;
    const double lo = parse_double(dom.substr(0, comma), ok1);
    const double hi = parse_double(dom.substr(comma + 1), ok2);
    if (!ok1 || !ok2) throw ParseError("bad domain field: " + dom);
    inst.domain = Interval(lo, hi);
    inst.basis_spec = take_field(line, "basis");
    inst.u_spec = take_field(line, "u");
    inst.v_spec = take_field(line, "v");
    inst.h_spec = take_field(line, "h");
    auto field_double = [&line](const char* key) {
        bool ok = false;
        const double v = parse_double(take_field(line, key), ok);
        if (!ok) throw ParseError(std::string("bad numeric field '") + key + "' in: " + line);
        return v;
    };
    inst.exponents.alpha = field_double("alpha");
    inst.exponents.beta = field_double("beta");
    inst.exponents.r = field_double("r");
    inst.a = field_double("a");
    inst.x = field_double("x");
    try {
        inst.seed = static_cast<std::uint64_t>(std::stoull(take_field(line, "seed")));
    } catch (const std::exception&) {
        throw ParseError("bad seed field in: " + line);
    }
    return inst;
}

OpialProblem instantiate(const GeneratedInstance& inst, const QuadratureSpec& quad) {
    BasisFamily family = parse_basis(inst.basis_spec, inst.domain);
    KernelHandle kernel = KernelHandle::widder(family, family.top_index());
    return OpialProblem::make(std::move(kernel), parse_function(inst.u_spec, inst.domain),
                              parse_function(inst.v_spec, inst.domain),
                              parse_function(inst.h_spec, inst.domain), std::nullopt, inst.a,
                              inst.x, inst.exponents, quad);
}

BasisFamily gen_basis(const SuiteConfig& cfg, SplitMix64& rng, int max_top_index) {
    for (int attempt = 0; attempt < kMaxBasisAttempts; ++attempt) {
        const std::string spec = gen_basis_spec(rng, max_top_index);
        try {
            return parse_basis(spec, cfg.interval);
        } catch (const Error&) {
            // re-draw
        }
    }
    throw GenerationError("basis generation failed validation 10 times in a row");
}

std::pair<SmoothFunction, SmoothFunction> gen_weights(const SuiteConfig& cfg, SplitMix64& rng,
                                                      bool reversed) {
    const std::string u_spec = floored_square_spec(rng, reversed ? cfg.u_floor : 0.0);
    const std::string v_spec = floored_square_spec(rng, cfg.v_floor);
    return {parse_function(u_spec, cfg.interval), parse_function(v_spec, cfg.interval)};
}

ExponentTriple gen_exponents(RegimeTag tag, SplitMix64& rng) {
    if (tag == RegimeTag::unclassified) {
        throw GenerationError("cannot generate exponents for UNCLASSIFIED");
    }
    const RegimeTag expected = tag == RegimeTag::i ? RegimeTag::main : tag;
    for (int attempt = 0; attempt < kMaxExponentDraws; ++attempt) {
        const ExponentTriple e = draw_box(tag, rng);
        if (classify_regime(e).tag != expected) continue;
        if (std::fabs(e.alpha + e.beta) < 0.02) continue;
        if (std::fabs(e.r - e.alpha) < 0.05) continue;
        if (std::fabs(e.r - 1.0) < 0.05) continue;
        if (std::fabs(e.r) < 0.05) continue;
        if (!SingularityGuards::ok(e, 0)) continue;
        return e;
    }
    throw GenerationError(std::string("exponent box for regime ") + to_string(tag) +
                          " kept violating its guards");
}

GeneratedInstance gen_equality_instance(const SuiteConfig& cfg, RegimeTag tag, SplitMix64& rng) {
    cfg.validate();
    const ExponentTriple exps = gen_exponents(tag, rng);
    const Regime regime = classify_regime(exps);
    const bool reversed = regime.direction == BoundDirection::lower;

    const int n_cap = max_kernel_order(exps);
    GeneratedInstance inst;
    inst.regime = regime.tag;
    inst.domain = cfg.interval;
    inst.exponents = exps;

    auto [u, v] = gen_weights(cfg, rng, reversed);
    inst.u_spec = u.spec();
    inst.v_spec = v.spec();
    inst.h_spec = floored_square_spec(rng, cfg.value_floor);

    const double width = cfg.interval.width();
    inst.a = cfg.interval.lo + rng.uniform(0.0, 0.2) * width;
    inst.x = inst.a + (0.25 + 0.65 * rng.uniform()) * (cfg.interval.hi - inst.a);

    for (int attempt = 0; attempt < kMaxBasisAttempts; ++attempt) {
        const BasisFamily family = gen_basis(cfg, rng, n_cap);
        // Equality case needs the kernel nonnegative over the integration
        // triangle a <= t <= s <= x.
        bool nonneg = true;
        const int n = family.top_index();
        for (double s : linspace(inst.a, inst.x, 9)) {
            for (double t : linspace(inst.a, s, 9)) {
                if (kernel_g(family, n, s, t) < -1e-10) {
                    nonneg = false;
                    break;
                }
            }
            if (!nonneg) break;
        }
        if (nonneg) {
            inst.basis_spec = family.spec();
            return inst;
        }
    }
    throw GenerationError("kernel nonnegativity kept failing on the grid");
}

std::vector<GeneratedInstance> gen_suite(const SuiteConfig& cfg, RegimeTag tag, int count) {
    SplitMix64 master(cfg.seed);
    std::vector<GeneratedInstance> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const std::uint64_t inst_seed = master.next();
        SplitMix64 rng(inst_seed);
        GeneratedInstance inst = gen_equality_instance(cfg, tag, rng);
        inst.seed = inst_seed;
        out.push_back(std::move(inst));
    }
    return out;
}

} // namespace opialtk
