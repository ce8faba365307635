#include "opialtk/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <mutex>
#include <unordered_map>

#include "opialtk/errors.hpp"
#include "opialtk/util.hpp"

namespace opialtk {

void QuadratureSpec::validate() const {
    if (base_rule_order < 2) throw DomainError("base_rule_order must be >= 2");
    if (initial_panels < 1) throw DomainError("initial_panels must be >= 1");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("tolerances must be positive");
    if (max_doublings < 0) throw DomainError("max_doublings must be >= 0");
    if (endpoint_grading_levels < 0) throw DomainError("grading levels must be >= 0");
}

namespace {

std::pair<std::vector<double>, std::vector<double>> compute_gauss_legendre(int n) {
    // Newton iteration on P_n from the Chebyshev-angle initial guess.
    std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        x[static_cast<std::size_t>(i)] = -z;
        x[static_cast<std::size_t>(n - 1 - i)] = z;
        const double wi = 2.0 / ((1.0 - z * z) * pp * pp);
        w[static_cast<std::size_t>(i)] = wi;
        w[static_cast<std::size_t>(n - 1 - i)] = wi;
    }
    return {std::move(x), std::move(w)};
}

struct NodeOutcome {
    double f = 0.0;
    double aux_error = 0.0; // per-node extra error (inner quadrature)
    bool aux_converged = true;
};

/// Shared refinement driver for plain and nested integration. `eval` is
/// called at transformed abscissae of the oriented interval [lo, hi].
IntegralResult drive(const std::function<NodeOutcome(double)>& eval, double lo, double hi,
                     const QuadratureSpec& spec) {
    spec.validate();
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw DomainError("integration limits must be finite");
    }
    if (lo == hi) return {0.0, 0.0, 0, true};

    double sign = 1.0;
    double a = lo, b = hi;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    const double span = b - a;
    const double nudge = 1e-12 * span;

    // Base partition: breakpoints first, then enough equal splits per
    // segment to reach the requested panel count, then geometric grading
    // of the outermost panels toward each endpoint.
    std::vector<double> cuts{a, b};
    for (double bp : spec.breakpoints) {
        if (bp > a + nudge && bp < b - nudge) cuts.push_back(bp);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<double> bounds;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double s0 = cuts[i], s1 = cuts[i + 1];
        const int pieces =
            std::max(1, static_cast<int>(std::lround(spec.initial_panels * (s1 - s0) / span)));
        for (int p = 0; p < pieces; ++p) {
            bounds.push_back(s0 + (s1 - s0) * static_cast<double>(p) / pieces);
        }
    }
    bounds.push_back(b);

    if (spec.endpoint_grading_levels > 0 && bounds.size() >= 2) {
        std::vector<double> graded;
        const double w_first = bounds[1] - bounds[0];
        for (int l = spec.endpoint_grading_levels; l >= 1; --l) {
            graded.push_back(a + w_first * std::pow(0.25, l));
        }
        const double w_last = bounds[bounds.size() - 1] - bounds[bounds.size() - 2];
        for (int l = 1; l <= spec.endpoint_grading_levels; ++l) {
            graded.push_back(b - w_last * std::pow(0.25, l));
        }
        bounds.insert(bounds.end(), graded.begin(), graded.end());
        std::sort(bounds.begin(), bounds.end());
        bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
    }

    const auto& [nodes, weights] = gauss_legendre_rule(spec.base_rule_order);

    struct Level {
        double value = 0.0;
        double aux = 0.0;
        bool aux_converged = true;
    };
    auto evaluate_level = [&](const std::vector<double>& bs) {
        Level lv;
        for (std::size_t i = 0; i + 1 < bs.size(); ++i) {
            const double mid = 0.5 * (bs[i] + bs[i + 1]);
            const double hw = 0.5 * (bs[i + 1] - bs[i]);
            for (std::size_t j = 0; j < nodes.size(); ++j) {
                double t = mid + hw * nodes[j];
                if (t - a < nudge) t = a + nudge;
                if (b - t < nudge) t = b - nudge;
                const NodeOutcome out = eval(t);
                if (!std::isfinite(out.f)) {
                    throw EvaluationError("non-finite integrand at x=" + format_double(t));
                }
                const double wj = hw * weights[j];
                lv.value += wj * out.f;
                lv.aux += std::fabs(wj) * out.aux_error;
                lv.aux_converged = lv.aux_converged && out.aux_converged;
            }
        }
        return lv;
    };
    auto halve = [](const std::vector<double>& bs) {
        std::vector<double> out;
        out.reserve(bs.size() * 2 - 1);
        for (std::size_t i = 0; i + 1 < bs.size(); ++i) {
            out.push_back(bs[i]);
            out.push_back(0.5 * (bs[i] + bs[i + 1]));
        }
        out.push_back(bs.back());
        return out;
    };

    Level prev = evaluate_level(bounds);
    IntegralResult res;
    res.converged = false;
    double diff = std::numeric_limits<double>::infinity();
    for (int d = 0; d < std::max(1, spec.max_doublings); ++d) {
        bounds = halve(bounds);
        const Level cur = evaluate_level(bounds);
        diff = std::fabs(cur.value - prev.value);
        prev = cur;
        if (diff <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(cur.value))) {
            res.converged = true;
            break;
        }
    }
    res.value = sign * prev.value;
    res.error_estimate = diff + prev.aux;
    res.panels_used = static_cast<int>(bounds.size()) - 1;
    res.converged = res.converged && prev.aux_converged;
    if (res.converged) {
        res.error_estimate =
            std::min(res.error_estimate,
                     std::max(spec.abs_tol, spec.rel_tol * std::fabs(res.value)) + prev.aux);
    }
    return res;
}

} // namespace

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_rule(int order) {
    static std::mutex mu;
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) {
        it = cache.emplace(order, compute_gauss_legendre(order)).first;
    }
    return it->second;
}

IntegralResult integrate(const std::function<double(double)>& f, double lo, double hi,
                         const QuadratureSpec& spec) {
    return drive([&f](double x) { return NodeOutcome{f(x), 0.0, true}; }, lo, hi, spec);
}

IntegralResult integrate_nested(const std::function<InnerIntegral(double)>& outer, double lo,
                                double hi, const QuadratureSpec& spec) {
    const QuadratureSpec inner_spec = spec.inner();
    // Inner results keyed by the outer node's bit pattern; exact node
    // repeats across refinement levels reuse the stored integral.
    std::unordered_map<std::uint64_t, IntegralResult> memo;
    auto eval = [&](double s) {
        const InnerIntegral prob = outer(s);
        std::uint64_t key = 0;
        std::memcpy(&key, &s, sizeof(key));
        IntegralResult inner;
        if (auto it = memo.find(key); it != memo.end()) {
            inner = it->second;
        } else {
            inner = integrate(prob.integrand, prob.lo, prob.hi, inner_spec);
            memo.emplace(key, inner);
        }
        return NodeOutcome{prob.combine(inner.value), inner.error_estimate, inner.converged};
    };
    return drive(eval, lo, hi, spec);
}

} // namespace opialtk
