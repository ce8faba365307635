#include "opialtk/taylor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <mutex>
#include <unordered_map>

#include "opialtk/errors.hpp"
#include "opialtk/util.hpp"

namespace opialtk {

TaylorExpansion::TaylorExpansion(BasisFamily family, SmoothFunction f, double center, int order)
    : family_(std::move(family)), f_(std::move(f)), center_(center), order_(order) {
    if (order_ < 0 || order_ > family_.top_index()) {
        throw DomainError("expansion order must be in [0, n]");
    }
    if (!family_.domain().contains(center_)) {
        throw DomainError("expansion center outside the family domain");
    }
    if (f_.max_order() < order_ + 1) {
        throw DomainError("function max_order too small for the expansion order");
    }
    coeffs_.reserve(static_cast<std::size_t>(order_) + 1);
    for (int i = 0; i <= order_; ++i) {
        coeffs_.push_back(widder_derivative(family_, f_, i, center_));
    }
}

double taylor_eval(const TaylorExpansion& exp, double x) {
    double acc = 0.0;
    for (int i = 0; i <= exp.order(); ++i) {
        acc += exp.coefficients()[static_cast<std::size_t>(i)] *
               kernel_g(exp.family(), i, x, exp.center());
    }
    return acc;
}

IntegralResult taylor_remainder(const TaylorExpansion& exp, double x,
                                const QuadratureSpec& quad) {
    if (exp.function().max_order() < exp.order() + 2) {
        throw DomainError("remainder needs the (n+1)-th generalized derivative, so "
                          "max_order >= n + 2");
    }
    const int n = exp.order();
    const auto& family = exp.family();
    const auto& f = exp.function();
    auto integrand = [&family, &f, n, x](double s) {
        return kernel_g(family, n, x, s) * widder_derivative(family, f, n + 1, s);
    };
    return integrate(integrand, exp.center(), x, quad);
}

SmoothFunction represent_from_h(const BasisFamily& family, const SmoothFunction& h, double x0,
                                QuadratureSpec quad) {
    if (!family.domain().contains(x0)) {
        throw DomainError("representation base point outside the family domain");
    }
    if (!h.domain().contains(family.domain())) {
        throw DomainError("h must be defined on the whole family domain");
    }
    const int n = family.top_index();
    const QuadratureSpec spec = std::move(quad);

    struct Memo {
        std::mutex mu;
        std::unordered_map<std::uint64_t, double> values;
    };
    auto memo = std::make_shared<Memo>();

    auto eval = [family, h, x0, n, spec, memo](int k, double x) -> double {
        if (k == 0) {
            std::uint64_t key = 0;
            std::memcpy(&key, &x, sizeof(key));
            {
                std::lock_guard<std::mutex> lock(memo->mu);
                if (auto it = memo->values.find(key); it != memo->values.end()) {
                    return it->second;
                }
            }
            const double v =
                integrate([&family, &h, n, x](double t) { return kernel_g(family, n, x, t) * h(t); },
                          x0, x, spec)
                    .value;
            std::lock_guard<std::mutex> lock(memo->mu);
            memo->values.emplace(key, v);
            return v;
        }
        // Differentiation under the integral: the kernel's last row shifts
        // to the k-th derivative; the single surviving boundary term is
        // h(x) at k = n + 1.
        const double tail =
            integrate([&family, &h, n, k, x](double t) { return kernel_g_dx(family, n, k, x, t) * h(t); },
                      x0, x, spec)
                .value;
        return k == n + 1 ? h(x) + tail : tail;
    };

    const int exact = n + 1;
    const int cap = std::max(exact, 6);
    std::string label = "represent:" +
                        (family.spec().empty() ? std::string("custom") : family.spec()) + ":" +
                        (h.spec().empty() ? std::string("h") : h.spec()) + ":" +
                        format_double(x0);
    return SmoothFunction::fallback_with_exact_orders(family.domain(), exact, cap, eval, label);
}

} // namespace opialtk
