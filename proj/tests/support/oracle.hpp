#pragma once

// Brute-force cross-check implementations for the inequality engine. These
// deliberately avoid the library's quadrature and LU paths: integration is
// composite trapezoid on uniform grids (with the same power-law
// substitution convention for integrands singular at the base point), and
// Widder kernels are evaluated through Laplace cofactor expansion along the
// determinant's last row.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <unordered_map>
#include <vector>

#include "opialtk/opial.hpp"
#include "opialtk/widder.hpp"

namespace oracle {

inline double trapz(const std::function<double(double)>& f, double a, double b, int n) {
    if (a == b) return 0.0;
    const double h = (b - a) / n;
    double acc = 0.5 * (f(a) + f(b));
    for (int k = 1; k < n; ++k) acc += f(a + k * h);
    return acc * h;
}

/// Trapezoid under s = a + (b - a) tau^4; integrands continuous at tau = 0
/// by construction (the caller's f may diverge at s = a, the tau-jacobian
/// absorbs it; the tau = 0 node contributes zero).
inline double trapz_pow4(const std::function<double(double)>& f, double a, double b, int n) {
    if (a == b) return 0.0;
    auto g = [&](double tau) {
        if (tau <= 0.0) return 0.0;
        const double t2 = tau * tau;
        const double s = a + (b - a) * t2 * t2;
        return f(s) * (b - a) * 4.0 * tau * t2;
    };
    const double h = 1.0 / n;
    double acc = 0.5 * (g(0.0) + g(1.0));
    for (int k = 1; k < n; ++k) acc += g(k * h);
    return acc * h;
}

/// Recursive Laplace expansion along the first row; m is row-major n x n.
inline double det_laplace(const std::vector<double>& m, int n) {
    if (n == 1) return m[0];
    if (n == 2) return m[0] * m[3] - m[1] * m[2];
    double det = 0.0;
    std::vector<double> minor(static_cast<std::size_t>(n - 1) * (n - 1));
    for (int c = 0; c < n; ++c) {
        std::size_t idx = 0;
        for (int r = 1; r < n; ++r) {
            for (int cc = 0; cc < n; ++cc) {
                if (cc == c) continue;
                minor[idx++] = m[static_cast<std::size_t>(r) * n + cc];
            }
        }
        const double cof = det_laplace(minor, n - 1);
        det += ((c % 2 == 0) ? 1.0 : -1.0) * m[static_cast<std::size_t>(c)] * cof;
    }
    return det;
}

/// Kernel evaluator with per-point caches. Widder kernels are expanded
/// along the last determinant row: g_n(s, t) = sum_m u_m(s) w_m(t), with
/// w_m(t) the signed minor over the Wronskian, all determinants by Laplace
/// expansion. Other sources evaluate through the handle.
class KernelEval {
public:
    explicit KernelEval(const opialtk::KernelHandle& kernel) : kernel_(kernel) {
        if (kernel_.source() == opialtk::KernelHandle::Source::widder) {
            family_ = kernel_.family();
            index_ = kernel_.index();
        }
    }

    double operator()(double s, double t) const {
        if (family_.valid()) {
            const auto& us = members_at(s);
            const auto& wt = weights_at(t);
            double acc = 0.0;
            for (std::size_t m = 0; m < us.size(); ++m) acc += us[m] * wt[m];
            return acc;
        }
        return kernel_(s, t);
    }

    /// Clamped at zero for the nonnegative-kernel uses (determinant
    /// round-off can produce tiny negatives on the diagonal).
    double nonneg(double s, double t) const { return std::max((*this)(s, t), 0.0); }

private:
    static std::uint64_t key_of(double v) {
        std::uint64_t k = 0;
        std::memcpy(&k, &v, sizeof(k));
        return k;
    }

    const std::vector<double>& members_at(double s) const {
        const auto key = key_of(s);
        auto it = member_cache_.find(key);
        if (it != member_cache_.end()) return it->second;
        std::vector<double> us;
        const int n = index_;
        us.reserve(static_cast<std::size_t>(n) + 1);
        for (int m = 0; m <= n; ++m) us.push_back(family_.member(m)(s));
        return member_cache_.emplace(key, std::move(us)).first->second;
    }

    const std::vector<double>& weights_at(double t) const {
        const auto key = key_of(t);
        auto it = weight_cache_.find(key);
        if (it != weight_cache_.end()) return it->second;
        const int n = index_;
        std::vector<double> weights(static_cast<std::size_t>(n) + 1, 0.0);
        if (n == 0) {
            weights[0] = 1.0 / family_.member(0)(t);
        } else {
            // Full Wronskian of u_0..u_n at t.
            std::vector<double> w(static_cast<std::size_t>(n + 1) * (n + 1));
            for (int j = 0; j <= n; ++j) {
                for (int m = 0; m <= n; ++m) {
                    w[static_cast<std::size_t>(j) * (n + 1) + m] =
                        family_.member(m).derivative(j, t);
                }
            }
            const double wn = det_laplace(w, n + 1);
            // Signed minors of the last (derivative-order n) row of the
            // kernel determinant, whose rows are u^(j)(t), j = 0..n-1.
            std::vector<double> minor(static_cast<std::size_t>(n) * n);
            for (int m = 0; m <= n; ++m) {
                std::size_t idx = 0;
                for (int j = 0; j < n; ++j) {
                    for (int c = 0; c <= n; ++c) {
                        if (c == m) continue;
                        minor[idx++] = family_.member(c).derivative(j, t);
                    }
                }
                const double sign = ((n + m) % 2 == 0) ? 1.0 : -1.0;
                weights[static_cast<std::size_t>(m)] = sign * det_laplace(minor, n) / wn;
            }
        }
        return weight_cache_.emplace(key, std::move(weights)).first->second;
    }

    opialtk::KernelHandle kernel_;
    opialtk::BasisFamily family_;
    int index_ = 0;
    mutable std::unordered_map<std::uint64_t, std::vector<double>> member_cache_;
    mutable std::unordered_map<std::uint64_t, std::vector<double>> weight_cache_;
};

/// y(s) from the representation integral, trapezoid at n nodes.
inline double derived_y(const opialtk::OpialProblem& prob, const KernelEval& kernel, double s,
                        int n) {
    return trapz(
        [&](double t) { return kernel.nonneg(s, t) * std::fabs(prob.h(t)); }, prob.base_point, s,
        n);
}

inline int subnodes(const opialtk::OpialProblem& prob, double s, int n) {
    const double frac =
        std::fabs(s - prob.base_point) / std::fabs(prob.eval_point - prob.base_point);
    const int m = static_cast<int>(std::ceil(n * frac));
    return std::max(64, m);
}

inline double p_weight(const opialtk::OpialProblem& prob, const KernelEval& kernel, double s,
                       int n) {
    const double r = prob.exponents.r;
    const double v_exp = -1.0 / (r - 1.0);
    const double k_exp = r / (r - 1.0);
    auto f = [&](double t) {
        return std::pow(prob.weight_v(t), v_exp) * std::pow(kernel.nonneg(s, t), k_exp);
    };
    return std::fabs(trapz(f, prob.base_point, s, subnodes(prob, s, n)));
}

inline double lhs(const opialtk::OpialProblem& prob, const KernelEval& kernel, int n) {
    const double alpha = prob.exponents.alpha;
    const double beta = prob.exponents.beta;
    auto integrand = [&](double s) {
        const double ys = prob.y ? (*prob.y)(s) : derived_y(prob, kernel, s, subnodes(prob, s, n));
        return prob.weight_u(s) * std::pow(std::fabs(ys), beta) *
               std::pow(std::fabs(prob.h(s)), alpha);
    };
    const bool singular = beta < 0.0 && prob.y_derived();
    const double v = singular
                         ? trapz_pow4(integrand, prob.base_point, prob.eval_point, n)
                         : trapz(integrand, prob.base_point, prob.eval_point, n);
    return std::fabs(v);
}

inline double rhs_core(const opialtk::OpialProblem& prob, int n) {
    const double r = prob.exponents.r;
    auto f = [&](double s) { return prob.weight_v(s) * std::pow(std::fabs(prob.h(s)), r); };
    return std::fabs(trapz(f, prob.base_point, prob.eval_point, n));
}

inline double constant(const opialtk::OpialProblem& prob, const KernelEval& kernel, int n) {
    const double alpha = prob.exponents.alpha;
    const double beta = prob.exponents.beta;
    const double r = prob.exponents.r;
    const double lead = std::pow(alpha / (alpha + beta), alpha / r);
    const double w_exp = 1.0 / (r - alpha);
    const double p_exp = beta * (r - 1.0) / (r - alpha);
    auto integrand = [&](double s) {
        const double w = std::pow(
            std::pow(prob.weight_u(s), r) * std::pow(prob.weight_v(s), -alpha), w_exp);
        return w * std::pow(p_weight(prob, kernel, s, n), p_exp);
    };
    const double core =
        p_exp < 0.0 ? trapz_pow4(integrand, prob.base_point, prob.eval_point, n)
                    : trapz(integrand, prob.base_point, prob.eval_point, n);
    return lead * std::pow(std::fabs(core), (r - alpha) / r);
}

/// Right side of the sup-norm bound, as displayed (inner integral over the
/// whole [a, x], v sup-norm to the beta).
inline double extreme_rhs(const opialtk::OpialProblem& prob, const KernelEval& kernel, int n) {
    const double alpha = prob.exponents.alpha;
    const double beta = prob.exponents.beta;
    const double r = prob.exponents.r;
    auto outer = [&](double w) {
        const double inner = trapz([&](double t) { return prob.weight_v(t) * kernel(w, t); },
                                   prob.base_point, prob.eval_point, n);
        return prob.weight_u(w) * std::pow(std::fabs(inner), (r - alpha) / r);
    };
    const double base = std::fabs(trapz(outer, prob.base_point, prob.eval_point, n));
    double sup_v = 0.0, sup_h = 0.0;
    const auto range = prob.range();
    for (int k = 0; k < 1025; ++k) {
        const double s = range.lo + (range.hi - range.lo) * k / 1024.0;
        sup_v = std::max(sup_v, std::fabs(prob.weight_v(s)));
        sup_h = std::max(sup_h, std::fabs(prob.h(s)));
    }
    return base * std::pow(sup_v, beta) * std::pow(sup_h, alpha + beta);
}

inline bool close(double engine, double reference, double rel = 1e-6) {
    const double scale = std::max({std::fabs(engine), std::fabs(reference), 1e-9});
    return std::fabs(engine - reference) <= rel * scale;
}

} // namespace oracle
