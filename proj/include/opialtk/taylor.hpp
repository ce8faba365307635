#pragma once

#include <vector>

#include "opialtk/function.hpp"
#include "opialtk/quadrature.hpp"
#include "opialtk/widder.hpp"

namespace opialtk {

/// Expansion of f around t in the generalized-derivative calculus of a
/// basis family: coefficients L_0 f(t)..L_n f(t) against the kernels
/// g_i(x, t).
class TaylorExpansion {
public:
    /// f needs max_order >= n + 1 (and >= n + 2 to evaluate the remainder).
    TaylorExpansion(BasisFamily family, SmoothFunction f, double center, int order);

    const BasisFamily& family() const { return family_; }
    const SmoothFunction& function() const { return f_; }
    double center() const { return center_; }
    int order() const { return order_; }
    const std::vector<double>& coefficients() const { return coeffs_; }

private:
    BasisFamily family_;
    SmoothFunction f_;
    double center_ = 0.0;
    int order_ = 0;
    std::vector<double> coeffs_;
};

/// Partial sum f(t) g_0(x,t) + sum_{i=1..n} L_i f(t) g_i(x,t)
/// (the expansion without its remainder).
double taylor_eval(const TaylorExpansion& exp, double x);

/// Remainder integral_t^x g_n(x, s) L_{n+1} f(s) ds, by quadrature. The
/// integration variable enters the kernel's second slot; that reading is
/// forced by the identity f = partial sum + remainder reducing to the
/// classical integral remainder for the monomial family.
IntegralResult taylor_remainder(const TaylorExpansion& exp, double x, const QuadratureSpec& quad);

/// The function f(x) = integral_{x0}^x g_n(x, t) h(t) dt, where h plays the
/// role of L_{n+1} f. All generalized derivatives of orders 0..n vanish at
/// x0 and L_{n+1} of the result recovers h. Derivatives up to order n + 1
/// are served by differentiating the kernel's last row under the integral;
/// orders beyond that fall back to finite differences of the values.
/// Order-0 values are memoized (thread-safe).
SmoothFunction represent_from_h(const BasisFamily& family, const SmoothFunction& h, double x0,
                                QuadratureSpec quad = {});

} // namespace opialtk
