#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "opialtk/function.hpp"
#include "opialtk/interval.hpp"

namespace opialtk {

/// Per-index minimum of the Wronskians over the validation grid.
struct FamilyDiagnostics {
    struct Entry {
        int index = 0;
        double min_wronskian = 0.0;
        double argmin = 0.0;
    };
    std::vector<Entry> entries;
    bool ok = true;
};

/// Ordered family u_0..u_n whose Wronskians W_0..W_n are positive on the
/// domain (checked on an equispaced validation grid at construction;
/// positivity between grid points is not certified). Immutable; cheap to
/// copy.
class BasisFamily {
public:
    BasisFamily() = default;

    /// Throws SingularWronskianError when any W_i drops below the floor on
    /// the grid. wronskian_floor = 0 selects the scale-aware default
    /// (1e-10 x product of row max-norms of the Wronskian matrix).
    BasisFamily(std::vector<SmoothFunction> members, Interval domain,
                double wronskian_floor = 0.0, int grid_points = 257, std::string spec = {});

    bool valid() const { return impl_ != nullptr; }
    int top_index() const; // n
    int size() const;      // n + 1
    const SmoothFunction& member(int i) const;
    const Interval& domain() const;
    double wronskian_floor() const;
    const std::string& spec() const;
    const FamilyDiagnostics& diagnostics() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

/// W_i(x): determinant of the (i+1)x(i+1) matrix with entry (j, m) =
/// u_m^(j)(x), by LU factorization with partial pivoting.
double wronskian(const BasisFamily& family, int i, double x);

/// L_i f(x) = W[u_0,...,u_{i-1}, f](x) / W_{i-1}(x); L_0 f = f.
/// Throws SingularWronskianError when the denominator falls below the
/// family floor at x.
double widder_derivative(const BasisFamily& family, const SmoothFunction& f, int i, double x);

/// g_i(x, t): for i >= 1, the determinant with rows u^(j)(t), j = 0..i-1,
/// and last row u(x), divided by W_i(t); g_0(x, t) = u_0(x)/u_0(t).
double kernel_g(const BasisFamily& family, int i, double x, double t);

/// dx^k g_i(x, t): same determinant with last row u^(k)(x). k = 0 is
/// kernel_g itself.
double kernel_g_dx(const BasisFamily& family, int i, int k, double x, double t);

/// Cauchy-kernel ratio for the operator whose null space the solutions
/// span: numerator rows y^(j)(t), j = 0..n-2, last row y(x); denominator
/// the full Wronskian of the solutions at t. Solutions need not satisfy
/// the positivity hypothesis; only |W(t)| is checked against the floor
/// (floor = 0 selects the scale-aware default).
double greens_function(std::span<const SmoothFunction> solutions, double x, double t,
                       double floor = 0.0);

/// Recomputes the per-index grid minima for an already-built family.
FamilyDiagnostics validate_family(const BasisFamily& family);

/// Builds a family from its spec string:
///   monomials:<n>              {1, x, ..., x^n}
///   exp-basis:<l0>,<l1>,...    {e^(l0 x), e^(l1 x), ...}
///   custom:<fspec>|<fspec>...  explicit function specs
BasisFamily parse_basis(const std::string& spec, const Interval& domain,
                        double wronskian_floor = 0.0);

/// Nonnegative kernel of the weighted inequality engine: a unit kernel,
/// a Widder kernel g_n, a Green's-function kernel, or a custom evaluator.
class KernelHandle {
public:
    enum class Source { unit, widder, greens, custom };

    KernelHandle() : KernelHandle(unit()) {}

    static KernelHandle unit();
    static KernelHandle widder(BasisFamily family, int index);
    static KernelHandle greens(std::vector<SmoothFunction> solutions, std::string label = {});
    static KernelHandle custom(std::string label, std::function<double(double, double)> fn);

    double operator()(double x, double t) const;
    Source source() const;
    const std::string& label() const;

    /// Family/index behind a widder-source handle (throws otherwise).
    const BasisFamily& family() const;
    int index() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
    explicit KernelHandle(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
};

} // namespace opialtk
