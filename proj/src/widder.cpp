#include "opialtk/widder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "opialtk/errors.hpp"
#include "opialtk/util.hpp"

namespace opialtk {

namespace {

constexpr double kFloorScale = 1e-10;

struct Det {
    double value = 0.0;
    double scale = 0.0; // product of row max-norms of the original matrix
};

/// Determinant by LU with partial pivoting; `m` is row-major n x n and is
/// consumed in place.
Det lu_determinant(std::vector<double>& m, int n) {
    Det out;
    out.scale = 1.0;
    for (int r = 0; r < n; ++r) {
        double row_max = 0.0;
        for (int c = 0; c < n; ++c) {
            row_max = std::max(row_max, std::fabs(m[static_cast<std::size_t>(r) * n + c]));
        }
        out.scale *= row_max;
    }
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::fabs(m[static_cast<std::size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            const double v = std::fabs(m[static_cast<std::size_t>(r) * n + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) {
            out.value = 0.0;
            return out;
        }
        if (pivot != col) {
            for (int c = 0; c < n; ++c) {
                std::swap(m[static_cast<std::size_t>(pivot) * n + c],
                          m[static_cast<std::size_t>(col) * n + c]);
            }
            det = -det;
        }
        const double d = m[static_cast<std::size_t>(col) * n + col];
        det *= d;
        for (int r = col + 1; r < n; ++r) {
            const double factor = m[static_cast<std::size_t>(r) * n + col] / d;
            for (int c = col + 1; c < n; ++c) {
                m[static_cast<std::size_t>(r) * n + c] -=
                    factor * m[static_cast<std::size_t>(col) * n + c];
            }
        }
    }
    out.value = det;
    return out;
}

double effective_floor(double user_floor, double scale) {
    if (user_floor > 0.0) return user_floor;
    // A zero scale means an identically-zero row; treat as singular.
    return scale > 0.0 ? kFloorScale * scale : std::numeric_limits<double>::min();
}

/// Wronskian matrix of members[0..count-1] at x: row j holds the j-th
/// derivatives.
std::vector<double> wronskian_matrix(std::span<const SmoothFunction> members, int count,
                                     double x) {
    std::vector<double> m(static_cast<std::size_t>(count) * count);
    for (int j = 0; j < count; ++j) {
        for (int c = 0; c < count; ++c) {
            m[static_cast<std::size_t>(j) * count + c] =
                members[static_cast<std::size_t>(c)].derivative(j, x);
        }
    }
    return m;
}

Det wronskian_det(std::span<const SmoothFunction> members, int count, double x) {
    auto m = wronskian_matrix(members, count, x);
    return lu_determinant(m, count);
}

} // namespace

struct BasisFamily::Impl {
    std::vector<SmoothFunction> members;
    Interval domain;
    double floor = 0.0;
    std::vector<double> grid;
    std::string spec;
    FamilyDiagnostics diagnostics;
};

BasisFamily::BasisFamily(std::vector<SmoothFunction> members, Interval domain,
                         double wronskian_floor, int grid_points, std::string spec) {
    if (members.empty()) throw DomainError("basis family needs at least one member");
    if (grid_points < 2) throw DomainError("validation grid needs at least 2 points");
    const int n = static_cast<int>(members.size()) - 1;
    for (const auto& u : members) {
        if (!u.valid()) throw DomainError("basis family member is empty");
        if (!u.domain().contains(domain)) {
            throw DomainError("basis member domain does not cover the family domain");
        }
        if (u.max_order() < n + 1) {
            throw DomainError("basis members need max_order >= " + std::to_string(n + 1));
        }
    }
    auto impl = std::make_shared<Impl>();
    impl->members = std::move(members);
    impl->domain = domain;
    impl->floor = wronskian_floor;
    impl->grid = linspace(domain.lo, domain.hi, grid_points);
    impl->spec = std::move(spec);

    FamilyDiagnostics diag;
    for (int i = 0; i <= n; ++i) {
        FamilyDiagnostics::Entry entry;
        entry.index = i;
        entry.min_wronskian = std::numeric_limits<double>::infinity();
        bool below = false;
        for (double x : impl->grid) {
            const Det d = wronskian_det(impl->members, i + 1, x);
            if (d.value < entry.min_wronskian) {
                entry.min_wronskian = d.value;
                entry.argmin = x;
            }
            if (d.value < effective_floor(impl->floor, d.scale)) below = true;
        }
        diag.entries.push_back(entry);
        if (below) diag.ok = false;
    }
    impl->diagnostics = diag;
    if (!diag.ok) {
        std::string msg = "Wronskian positivity fails on the validation grid:";
        for (const auto& e : diag.entries) {
            msg += " W_" + std::to_string(e.index) + " min " + format_double(e.min_wronskian) +
                   " at x=" + format_double(e.argmin) + ";";
        }
        throw SingularWronskianError(msg);
    }
    impl_ = std::move(impl);
}

int BasisFamily::top_index() const { return static_cast<int>(impl_->members.size()) - 1; }
int BasisFamily::size() const { return static_cast<int>(impl_->members.size()); }
const SmoothFunction& BasisFamily::member(int i) const {
    return impl_->members[static_cast<std::size_t>(i)];
}
const Interval& BasisFamily::domain() const { return impl_->domain; }
double BasisFamily::wronskian_floor() const { return impl_->floor; }
const std::string& BasisFamily::spec() const { return impl_->spec; }
const FamilyDiagnostics& BasisFamily::diagnostics() const { return impl_->diagnostics; }

double wronskian(const BasisFamily& family, int i, double x) {
    if (i < 0 || i > family.top_index()) {
        throw DomainError("wronskian index " + std::to_string(i) + " out of range");
    }
    std::vector<SmoothFunction> mem;
    mem.reserve(static_cast<std::size_t>(i) + 1);
    for (int c = 0; c <= i; ++c) mem.push_back(family.member(c));
    return wronskian_det(mem, i + 1, x).value;
}

double widder_derivative(const BasisFamily& family, const SmoothFunction& f, int i, double x) {
    if (i == 0) return f(x);
    if (i < 0 || i > family.top_index() + 1) {
        throw DomainError("Widder derivative order " + std::to_string(i) + " out of range");
    }
    if (f.max_order() < i) {
        throw DomainError("function max_order too small for Widder derivative of order " +
                          std::to_string(i));
    }
    // Numerator: columns u_0..u_{i-1}, f with derivative rows 0..i.
    const int n = i + 1;
    std::vector<double> num(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        for (int c = 0; c < i; ++c) {
            num[static_cast<std::size_t>(j) * n + c] = family.member(c).derivative(j, x);
        }
        num[static_cast<std::size_t>(j) * n + i] = f.derivative(j, x);
    }
    const Det top = lu_determinant(num, n);

    std::vector<SmoothFunction> mem;
    for (int c = 0; c < i; ++c) mem.push_back(family.member(c));
    const Det bottom = wronskian_det(mem, i, x);
    const double floor = effective_floor(family.wronskian_floor(), bottom.scale);
    if (std::fabs(bottom.value) < floor) {
        throw SingularWronskianError("W_" + std::to_string(i - 1) + "(" + format_double(x) +
                                     ") = " + format_double(bottom.value) + " below floor " +
                                     format_double(floor));
    }
    return top.value / bottom.value;
}

double kernel_g_dx(const BasisFamily& family, int i, int k, double x, double t) {
    if (i < 0 || i > family.top_index()) {
        throw DomainError("kernel index " + std::to_string(i) + " out of range");
    }
    if (i == 0) {
        const double u0t = family.member(0)(t);
        const Det d{u0t, std::fabs(u0t)};
        const double floor = effective_floor(family.wronskian_floor(), d.scale);
        if (std::fabs(u0t) < floor) {
            throw SingularWronskianError("u_0(" + format_double(t) + ") below floor");
        }
        return family.member(0).derivative(k, x) / u0t;
    }
    const int n = i + 1;
    std::vector<double> m(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < i; ++j) {
        for (int c = 0; c < n; ++c) {
            m[static_cast<std::size_t>(j) * n + c] = family.member(c).derivative(j, t);
        }
    }
    for (int c = 0; c < n; ++c) {
        m[static_cast<std::size_t>(i) * n + c] = family.member(c).derivative(k, x);
    }
    const Det top = lu_determinant(m, n);

    std::vector<SmoothFunction> mem;
    for (int c = 0; c <= i; ++c) mem.push_back(family.member(c));
    const Det bottom = wronskian_det(mem, i + 1, t);
    const double floor = effective_floor(family.wronskian_floor(), bottom.scale);
    if (std::fabs(bottom.value) < floor) {
        throw SingularWronskianError("W_" + std::to_string(i) + "(" + format_double(t) +
                                     ") below floor");
    }
    return top.value / bottom.value;
}

double kernel_g(const BasisFamily& family, int i, double x, double t) {
    return kernel_g_dx(family, i, 0, x, t);
}

double greens_function(std::span<const SmoothFunction> solutions, double x, double t,
                       double floor) {
    const int n = static_cast<int>(solutions.size());
    if (n < 1) throw DomainError("greens_function needs at least one solution");
    const Det bottom = wronskian_det(solutions, n, t);
    const double eff = effective_floor(floor, bottom.scale);
    if (std::fabs(bottom.value) < eff) {
        throw SingularWronskianError("solution Wronskian at t=" + format_double(t) +
                                     " below floor");
    }
    std::vector<double> m(static_cast<std::size_t>(n) * n);
    for (int j = 0; j + 1 < n; ++j) {
        for (int c = 0; c < n; ++c) {
            m[static_cast<std::size_t>(j) * n + c] =
                solutions[static_cast<std::size_t>(c)].derivative(j, t);
        }
    }
    for (int c = 0; c < n; ++c) {
        m[static_cast<std::size_t>(n - 1) * n + c] = solutions[static_cast<std::size_t>(c)](x);
    }
    const Det top = lu_determinant(m, n);
    return top.value / bottom.value;
}

FamilyDiagnostics validate_family(const BasisFamily& family) {
    FamilyDiagnostics diag;
    const auto grid = linspace(family.domain().lo, family.domain().hi, 257);
    for (int i = 0; i <= family.top_index(); ++i) {
        FamilyDiagnostics::Entry entry;
        entry.index = i;
        entry.min_wronskian = std::numeric_limits<double>::infinity();
        for (double x : grid) {
            const double w = wronskian(family, i, x);
            if (w < entry.min_wronskian) {
                entry.min_wronskian = w;
                entry.argmin = x;
            }
        }
        if (entry.min_wronskian <= 0.0) diag.ok = false;
        diag.entries.push_back(entry);
    }
    return diag;
}

BasisFamily parse_basis(const std::string& spec, const Interval& domain,
                        double wronskian_floor) {
    const std::size_t colon = spec.find(':');
    if (colon == std::string::npos) throw ParseError("malformed basis spec '" + spec + "'");
    const std::string head = spec.substr(0, colon);
    const std::string args = spec.substr(colon + 1);
    std::vector<SmoothFunction> members;
    if (head == "monomials") {
        bool ok = false;
        const double nd = parse_double(args, ok);
        const int n = static_cast<int>(nd);
        if (!ok || nd != n || n < 0 || n > 12) {
            throw ParseError("monomials:<n> needs an integer n in [0, 12], got '" + args + "'");
        }
        for (int i = 0; i <= n; ++i) {
            std::vector<double> coeffs(static_cast<std::size_t>(i) + 1, 0.0);
            coeffs.back() = 1.0;
            std::string fspec = "poly:";
            for (std::size_t c = 0; c < coeffs.size(); ++c) {
                fspec += (c ? "," : "") + format_double(coeffs[c]);
            }
            members.push_back(parse_function(i == 0 ? "const:1" : fspec, domain));
        }
    } else if (head == "exp-basis") {
        std::size_t pos = 0;
        while (pos <= args.size()) {
            const std::size_t next = args.find(',', pos);
            const std::string item =
                args.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
            bool ok = false;
            const double lambda = parse_double(item, ok);
            if (!ok) throw ParseError("bad rate '" + item + "' in '" + spec + "'");
            members.push_back(parse_function("exp:" + format_double(lambda), domain));
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        if (members.empty()) throw ParseError("exp-basis needs at least one rate");
    } else if (head == "custom") {
        std::size_t pos = 0;
        while (pos <= args.size()) {
            const std::size_t next = args.find('|', pos);
            const std::string item =
                args.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
            members.push_back(parse_function(item, domain));
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        if (members.empty()) throw ParseError("custom basis needs at least one function");
    } else {
        throw ParseError("unknown basis family '" + head + "' in '" + spec + "'");
    }
    return BasisFamily(std::move(members), domain, wronskian_floor, 257, spec);
}

struct KernelHandle::Impl {
    Source source = Source::unit;
    std::string label = "unit";
    std::function<double(double, double)> eval;
    BasisFamily family; // widder source only
    int index = 0;
};

KernelHandle KernelHandle::unit() {
    auto impl = std::make_shared<Impl>();
    impl->source = Source::unit;
    impl->label = "unit";
    impl->eval = [](double, double) { return 1.0; };
    return KernelHandle(std::move(impl));
}

KernelHandle KernelHandle::widder(BasisFamily family, int index) {
    if (index < 0 || index > family.top_index()) {
        throw DomainError("kernel index out of range for the family");
    }
    auto impl = std::make_shared<Impl>();
    impl->source = Source::widder;
    impl->label = "widder:" + (family.spec().empty() ? std::string("custom") : family.spec()) +
                  ":" + std::to_string(index);
    impl->family = family;
    impl->index = index;
    impl->eval = [family, index](double x, double t) { return kernel_g(family, index, x, t); };
    return KernelHandle(std::move(impl));
}

KernelHandle KernelHandle::greens(std::vector<SmoothFunction> solutions, std::string label) {
    auto impl = std::make_shared<Impl>();
    impl->source = Source::greens;
    impl->label = label.empty() ? "greens" : std::move(label);
    auto sols = std::make_shared<std::vector<SmoothFunction>>(std::move(solutions));
    impl->eval = [sols](double x, double t) {
        return greens_function(std::span<const SmoothFunction>(*sols), x, t);
    };
    return KernelHandle(std::move(impl));
}

KernelHandle KernelHandle::custom(std::string label, std::function<double(double, double)> fn) {
    auto impl = std::make_shared<Impl>();
    impl->source = Source::custom;
    impl->label = std::move(label);
    impl->eval = std::move(fn);
    return KernelHandle(std::move(impl));
}

double KernelHandle::operator()(double x, double t) const { return impl_->eval(x, t); }
KernelHandle::Source KernelHandle::source() const { return impl_->source; }
const std::string& KernelHandle::label() const { return impl_->label; }

const BasisFamily& KernelHandle::family() const {
    if (impl_->source != Source::widder) {
        throw DomainError("kernel has no basis family");
    }
    return impl_->family;
}

int KernelHandle::index() const {
    if (impl_->source != Source::widder) {
        throw DomainError("kernel has no basis index");
    }
    return impl_->index;
}

} // namespace opialtk
