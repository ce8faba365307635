// Command-line front end: kernel tables, sharp constants, inequality
// verification (single instances and seeded suites), generalized Taylor
// tables, and suite-manifest generation. Reports are byte-stable: identical
// flags and seed reproduce identical output except the manifest timestamp.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "opialtk/errors.hpp"
#include "opialtk/opial.hpp"
#include "opialtk/serialize.hpp"
#include "opialtk/taylor.hpp"
#include "opialtk/testgen.hpp"
#include "opialtk/util.hpp"
#include "opialtk/version.hpp"
#include "opialtk/widder.hpp"

namespace {

using namespace opialtk;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInputError = 2;

struct GridSpec {
    double lo = 0.0;
    double hi = 1.0;
    int count = 5;
};

GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    std::istringstream in(text);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(in, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw ParseError("grid spec must be lo:hi:count, got '" + text + "'");
    bool ok1 = false, ok2 = false;
    g.lo = parse_double(parts[0], ok1);
    g.hi = parse_double(parts[1], ok2);
    try {
        g.count = std::stoi(parts[2]);
    } catch (const std::exception&) {
        throw ParseError("bad grid count in '" + text + "'");
    }
    if (!ok1 || !ok2 || g.count < 1) throw ParseError("bad grid spec '" + text + "'");
    return g;
}

Interval parse_domain(const std::string& text) {
    const std::size_t comma = text.find(',');
    if (comma == std::string::npos) {
        throw ParseError("domain must be lo,hi, got '" + text + "'");
    }
    bool ok1 = false, ok2 = false;
    const double lo = parse_double(text.substr(0, comma), ok1);
    const double hi = parse_double(text.substr(comma + 1), ok2);
    if (!ok1 || !ok2) throw ParseError("bad domain '" + text + "'");
    return Interval(lo, hi);
}

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Writes to --out when given, stdout otherwise.
void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw Error("cannot open output file '" + out_path + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

struct ProblemFlags {
    std::string kernel = "auto"; // auto | unit | widder | greens
    std::string basis;
    std::string domain = "0,1";
    std::string u = "const:1";
    std::string v = "const:1";
    std::string f; // supplied y
    std::string h;
    double alpha = 1.0;
    double beta = 1.0;
    double r = 2.0;
    double a = 0.0;
    double x = 1.0;
    double quad_tol = 0.0; // 0 -> default policy
};

void add_problem_flags(CLI::App* cmd, ProblemFlags& pf) {
    cmd->add_option("--kernel", pf.kernel, "kernel source: unit | widder | greens (default: widder when --basis is given, unit otherwise)");
    cmd->add_option("--basis", pf.basis, "basis spec (monomials:n | exp-basis:l0,l1,... | custom:f|f|...)");
    cmd->add_option("--domain", pf.domain, "working interval lo,hi (default 0,1)");
    cmd->add_option("--u", pf.u, "weight u function spec");
    cmd->add_option("--v", pf.v, "weight v function spec");
    cmd->add_option("--f", pf.f, "explicit y function spec (omit to derive y from the kernel representation of |h|)");
    cmd->add_option("--h", pf.h, "h function spec");
    cmd->add_option("--alpha", pf.alpha, "exponent alpha");
    cmd->add_option("--beta", pf.beta, "exponent beta");
    cmd->add_option("--r", pf.r, "exponent r");
    cmd->add_option("--a", pf.a, "base point a");
    cmd->add_option("--x", pf.x, "evaluation point x");
    cmd->add_option("--quad-tol", pf.quad_tol, "relative quadrature tolerance override");
}

QuadratureSpec quad_from(const ProblemFlags& pf) {
    QuadratureSpec q;
    if (pf.quad_tol > 0.0) {
        q.rel_tol = pf.quad_tol;
        q.abs_tol = pf.quad_tol * 1e-3;
    }
    return q;
}

Interval working_domain(const ProblemFlags& pf) {
    Interval dom = parse_domain(pf.domain);
    // A tent function pins its own domain [0, a]; widen the default to it.
    for (const std::string* spec : {&pf.f, &pf.h, &pf.u, &pf.v}) {
        if (spec->rfind("tent:", 0) == 0) {
            bool ok = false;
            const double width = parse_double(spec->substr(5), ok);
            if (ok && width > 0.0 && dom.lo >= 0.0 && dom.hi <= width) {
                dom = Interval(0.0, width);
            }
        }
    }
    return dom;
}

KernelHandle make_kernel(const ProblemFlags& pf, const Interval& dom) {
    std::string choice = pf.kernel;
    if (choice == "auto") choice = pf.basis.empty() ? "unit" : "widder";
    if (choice == "unit") return KernelHandle::unit();
    if (pf.basis.empty()) throw ParseError("kernel '" + choice + "' needs --basis");
    if (choice == "widder") {
        BasisFamily family = parse_basis(pf.basis, dom);
        return KernelHandle::widder(family, family.top_index());
    }
    if (choice == "greens") {
        // Solutions are unvalidated basis members; the engine needs a
        // nonnegative kernel, so wrap the ratio in |.|.
        std::vector<SmoothFunction> sols;
        const std::string args = pf.basis.rfind("custom:", 0) == 0 ? pf.basis.substr(7) : pf.basis;
        std::size_t pos = 0;
        while (pos <= args.size()) {
            const std::size_t next = args.find('|', pos);
            sols.push_back(parse_function(
                args.substr(pos, next == std::string::npos ? std::string::npos : next - pos),
                dom));
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        auto shared = std::make_shared<std::vector<SmoothFunction>>(std::move(sols));
        return KernelHandle::custom("abs-greens:" + pf.basis, [shared](double s, double t) {
            return std::fabs(greens_function(*shared, s, t));
        });
    }
    throw ParseError("unknown kernel source '" + choice + "'");
}

OpialProblem problem_from(const ProblemFlags& pf, bool derive_h_from_f) {
    const Interval dom = working_domain(pf);
    KernelHandle kernel = make_kernel(pf, dom);
    SmoothFunction u = parse_function(pf.u, dom);
    SmoothFunction v = parse_function(pf.v, dom);
    std::optional<SmoothFunction> y;
    if (!pf.f.empty()) y = parse_function(pf.f, dom);
    SmoothFunction h;
    if (!pf.h.empty()) {
        h = parse_function(pf.h, dom);
    } else if (derive_h_from_f && y) {
        h = derivative_function(*y, 1);
    } else {
        throw ParseError("--h is required (or --f with the classical theorem)");
    }
    return OpialProblem::make(std::move(kernel), std::move(u), std::move(v), std::move(h),
                              std::move(y), pf.a, pf.x, {pf.alpha, pf.beta, pf.r}, quad_from(pf));
}

RunManifest manifest_for(const std::string& command,
                         const std::vector<std::pair<std::string, std::string>>& params,
                         std::uint64_t seed) {
    RunManifest m;
    m.command = command;
    for (const auto& [k, v] : params) m.parameters[k] = v;
    m.parameters["rng"] = SplitMix64::kAlgorithm;
    m.version = kVersion;
    m.seed = seed;
    m.timestamp = now_iso8601();
    return m;
}

InequalityReport run_theorem(const std::string& theorem, const OpialProblem& prob) {
    if (theorem == "classical") return verify_classical(prob);
    if (theorem == "main") return verify_main(prob);
    if (theorem == "r2") return verify_r2(prob);
    if (theorem == "extreme") return extreme_bound(prob);
    if (theorem == "regime") {
        const Regime reg = classify_regime(prob.exponents);
        return reg.tag == RegimeTag::main ? verify_main(prob) : verify_regime(prob);
    }
    throw ParseError("unknown theorem tag '" + theorem + "'");
}

void flip_report_direction(InequalityReport& rep) {
    const double slack = tolerance_slack(rep);
    if (rep.regime.direction == BoundDirection::lower) {
        rep.regime.direction = BoundDirection::upper;
        rep.satisfied = rep.lhs <= rep.bound + slack;
        rep.ratio = rep.bound != 0.0 ? rep.lhs / rep.bound : rep.ratio;
    } else {
        rep.regime.direction = BoundDirection::lower;
        rep.satisfied = rep.lhs >= rep.bound - slack;
        rep.ratio = rep.lhs != 0.0 ? rep.bound / rep.lhs : rep.ratio;
    }
}

int cmd_kernel(const std::string& basis, int index, const std::string& grid_text,
               const std::string& domain_text, const std::string& out_path) {
    const GridSpec grid = parse_grid(grid_text);
    Interval dom = parse_domain(domain_text);
    if (grid.lo < dom.lo || grid.hi > dom.hi) dom = Interval(std::min(grid.lo, dom.lo), std::max(grid.hi, dom.hi));
    const BasisFamily family = parse_basis(basis, dom);
    std::string csv = "x,t,g\n";
    for (double x : linspace(grid.lo, grid.hi, grid.count)) {
        for (double t : linspace(grid.lo, grid.hi, grid.count)) {
            csv += format_double(x) + "," + format_double(t) + "," +
                   format_double(kernel_g(family, index, x, t)) + "\n";
        }
    }
    emit(out_path, csv);
    return kExitOk;
}

int cmd_constant(const ProblemFlags& pf, const std::string& out_path) {
    ProblemFlags flags = pf;
    if (flags.h.empty()) flags.h = "const:1"; // C(x) does not involve h
    const OpialProblem prob = problem_from(flags, false);
    const Regime regime = classify_regime(prob.exponents);
    if (regime.tag != RegimeTag::main) {
        throw RegimeError("the constant command needs MAIN-regime exponents");
    }
    const IntegralResult c = opial_constant_result(prob);
    nlohmann::json j;
    j["C"] = c.value;
    nlohmann::json samples = nlohmann::json::array();
    for (double s : linspace(prob.base_point, prob.eval_point, 9)) {
        samples.push_back(p_weight(prob, s));
    }
    j["P_samples"] = samples;
    j["quad_error"] = c.error_estimate;
    emit(out_path, j.dump() + "\n");
    return kExitOk;
}

int cmd_taylor(const std::string& basis, const std::string& fspec, double t, int n,
               const std::string& grid_text, const std::string& domain_text,
               const std::string& out_path) {
    const GridSpec grid = parse_grid(grid_text);
    const Interval dom = parse_domain(domain_text);
    const BasisFamily family = parse_basis(basis, dom);
    const SmoothFunction f = parse_function(fspec, dom);
    const TaylorExpansion expansion(family, f, t, n);
    QuadratureSpec quad;
    std::string csv = "x,f,partial_sum,remainder,identity_residual\n";
    for (double x : linspace(grid.lo, grid.hi, grid.count)) {
        const double fx = f(x);
        const double partial = taylor_eval(expansion, x);
        const double remainder = taylor_remainder(expansion, x, quad).value;
        csv += format_double(x) + "," + format_double(fx) + "," + format_double(partial) + "," +
               format_double(remainder) + "," + format_double(fx - partial - remainder) + "\n";
    }
    emit(out_path, csv);
    return kExitOk;
}

int cmd_gen(std::uint64_t seed, int count, const std::string& regime_text,
            const std::string& domain_text, const std::string& out_path) {
    SuiteConfig cfg;
    cfg.seed = seed;
    cfg.interval = parse_domain(domain_text);
    std::vector<RegimeTag> tags;
    if (regime_text == "all") {
        tags = {RegimeTag::main, RegimeTag::ii,  RegimeTag::iii, RegimeTag::iv, RegimeTag::v,
                RegimeTag::vi,   RegimeTag::vii, RegimeTag::viii, RegimeTag::ix};
    } else {
        tags.push_back(parse_regime_tag(regime_text));
    }
    std::string out;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        SuiteConfig tag_cfg = cfg;
        tag_cfg.seed = seed + i; // distinct stream per regime block
        for (const auto& inst : gen_suite(tag_cfg, tags[i], count)) {
            out += inst.to_line() + "\n";
        }
    }
    emit(out_path, out);
    return kExitOk;
}

int cmd_verify(const std::string& theorem, const ProblemFlags& pf, const std::string& suite_path,
               bool flip_direction, std::uint64_t seed, const std::string& format,
               const std::string& out_path) {
    std::vector<InequalityReport> reports;
    std::vector<std::pair<std::string, std::string>> params{{"theorem", theorem},
                                                            {"format", format}};
    if (suite_path.empty()) {
        OpialProblem prob = problem_from(pf, theorem == "classical");
        InequalityReport rep = run_theorem(theorem, prob);
        if (flip_direction) flip_report_direction(rep);
        reports.push_back(std::move(rep));
        params.emplace_back("mode", "single");
    } else {
        std::ifstream in(suite_path);
        if (!in) throw Error("cannot open suite manifest '" + suite_path + "'");
        std::vector<GeneratedInstance> instances;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            instances.push_back(GeneratedInstance::from_line(line));
        }
        params.emplace_back("mode", "suite");
        params.emplace_back("suite", suite_path);
        params.emplace_back("instances", std::to_string(instances.size()));
        reports.resize(instances.size());
        std::vector<std::string> failures(instances.size());
        QuadratureSpec quad;
        if (pf.quad_tol > 0.0) {
            quad.rel_tol = pf.quad_tol;
            quad.abs_tol = pf.quad_tol * 1e-3;
        }
        parallel_for(instances.size(), [&](std::size_t i) {
            try {
                const OpialProblem prob = instantiate(instances[i], quad);
                InequalityReport rep = theorem == "regime" || theorem == "auto"
                                           ? run_theorem("regime", prob)
                                           : run_theorem(theorem, prob);
                if (flip_direction) flip_report_direction(rep);
                reports[i] = std::move(rep);
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        });
        for (std::size_t i = 0; i < failures.size(); ++i) {
            if (!failures[i].empty()) {
                throw Error("instance " + std::to_string(i) + ": " + failures[i]);
            }
        }
    }

    std::string out;
    if (format == "json") {
        out += manifest_for("verify", params, seed).to_json() + "\n";
        for (const auto& rep : reports) out += report_to_json(rep) + "\n";
    } else if (format == "csv") {
        out += report_csv_header() + "\n";
        for (const auto& rep : reports) out += report_to_csv_row(rep) + "\n";
    } else {
        throw ParseError("unknown format '" + format + "'");
    }
    emit(out_path, out);

    bool all_ok = true;
    for (const auto& rep : reports) {
        if (rep.theorem == "extreme") continue; // recorded, not asserted
        all_ok = all_ok && rep.satisfied;
    }
    return all_ok ? kExitOk : kExitViolation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical toolkit for weighted integral inequalities of generalized derivatives"};
    app.require_subcommand(1);

    // kernel
    auto* kernel_cmd = app.add_subcommand("kernel", "tabulate a basis kernel g_i over a grid (CSV)");
    std::string k_basis, k_grid = "0:1:5", k_domain = "0,1", k_out;
    int k_index = 0;
    kernel_cmd->add_option("--basis", k_basis, "basis spec")->required();
    kernel_cmd->add_option("--i", k_index, "kernel index")->required();
    kernel_cmd->add_option("--grid", k_grid, "grid lo:hi:count");
    kernel_cmd->add_option("--domain", k_domain, "working interval lo,hi");
    kernel_cmd->add_option("--out", k_out, "output file (stdout when omitted)");

    // constant
    auto* constant_cmd = app.add_subcommand("constant", "sharp constant C(x) with P samples (JSON)");
    ProblemFlags c_flags;
    std::string c_out;
    add_problem_flags(constant_cmd, c_flags);
    constant_cmd->add_option("--out", c_out, "output file");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "verify an inequality instance or a suite manifest");
    ProblemFlags v_flags;
    std::string v_theorem = "main", v_suite, v_format = "json", v_out;
    std::uint64_t v_seed = 0;
    bool v_flip = false;
    verify_cmd->add_option("--theorem", v_theorem, "classical | main | r2 | extreme | regime");
    add_problem_flags(verify_cmd, v_flags);
    verify_cmd->add_option("--suite", v_suite, "suite manifest file (one instance per line)");
    verify_cmd->add_option("--seed", v_seed, "seed recorded in the run manifest");
    verify_cmd->add_option("--format", v_format, "json | csv");
    verify_cmd->add_option("--out", v_out, "output file");
    verify_cmd->add_flag("--flip-direction", v_flip,
                         "diagnostic: verify against the opposite direction");

    // taylor
    auto* taylor_cmd = app.add_subcommand("taylor", "generalized expansion table (CSV)");
    std::string t_basis, t_f, t_grid = "0:1:11", t_domain = "0,1", t_out;
    double t_center = 0.0;
    int t_order = 1;
    taylor_cmd->add_option("--basis", t_basis, "basis spec")->required();
    taylor_cmd->add_option("--f", t_f, "function spec")->required();
    taylor_cmd->add_option("--t", t_center, "expansion center");
    taylor_cmd->add_option("--n", t_order, "expansion order");
    taylor_cmd->add_option("--grid", t_grid, "grid lo:hi:count");
    taylor_cmd->add_option("--domain", t_domain, "working interval lo,hi");
    taylor_cmd->add_option("--out", t_out, "output file");

    // gen
    auto* gen_cmd = app.add_subcommand("gen", "emit a seeded suite manifest");
    std::uint64_t g_seed = 1;
    int g_count = 10;
    std::string g_regime = "MAIN", g_domain = "0,1", g_out;
    gen_cmd->add_option("--seed", g_seed, "suite seed");
    gen_cmd->add_option("--count", g_count, "instances per regime");
    gen_cmd->add_option("--regime", g_regime, "MAIN | I..IX | all");
    gen_cmd->add_option("--domain", g_domain, "working interval lo,hi");
    gen_cmd->add_option("--out", g_out, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitInputError;
    }

    try {
        if (kernel_cmd->parsed()) {
            return cmd_kernel(k_basis, k_index, k_grid, k_domain, k_out);
        }
        if (constant_cmd->parsed()) {
            return cmd_constant(c_flags, c_out);
        }
        if (verify_cmd->parsed()) {
            return cmd_verify(v_theorem, v_flags, v_suite, v_flip, v_seed, v_format, v_out);
        }
        if (taylor_cmd->parsed()) {
            return cmd_taylor(t_basis, t_f, t_center, t_order, t_grid, t_domain, t_out);
        }
        if (gen_cmd->parsed()) {
            return cmd_gen(g_seed, g_count, g_regime, g_domain, g_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
