#include "sl4/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sl4/error.hpp"
#include "sl4/greens.hpp"
#include "sl4/oscillation.hpp"
#include "sl4/truncation.hpp"

namespace sl4 {

namespace {

void section(std::ostream& out, const char* name) { out << "\n== " << name << " ==\n"; }

std::string fmt(double v, int prec = 12) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

std::string fmt(cplx v, int prec = 12) {
    std::ostringstream os;
    os << std::setprecision(prec) << v.real() << (v.imag() < 0 ? " - " : " + ") << std::abs(v.imag()) << "i";
    return os.str();
}

std::string describe_bc(const std::optional<BoundaryForm>& bc) {
    if (!bc) return "none";
    if (const auto* p = std::get_if<RegularPair>(&*bc)) {
        return is_dirichlet(*p) ? "dirichlet" : "pair";
    }
    if (std::get_if<WeylForm>(&*bc)) return "weyl";
    const auto& lc = std::get<LagrangeCondition>(*bc);
    return "lagrange (" + std::to_string(lc.functions.size()) + " function" + (lc.functions.size() == 1 ? ")" : "s)");
}

void print_problem(std::ostream& out, const ProblemSpec& p, const RunConfig& cfg) {
    section(out, "PROBLEM");
    out << "name: " << p.name << "\n";
    out << "interval: [" << fmt(p.interval.a) << ", " << fmt(p.interval.b) << "]\n";
    const auto& c = p.coefficients;
    out << "coefficients: p = " << c.p.label() << ", s = " << c.s.label() << ", q = " << c.q.label()
        << ", w = " << c.w.label() << "\n";
    for (Side side : {Side::Left, Side::Right}) {
        const auto& cls = p.endpoint_class(side);
        out << side_name(side) << ": class " << (cls ? kind_name(cls->kind) : "auto") << ", condition "
            << describe_bc(p.bc(side)) << "\n";
    }
    out << "seed: " << cfg.seed << "\n";
}

struct Classified {
    std::array<EndpointKind, 2> kind{};
    bool inconclusive = false;
};

/// Prints the CLASSIFICATION section and pins the resolved classes on the problem.
Classified classify_and_pin(ProblemSpec& p, std::ostream& out) {
    section(out, "CLASSIFICATION");
    Classified res;
    for (Side side : {Side::Left, Side::Right}) {
        const int i = side == Side::Left ? 0 : 1;
        if (const auto& cls = p.endpoint_class(side)) {
            res.kind[i] = cls->kind;
            out << side_name(side) << ": " << kind_name(cls->kind) << " (declared)\n";
            continue;
        }
        if (p.interval.finite(side) && check_regular(p, side)) {
            res.kind[i] = EndpointKind::Regular;
            out << side_name(side) << ": regular (integrable coefficients)\n";
        } else {
            const auto probes = default_probe_schedule(p, side);
            const ClassificationReport rep = classify_endpoint_report(p, side, probes);
            if (rep.inconclusive) {
                res.inconclusive = true;
                out << side_name(side) << ": inconclusive (" << rep.note << ")\n";
                continue;
            }
            res.kind[i] = rep.result.kind;
            out << side_name(side) << ": " << kind_name(rep.result.kind) << " (confidence "
                << fmt(rep.result.confidence, 3) << ")\n";
        }
        (side == Side::Left ? p.left_class : p.right_class) = EndpointClass{res.kind[i], 1.0};
    }
    if (!res.inconclusive && res.kind[0] == EndpointKind::Regular && res.kind[1] == EndpointKind::Regular)
        out << "both: regular\n";
    return res;
}

std::array<std::optional<TruncationSchedule>, 2> schedules_from(const RunConfig& cfg, const ProblemSpec& p) {
    std::array<std::optional<TruncationSchedule>, 2> s;
    for (const auto& spec : cfg.schedules) {
        TruncationSchedule t = parse_schedule(spec, p);
        auto& slot = s[t.side == Side::Left ? 0 : 1];
        if (slot) fail(ErrorKind::Config, std::string("two schedules for the ") + side_name(t.side) + " end");
        slot = std::move(t);
    }
    return s;
}

TruncationSchedule schedule_for(const std::array<std::optional<TruncationSchedule>, 2>& s, const ProblemSpec& p,
                                Side side) {
    const auto& slot = s[side == Side::Left ? 0 : 1];
    return slot ? *slot : default_schedule(p, side);
}

bool truncated(const SideRecipe& r) { return r.rule != SideRule::Inherit; }

std::filesystem::path out_path(const RunConfig& cfg, const std::string& file) {
    std::filesystem::create_directories(cfg.out_dir);
    return std::filesystem::path(cfg.out_dir) / file;
}

void print_schedule(std::ostream& out, const TruncationSchedule& s) {
    out << side_name(s.side) << " schedule:";
    for (double x : s.points) out << ' ' << fmt(x, 10);
    out << "\n";
}

/// A problem's right condition data is real when its samples are.
bool real_condition(const ProblemSpec& p, const BoundaryForm& bc) {
    if (const auto* rp = std::get_if<RegularPair>(&bc))
        return rp->A1.imag().norm() == 0.0 && rp->A2.imag().norm() == 0.0;
    if (std::get_if<WeylForm>(&bc)) return true;
    const auto& lc = std::get<LagrangeCondition>(bc);
    const double mid = 0.5 * (p.interval.a + (std::isfinite(p.interval.b) ? p.interval.b : p.interval.a + 2.0));
    for (const auto& f : lc.functions) {
        const QuasiVector z = f.has_closed_form() ? f.closed_form(mid) : f.anchor_z;
        if (z.z.imag().norm() > 1e-14 * std::max(1.0, z.z.norm())) return false;
    }
    return true;
}

}  // namespace

int exit_code_for(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        switch (err->kind()) {
            case ErrorKind::Config:
            case ErrorKind::Parse: return kExitConfig;
            case ErrorKind::Inconclusive: return kExitInconclusive;
            case ErrorKind::InvariantViolation: return kExitInvariant;
            default: return kExitNumerical;
        }
    }
    return kExitNumerical;
}

// ------------------------------------------------------------------ classify

int cmd_classify(const RunConfig& cfg, std::ostream& out) {
    ProblemSpec p = resolve_problem(cfg);
    print_problem(out, p, cfg);
    const Classified c = classify_and_pin(p, out);
    section(out, "METHOD");
    out << "declared classes are reported as given; finite ends with integrable coefficients are regular;\n"
           "other ends count w-square-integrable solutions of l y = i y over a halving probe schedule\n";
    section(out, "RESULTS");
    out << "left=" << (c.inconclusive && !p.left_class ? "inconclusive" : kind_name(c.kind[0]))
        << " right=" << (c.inconclusive && !p.right_class ? "inconclusive" : kind_name(c.kind[1])) << "\n";
    section(out, "DIAGNOSTICS");
    out << (c.inconclusive ? "classification inconclusive\n" : "ok\n");
    return c.inconclusive ? kExitInconclusive : kExitOk;
}

// ------------------------------------------------------------------ solve

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
    ProblemSpec p = resolve_problem(cfg);
    const KRange kr = parse_k_range(cfg.k_range);
    print_problem(out, p, cfg);
    const Classified c = classify_and_pin(p, out);
    if (c.inconclusive) {
        section(out, "DIAGNOSTICS");
        out << "cannot choose a method without endpoint classes\n";
        return kExitInconclusive;
    }
    const auto sched = schedules_from(cfg, p);
    const EndpointRecipe recipe = default_recipe(p);
    const bool tl = truncated(recipe.left), tr = truncated(recipe.right);
    const bool lim3_exact = cfg.lambda_star && ((recipe.left.rule == SideRule::Lim3 && !tr) ||
                                                (recipe.right.rule == SideRule::Lim3 && !tl));
    const bool lagrange = recipe.left.rule == SideRule::Lim3 || recipe.left.rule == SideRule::Lim4 ||
                          recipe.right.rule == SideRule::Lim3 || recipe.right.rule == SideRule::Lim4;

    section(out, "METHOD");
    const TruncationSchedule left = schedule_for(sched, p, Side::Left);
    const TruncationSchedule right = schedule_for(sched, p, Side::Right);
    SweepResult res;
    const double lambda_star = cfg.lambda_star.value_or(0.0);
    if (!tl && !tr) {
        out << "regular problem: bisection on the oscillation count N(lambda)\n";
        res = double_sweep(p, kr.hi, lambda_star, left, right, recipe, cfg.tol);
    } else if (lim3_exact) {
        const TruncationSchedule& s = tl ? left : right;
        const double eps = 1e-3 * std::max(1.0, std::abs(lambda_star));
        out << "lim-3 exact sweep: sigma-forcing condition at lambda in [" << fmt(lambda_star) << ", "
            << fmt(lambda_star + eps) << "]\n";
        print_schedule(out, s);
        res = lim3_exact_sweep(p, kr.hi, lambda_star, eps, s, cfg.tol);
    } else if (lagrange) {
        out << "truncation with endpoint conditions (" << recipe.case_name << ")";
        if (recipe.left.rule == SideRule::Lim3 || recipe.right.rule == SideRule::Lim3)
            out << "; lim-3 condition completed without sigma forcing (give --lambda-star for the exact sweep)";
        out << "\n";
        if (tl) print_schedule(out, left);
        if (tr) print_schedule(out, right);
        res = double_sweep(p, kr.hi, lambda_star, left, right, recipe, cfg.tol);
    } else {
        out << "Friedrichs truncation: Dirichlet conditions at every singular end (" << recipe.case_name << ")\n";
        std::vector<TruncationSchedule> ss;
        if (tl) ss.push_back(left);
        if (tr) ss.push_back(right);
        for (const auto& s : ss) print_schedule(out, s);
        res = friedrichs_sweep(p, kr.hi, ss, cfg.tol);
    }
    out << "k range: " << kr.lo << ".." << kr.hi << ", convergence tol " << fmt(cfg.tol) << "\n";

    const auto csv = out_path(cfg, "solve.csv");
    write_sweep_csv(res, csv.string());

    section(out, "RESULTS");
    out << "j  a_j  b_j";
    for (int k = kr.lo; k <= kr.hi; ++k) out << "  lambda_" << k;
    out << "\n";
    int errors = 0;
    std::vector<std::string> flags;
    for (const auto& r : res.rows) {
        out << r.j << "  " << fmt(r.a_j, 10) << "  " << fmt(r.b_j, 10);
        if (!r.error.empty()) {
            ++errors;
            out << "  error: " << r.error << "\n";
            continue;
        }
        for (int k = kr.lo; k <= kr.hi; ++k) {
            out << "  " << fmt(r.lambdas[static_cast<std::size_t>(k)]);
            const std::string& f = r.flags[static_cast<std::size_t>(k)];
            if (!f.empty()) flags.push_back("j=" + std::to_string(r.j) + " k=" + std::to_string(k) + ": " + f);
        }
        out << "\n";
    }
    out << "convergence:\n";
    for (int k = kr.lo; k <= kr.hi && k < static_cast<int>(res.convergence.size()); ++k) {
        const auto& cv = res.convergence[static_cast<std::size_t>(k)];
        out << "  k=" << k << " estimate " << fmt(cv.estimate) << " last increment " << fmt(cv.last_increment, 3)
            << (cv.converged ? " converged" : " not converged") << "\n";
    }
    out << "csv: " << csv.string() << "\n";

    section(out, "DIAGNOSTICS");
    for (const auto& n : res.notes) out << "note: " << n << "\n";
    for (const auto& f : flags) out << "flag: " << f << "\n";
    for (const auto& r : res.rows)
        if (r.sigma >= 0)
            out << "j=" << r.j << " sigma " << r.sigma << " constraint residual " << fmt(r.constraint_residual, 3)
                << "\n";
    out << errors << " of " << res.rows.size() << " rows failed\n";
    return (res.rows.empty() || errors == static_cast<int>(res.rows.size())) ? kExitNumerical : kExitOk;
}

// ------------------------------------------------------------------ interlace

int cmd_interlace(const RunConfig& cfg, std::ostream& out) {
    ProblemSpec p = resolve_problem(cfg);
    const KRange kr = parse_k_range(cfg.k_range);
    print_problem(out, p, cfg);
    const Classified c = classify_and_pin(p, out);
    if (c.inconclusive) return kExitInconclusive;
    EndpointRecipe with_psi = default_recipe(p);
    const bool left3 = with_psi.left.rule == SideRule::Lim3 && !truncated(with_psi.right);
    const bool right3 = with_psi.right.rule == SideRule::Lim3 && !truncated(with_psi.left);
    if (!left3 && !right3)
        fail(ErrorKind::Config, "interlace needs one regular end and one lim-3 end with a condition function psi");
    const Side side = left3 ? Side::Left : Side::Right;
    (left3 ? with_psi.left : with_psi.right).completion = Completion::DirichletCompatible;
    const EndpointRecipe dirichlet = default_recipe(p, true);
    const TruncationSchedule s = schedule_for(schedules_from(cfg, p), p, side);

    section(out, "METHOD");
    out << "at each truncation point: [y, psi] = 0 completed by a condition on u only, against y = y' = 0;\n"
           "checks lambda_0 <= mu_0 and mu_{k-1} <= lambda_k <= mu_k\n";
    print_schedule(out, s);

    section(out, "RESULTS");
    const auto csv = out_path(cfg, "interlace.csv");
    std::ofstream os(csv);
    if (!os) fail(ErrorKind::Config, "cannot write " + csv.string());
    os << "j,a_j,b_j,k,lambda_k,mu_k,pass\n" << std::setprecision(15);
    SweepOptions opt;
    int failures = 0;
    for (std::size_t j = 0; j < s.points.size(); ++j) {
        const double a_j = side == Side::Left ? s.points[j] : p.interval.a;
        const double b_j = side == Side::Right ? s.points[j] : p.interval.b;
        const RegularProblem rp_psi = truncate(p, a_j, b_j, with_psi, 0.0, opt.ctrl);
        const RegularProblem rp_dir = truncate(p, a_j, b_j, dirichlet, 0.0, opt.ctrl);
        const auto lam = eigenvalues_up_to(rp_psi, kr.hi, {-1.0, 1.0}, 1e-14, opt.ctrl, opt.eig_rel_tol);
        const auto mu = eigenvalues_up_to(rp_dir, kr.hi, {-1.0, 1.0}, 1e-14, opt.ctrl, opt.eig_rel_tol);
        const InterlacingReport rep = interlacing_check(lam, mu);
        if (!rep.pass) ++failures;
        out << "j=" << j << " [" << fmt(a_j, 10) << ", " << fmt(b_j, 10) << "]: " << (rep.pass ? "pass" : "FAIL")
            << " (" << rep.message << ")\n";
        for (int k = 0; k <= kr.hi; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            if (k >= kr.lo) out << "  k=" << k << " lambda " << fmt(lam[kk]) << " mu " << fmt(mu[kk]) << "\n";
            const bool ok = rep.pass || k < rep.first_violation;
            os << j << ',' << a_j << ',' << b_j << ',' << k << ',' << lam[kk] << ',' << mu[kk] << ','
               << (ok ? 1 : 0) << '\n';
        }
    }
    out << "csv: " << csv.string() << "\n";

    section(out, "DIAGNOSTICS");
    out << failures << " of " << s.points.size() << " truncation points violate interlacing\n";
    if (failures) out << "interlacing violation indicates a solver defect\n";
    return failures ? kExitInvariant : kExitOk;
}

// ------------------------------------------------------------------ greens

int cmd_greens(const RunConfig& cfg, std::ostream& out) {
    ProblemSpec p = resolve_problem(cfg);
    print_problem(out, p, cfg);
    const Classified c = classify_and_pin(p, out);
    if (c.inconclusive) return kExitInconclusive;
    if (c.kind[0] != EndpointKind::Regular) fail(ErrorKind::Config, "greens needs a regular left end");
    if (c.kind[1] != EndpointKind::Regular && c.kind[1] != EndpointKind::Lim4)
        fail(ErrorKind::Config, "greens needs a regular or lim-4 right end");
    if (!p.right_bc) fail(ErrorKind::Config, "greens needs right end conditions");
    const bool lim4 = c.kind[1] == EndpointKind::Lim4;
    const double a = p.interval.a, b = p.interval.b, L = b - a;
    const cplx lambda(cfg.lambda_star.value_or(0.0), 1.0);
    const bool real_bc = real_condition(p, *p.right_bc);

    section(out, "METHOD");
    out << "lambda = " << fmt(lambda) << "; " << (real_bc ? "real" : "complex")
        << " right condition; kernel from left and right solution pairs with dual normalization\n";
    GreensOptions gopt;
    const SolutionBasis basis = build_basis(p, lambda, *p.right_bc, real_bc, gopt);
    out << "reference end " << fmt(basis.b_ref, 15) << "\n";

    std::vector<double> breaks;
    for (int k = 1; k <= 9; ++k) breaks.push_back(a + 0.1 * k * L);
    std::optional<TruncationSchedule> sched;
    if (lim4) {
        for (int k = 2; k <= 16; ++k) breaks.push_back(b - L * std::pow(10.0, -0.5 * k));
        const auto ss = schedules_from(cfg, p);
        sched = ss[1] ? *ss[1] : default_schedule(p, Side::Right);
        for (double x : sched->points) breaks.push_back(x);
        print_schedule(out, *sched);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    std::erase_if(breaks, [&](double x) { return !(x > a && x < basis.b_ref); });
    const KernelGrid grid = make_kernel_grid(p, a, basis.b_ref, breaks);
    out << "quadrature: " << grid.breaks.size() - 1 << " Gauss-Legendre panels of order " << grid.order << ", "
        << grid.nodes.size() << " nodes\n";

    // Identities at every node; near a lim-4 end the evaluation precision of x limits them.
    const double check_limit = lim4 ? b - 1e-7 * L : basis.b_ref;
    double dual = 0.0, inv = 0.0, blk_l = 0.0, blk_r = 0.0;
    for (double x : grid.nodes) {
        if (x > check_limit) continue;
        dual = std::max(dual, dual_defect(basis, x));
        inv = std::max(inv, inverse_identity_defect(basis, x));
        const BlockDefects bd = block_defects(basis, x);
        blk_l = std::max(blk_l, bd.left);
        blk_r = std::max(blk_r, bd.right);
    }
    double asym = 0.0;
    if (real_bc)
        for (std::size_t i = 0; i < grid.nodes.size(); i += 7)
            for (std::size_t k = i; k < grid.nodes.size(); k += 5)
                asym = std::max(asym, std::abs(greens_value(basis, grid.nodes[i], grid.nodes[k]) -
                                               greens_value(basis, grid.nodes[k], grid.nodes[i])));
    const double lo = a + 0.2 * L, hi = a + 0.7 * L;
    auto bump = [lo, hi](double x) {
        const double s = (2.0 * x - lo - hi) / (hi - lo);
        return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0;
    };
    const ResolventCheck rc = resolvent_residual(p, basis, grid, bump, lo, hi);
    const auto ev = kernel_eigenvalues(basis, grid, 3);

    std::vector<DistanceRow> rows;
    if (lim4) {
        const auto& lc = std::get<LagrangeCondition>(*p.right_bc);
        for (std::size_t j = 0; j < sched->points.size(); ++j) {
            const double bj = sched->points[j];
            const TruncatedCoefficients co = truncated_coefficients(p, basis, lc, bj, gopt.ctrl);
            rows.push_back({static_cast<int>(j), bj, hs_distance(basis, co, grid, a, bj), co.max_abs()});
        }
    }
    const auto kernel_csv = out_path(cfg, "greens_kernel.csv");
    write_kernel_csv(basis, grid, kernel_csv.string());
    const auto dist_csv = out_path(cfg, "greens_distance.csv");
    write_distance_csv(rows, dist_csv.string());

    section(out, "RESULTS");
    out << "alpha = " << fmt(basis.alpha) << "\n";
    out << "kernel eigenvalues (approximate eigenvalue lambda + 1/ev):\n";
    for (const auto& e : ev) out << "  " << fmt(e) << "  ->  " << fmt((lambda + 1.0 / e).real(), 10) << "\n";
    if (lim4) {
        out << "j  b_j  hs_distance  max_coefficient\n";
        for (const auto& r : rows)
            out << r.j << "  " << fmt(r.b_j, 10) << "  " << fmt(r.hs_distance, 6) << "  " << fmt(r.max_coefficient, 6)
                << "\n";
        if (rows.size() >= 2)
            out << "hs ratio final/initial: " << fmt(rows.back().hs_distance / rows.front().hs_distance, 6) << "\n";
    } else {
        out << "regular right end: no truncation series\n";
    }
    out << "csv: " << kernel_csv.string() << ", " << dist_csv.string() << "\n";

    section(out, "DIAGNOSTICS");
    const bool dual_ok = dual <= 1e-9, inv_ok = inv <= 1e-8;
    out << "dual-basis defect " << fmt(dual, 3) << (dual_ok ? " ok" : " FAIL") << "\n";
    out << "inverse identity defect " << fmt(inv, 3) << (inv_ok ? " ok" : " FAIL") << "\n";
    out << "block defects left " << fmt(blk_l, 3) << " right " << fmt(blk_r, 3) << "\n";
    if (real_bc) out << "symmetry defect " << fmt(asym, 3) << "\n";
    out << "resolvent residual " << fmt(rc.relative_error, 3) << " over " << rc.panels << " panels\n";
    if (!real_bc) out << "complex conditions: truncated coefficients follow the linear-system route\n";
    return dual_ok && inv_ok ? kExitOk : kExitInvariant;
}

// ------------------------------------------------------------------ spurious

int cmd_spurious(const RunConfig& cfg, std::ostream& out) {
    ProblemSpec p = resolve_problem(cfg);
    const KRange kr = parse_k_range(cfg.k_range);
    if (!cfg.lambda_star) fail(ErrorKind::Config, "spurious needs --lambda-star");
    const double lambda_star = *cfg.lambda_star;
    const int k = kr.lo;
    print_problem(out, p, cfg);
    const Classified c = classify_and_pin(p, out);
    if (c.inconclusive) return kExitInconclusive;
    if (c.kind[0] != EndpointKind::Regular) fail(ErrorKind::Config, "spurious needs a regular left end");
    const bool right_regular = c.kind[1] == EndpointKind::Regular;
    const double a = p.interval.a, b = p.interval.b;
    const StepControl ctrl;

    const EndpointRecipe friedrichs = default_recipe(p, true);
    auto family = [&](double beta) {
        if (!right_regular) return truncate(p, a, beta, friedrichs, 0.0, ctrl);
        ProblemSpec sub = p;
        sub.interval.b = beta;
        return make_regular(sub);
    };
    // mu_k(beta) < lambda*
    auto below = [&](double beta) { return count_below(family(beta), lambda_star, std::nullopt, ctrl).N > k; };

    section(out, "METHOD");
    out << "family on (a, beta) with " << (right_regular ? "the right condition carried to beta" : "y = y' = 0 at beta")
        << "; bisection on beta for mu_" << k << "(beta) = lambda* = " << fmt(lambda_star) << "\n";

    const double span = std::isfinite(b) ? b - a : 1.0;
    double beta_lo = a + 0.5 * span;
    for (int m = 0; m < 60 && below(beta_lo); ++m) beta_lo = a + 0.5 * (beta_lo - a);
    double beta_hi = right_regular ? b : (std::isfinite(b) ? a + 0.5 * span : a + span);
    for (int m = 0; m < 60 && !below(beta_hi); ++m) {
        if (right_regular || !std::isfinite(b)) beta_hi = a + 1.5 * (beta_hi - a);
        else beta_hi = b - 0.5 * (b - beta_hi);
    }
    out << "bracket: [" << fmt(beta_lo) << ", " << fmt(beta_hi) << "]\n";
    const double beta = spurious_locator(family, lambda_star, k, {beta_lo, beta_hi}, 1e-13 * (beta_hi - a), ctrl);
    const double mu = kth_eigenvalue(family(beta), k, {lambda_star - 1.0, lambda_star + 1.0}, 1e-14, ctrl, 1e-13);

    section(out, "RESULTS");
    out << "beta* = " << fmt(beta, 15) << "\n";
    out << "mu_" << k << "(beta*) = " << fmt(mu, 15) << "\n";
    out << "mu_" << k << "(beta*) - lambda* = " << fmt(mu - lambda_star, 3) << "\n";
    out << "lambda* is an eigenvalue of the truncated problem on (" << fmt(a) << ", " << fmt(beta) << ")\n";

    section(out, "DIAGNOSTICS");
    const double rel = std::abs(mu - lambda_star) / std::max(1.0, std::abs(lambda_star));
    out << "relative mismatch " << fmt(rel, 3) << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------ dispatch

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.subcommand == "classify") return cmd_classify(cfg, out);
        if (cfg.subcommand == "solve") return cmd_solve(cfg, out);
        if (cfg.subcommand == "interlace") return cmd_interlace(cfg, out);
        if (cfg.subcommand == "greens") return cmd_greens(cfg, out);
        if (cfg.subcommand == "spurious") return cmd_spurious(cfg, out);
        fail(ErrorKind::Config, "unknown subcommand '" + cfg.subcommand + "'");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

}  // namespace sl4
