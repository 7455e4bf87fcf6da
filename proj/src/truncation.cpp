#include "sl4/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sl4/error.hpp"

namespace sl4 {

// ---------------------------------------------------------------- schedules

TruncationSchedule TruncationSchedule::geometric(Side side, double endpoint, double first, double factor,
                                                 int count) {
    if (!(first > 0.0) || !(factor > 0.0 && factor < 1.0) || count < 1)
        fail(ErrorKind::Config, "geometric schedule needs first > 0, 0 < factor < 1, count >= 1");
    TruncationSchedule s;
    s.side = side;
    s.rule = ScheduleRule::Geometric;
    double d = first;
    for (int j = 0; j < count; ++j, d *= factor) s.points.push_back(side == Side::Left ? endpoint + d : endpoint - d);
    return s;
}

TruncationSchedule TruncationSchedule::linear(Side side, double start, double stop, double step) {
    if (!(step > 0.0)) fail(ErrorKind::Config, "linear schedule step must be positive");
    TruncationSchedule s;
    s.side = side;
    s.rule = ScheduleRule::Linear;
    const double dir = side == Side::Right ? 1.0 : -1.0;
    if ((stop - start) * dir < 0.0) fail(ErrorKind::Config, "linear schedule runs away from the endpoint");
    const int n = static_cast<int>(std::floor(std::abs(stop - start) / step + 1e-9));
    for (int j = 0; j <= n; ++j) s.points.push_back(start + dir * step * j);
    return s;
}

TruncationSchedule TruncationSchedule::explicit_points(Side side, std::vector<double> pts) {
    TruncationSchedule s;
    s.side = side;
    s.rule = ScheduleRule::Explicit;
    s.points = std::move(pts);
    return s;
}

void TruncationSchedule::validate(const Interval& iv) const {
    if (points.empty()) fail(ErrorKind::Config, "truncation schedule is empty");
    for (std::size_t j = 0; j < points.size(); ++j) {
        if (!iv.contains_interior(points[j]))
            fail(ErrorKind::Config, "schedule point " + std::to_string(points[j]) + " is not interior");
        if (j > 0) {
            const double step = points[j] - points[j - 1];
            if ((side == Side::Right && !(step > 0.0)) || (side == Side::Left && !(step < 0.0)))
                fail(ErrorKind::Config, "schedule is not strictly monotone toward the endpoint");
        }
    }
}

// ------------------------------------------------------------------ recipes

namespace {

EndpointKind resolve_kind(const ProblemSpec& problem, Side side) {
    if (const auto& c = problem.endpoint_class(side)) return c->kind;
    if (problem.interval.finite(side) && check_regular(problem, side)) return EndpointKind::Regular;
    const auto probes = default_probe_schedule(problem, side);
    return classify_endpoint(problem, side, probes).kind;
}

const char* case_label(EndpointKind k) { return k == EndpointKind::Regular ? "regular" : kind_name(k); }

SideRecipe side_recipe(const ProblemSpec& problem, Side side, EndpointKind kind, bool friedrichs) {
    SideRecipe r;
    if (kind == EndpointKind::Regular) {
        r.rule = SideRule::Inherit;
        return r;
    }
    const auto& bc = problem.bc(side);
    const auto* lc = bc ? std::get_if<LagrangeCondition>(&*bc) : nullptr;
    if (friedrichs || kind == EndpointKind::Lim2 || !lc || lc->functions.empty()) {
        r.rule = SideRule::Dirichlet;
        return r;
    }
    if (kind == EndpointKind::Lim3) {
        if (lc->functions.size() != 1) fail(ErrorKind::Config, "a lim-3 end takes exactly one condition function");
        r.rule = SideRule::Lim3;
        r.psi = lc->functions[0];
    } else {
        if (lc->functions.size() != 2) fail(ErrorKind::Config, "a lim-4 end takes exactly two condition functions");
        r.rule = SideRule::Lim4;
        r.theta = lc->functions;
    }
    return r;
}

/// Quasi-vector components as reals; condition data at real lambda must be real.
std::pair<Vec2d, Vec2d> real_parts(const QuasiVector& z) {
    const double scale = std::max(1e-300, z.z.norm());
    if (z.z.imag().norm() > 1e-10 * scale) fail(ErrorKind::Config, "condition function data must be real");
    return {z.u().real(), z.v().real()};
}

Mat2c weyl_of_pair(const ProblemSpec& sub, const RegularPair& bc, Side from, double x, double lambda,
                   const StepControl& ctrl) {
    FundamentalSolution f = init_fundamental(bc, from, lambda, sub.interval.end(from));
    f = propagate(sub, f, x, ctrl);
    return weyl_at(f, x).W;
}

struct TruncationDetail {
    RegularProblem rp;
    std::optional<Lim3Result> synth[2];
    Mat2c reference[2];  // the opposite side's W at the synthesized end
};

/// nu_# after the Jacobi congruence S H S, S = diag(|H_ii|^-1/2). Inertia is
/// unchanged, and the clamped lim-3 synthesis leaves H badly scaled.
int inertia_scaled(const Mat2c& H) {
    Vec2d d;
    for (int i = 0; i < 2; ++i) {
        const double h = std::abs(H(i, i).real());
        d(i) = h > 0.0 ? 1.0 / std::sqrt(h) : 1.0;
    }
    const Mat2c S = d.cast<cplx>().asDiagonal();
    return nu_neg(S * H * S);
}

ProblemSpec sub_problem(const ProblemSpec& problem, double a_j, double b_j) {
    ProblemSpec sub = problem;
    sub.interval = {a_j, b_j};
    sub.left_class = EndpointClass{EndpointKind::Regular, 1.0};
    sub.right_class = EndpointClass{EndpointKind::Regular, 1.0};
    return sub;
}

TruncationDetail truncate_detailed(const ProblemSpec& problem, double a_j, double b_j, const EndpointRecipe& recipe,
                                   double lambda_context, const StepControl& ctrl) {
    const Interval& iv = problem.interval;
    if (!(a_j < b_j)) fail(ErrorKind::PreconditionViolation, "truncation needs a_j < b_j");
    if (!(a_j >= iv.a && b_j <= iv.b)) fail(ErrorKind::PreconditionViolation, "truncation points outside the interval");

    TruncationDetail out;
    out.rp.problem = sub_problem(problem, a_j, b_j);
    const ProblemSpec& sub = out.rp.problem;
    const double ends[2] = {a_j, b_j};
    const SideRecipe* rules[2] = {&recipe.left, &recipe.right};
    RegularPair pairs[2];

    auto simple = [&](int i) {
        const Side side = i == 0 ? Side::Left : Side::Right;
        const SideRecipe& r = *rules[i];
        const double x = ends[i];
        switch (r.rule) {
            case SideRule::Inherit:
                if (x != iv.end(side) || !problem.bc(side))
                    fail(ErrorKind::Config, std::string("inherited conditions need the original ") + side_name(side) +
                                                " endpoint and its conditions");
                pairs[i] = as_pair(*problem.bc(side));
                break;
            case SideRule::Dirichlet:
                pairs[i] = dirichlet_pair();
                break;
            case SideRule::Lim3:
                pairs[i] = lim3_condition_completion(evaluate_condition(problem, r.psi, x, ctrl), r.completion);
                break;
            case SideRule::Lim4:
                if (r.theta.size() != 2) fail(ErrorKind::Config, "lim-4 rule needs two condition functions");
                pairs[i] = lim4_pair_from_solutions(evaluate_condition(problem, r.theta[0], x, ctrl),
                                                    evaluate_condition(problem, r.theta[1], x, ctrl));
                break;
        }
    };
    auto forced = [&](int i, const RegularPair& other) {
        const Side other_side = i == 0 ? Side::Right : Side::Left;
        const double x = ends[i];
        const Mat2c W_other = weyl_of_pair(sub, other, other_side, x, lambda_context, ctrl);
        const auto [u, v] = real_parts(evaluate_condition(problem, rules[i]->psi, x, ctrl));
        out.reference[i] = W_other;
        if (u.norm() <= 1e-14 * std::max(1.0, v.norm())) {
            // u_psi(x) = 0: the psi condition is Dirichlet-like, matching the Friedrichs choice.
            pairs[i] = dirichlet_pair();
        } else {
            Lim3Result res = lim3_wr(u, v, W_other, 1);
            pairs[i] = weyl_to_pair(res.W_R);
            out.synth[i] = res;
        }
    };

    const bool force[2] = {rules[0]->rule == SideRule::Lim3 && rules[0]->force_sigma,
                           rules[1]->rule == SideRule::Lim3 && rules[1]->force_sigma};
    for (int i = 0; i < 2; ++i)
        if (!force[i]) simple(i);
    if (force[0] && force[1]) {
        // Left against Dirichlet at the right point, then right against the final left.
        forced(0, dirichlet_pair());
        forced(1, pairs[0]);
    } else if (force[0]) {
        forced(0, pairs[1]);
    } else if (force[1]) {
        forced(1, pairs[0]);
    }
    out.rp.left_bc = pairs[0];
    out.rp.right_bc = pairs[1];
    out.rp.problem.left_bc = pairs[0];
    out.rp.problem.right_bc = pairs[1];
    return out;
}

bool is_truncated(const SideRecipe& r) { return r.rule != SideRule::Inherit; }

std::string join_flags(const std::vector<std::string>& parts) {
    std::string s;
    for (const auto& p : parts) {
        if (p.empty()) continue;
        if (!s.empty()) s += ';';
        s += p;
    }
    return s;
}

void add_flag(std::string& flags, const std::string& f) { flags = join_flags({flags, f}); }

// Error::what() already carries the kind.
std::string error_text(const std::exception& e) { return e.what(); }

std::pair<double, double> next_bracket(const std::vector<SweepRow>& rows) {
    for (auto it = rows.rbegin(); it != rows.rend(); ++it)
        if (!it->lambdas.empty()) {
            const double lo = it->lambdas.front(), hi = it->lambdas.back();
            const double pad = 0.1 * std::max(1.0, hi - lo) + 1e-3 * std::abs(lo);
            return {lo - pad, hi + pad};
        }
    return {0.0, 1.0};
}

void solve_row(SweepRow& row, const RegularProblem& rp, int n, const std::vector<SweepRow>& prev,
               const SweepOptions& opt) {
    const int below = count_below(rp, opt.lambda_floor, std::nullopt, opt.ctrl).N;
    if (below > 0)
        fail(ErrorKind::InvariantViolation, std::to_string(below) + " eigenvalue(s) below the floor " +
                                                std::to_string(opt.lambda_floor) + ": index drifting to -infinity");
    row.lambdas = eigenvalues_up_to(rp, n, next_bracket(prev), 1e-14, opt.ctrl, opt.eig_rel_tol);
    row.flags.assign(row.lambdas.size(), std::string());
}

void finish_convergence(SweepResult& res, int n, double tol) {
    res.convergence.assign(static_cast<std::size_t>(n + 1), KConvergence{});
    std::vector<const SweepRow*> good;
    for (const auto& r : res.rows)
        if (r.error.empty() && static_cast<int>(r.lambdas.size()) == n + 1) good.push_back(&r);
    for (int k = 0; k <= n; ++k) {
        auto& c = res.convergence[static_cast<std::size_t>(k)];
        if (good.empty()) continue;
        c.estimate = good.back()->lambdas[static_cast<std::size_t>(k)];
        if (good.size() < 2) {
            c.converged = res.rows.size() == 1;
            continue;
        }
        c.last_increment = std::abs(c.estimate - good[good.size() - 2]->lambdas[static_cast<std::size_t>(k)]);
        c.converged = c.last_increment < tol;
    }
}

void flag_monotone(std::vector<SweepRow>& rows, double slack) {
    const SweepRow* prev = nullptr;
    for (auto& r : rows) {
        if (!r.error.empty()) continue;
        if (prev)
            for (std::size_t k = 0; k < r.lambdas.size() && k < prev->lambdas.size(); ++k)
                if (r.lambdas[k] > prev->lambdas[k] + slack) add_flag(r.flags[k], "nonmonotone-accuracy-alarm");
        prev = &r;
    }
}

/// Matrix of the sign change y' -> -y', y^[3] -> -y^[3] under x -> -x.
QuasiVector mirror(const QuasiVector& z) {
    QuasiVector m = z;
    m.z(1) = -m.z(1);
    m.z(2) = -m.z(2);
    return m;
}

ConditionFunction mirror(const ConditionFunction& f) {
    ConditionFunction g = f;
    if (f.has_closed_form()) {
        auto inner = f.closed_form;
        g.closed_form = [inner](double x) { return mirror(inner(-x)); };
    } else {
        g.anchor_x = -f.anchor_x;
        g.anchor_z = mirror(f.anchor_z);
    }
    return g;
}

BoundaryForm mirror(const BoundaryForm& bc) {
    if (const auto* lc = std::get_if<LagrangeCondition>(&bc)) {
        LagrangeCondition m;
        for (const auto& f : lc->functions) m.functions.push_back(mirror(f));
        return m;
    }
    const RegularPair p = as_pair(bc);
    const Mat2c Ru = Vec2c(1.0, -1.0).asDiagonal();
    RegularPair m;
    m.A1 = p.A1 * Ru;
    m.A2 = -p.A2 * Ru;
    return m;
}

TruncationSchedule mirror(const TruncationSchedule& s) {
    TruncationSchedule m = s;
    m.side = s.side == Side::Left ? Side::Right : Side::Left;
    for (double& x : m.points) x = -x;
    return m;
}

void unmirror(SweepResult& res) {
    for (auto& r : res.rows) {
        const double a = r.a_j;
        r.a_j = -r.b_j;
        r.b_j = -a;
    }
}

}  // namespace

EndpointRecipe default_recipe(const ProblemSpec& problem, bool friedrichs_mode) {
    const EndpointKind kl = resolve_kind(problem, Side::Left), kr = resolve_kind(problem, Side::Right);
    EndpointRecipe r;
    r.left = side_recipe(problem, Side::Left, kl, friedrichs_mode);
    r.right = side_recipe(problem, Side::Right, kr, friedrichs_mode);
    r.case_name = friedrichs_mode ? std::string("friedrichs") : std::string(case_label(kl)) + "-" + case_label(kr);
    return r;
}

QuasiVector evaluate_condition(const ProblemSpec& problem, const ConditionFunction& f, double x,
                               const StepControl& ctrl) {
    if (f.has_closed_form()) return f.closed_form(x);
    if (x == f.anchor_x) return f.anchor_z;
    return solve_scalar(problem, f.anchor_lambda, f.anchor_z, f.anchor_x, x, ctrl).end();
}

RegularProblem truncate(const ProblemSpec& problem, double a_j, double b_j, const EndpointRecipe& recipe,
                        double lambda_context, const StepControl& ctrl) {
    return truncate_detailed(problem, a_j, b_j, recipe, lambda_context, ctrl).rp;
}

ProblemSpec reflect_problem(const ProblemSpec& problem) {
    ProblemSpec m = problem;
    m.name = problem.name + " (mirrored)";
    auto flip = [](const Coefficient& c) {
        return Coefficient(std::function<double(double)>([c](double x) { return c(-x); }), c.label() + " mirrored");
    };
    m.coefficients.p = flip(problem.coefficients.p);
    m.coefficients.s = flip(problem.coefficients.s);
    m.coefficients.q = flip(problem.coefficients.q);
    m.coefficients.w = flip(problem.coefficients.w);
    m.interval = {-problem.interval.b, -problem.interval.a};
    m.left_class = problem.right_class;
    m.right_class = problem.left_class;
    m.left_bc.reset();
    m.right_bc.reset();
    if (problem.right_bc) m.left_bc = mirror(*problem.right_bc);
    if (problem.left_bc) m.right_bc = mirror(*problem.left_bc);
    return m;
}

// ------------------------------------------------------------------- sweeps

SweepResult friedrichs_sweep(const ProblemSpec& problem, int k_max, const std::vector<TruncationSchedule>& schedules,
                             double tol, const SweepOptions& opt) {
    if (k_max < 0) fail(ErrorKind::PreconditionViolation, "k_max must be nonnegative");
    const EndpointRecipe recipe = default_recipe(problem, true);
    const bool trunc[2] = {is_truncated(recipe.left), is_truncated(recipe.right)};
    const TruncationSchedule* sched[2] = {nullptr, nullptr};
    for (const auto& s : schedules) sched[s.side == Side::Left ? 0 : 1] = &s;

    SweepResult res;
    std::size_t rows = 1;
    bool any = false;
    for (int i = 0; i < 2; ++i) {
        if (!trunc[i]) continue;
        if (!sched[i]) fail(ErrorKind::Config, std::string("no schedule for the singular ") +
                                                   side_name(i == 0 ? Side::Left : Side::Right) + " end");
        sched[i]->validate(problem.interval);
        rows = any ? std::min(rows, sched[i]->points.size()) : sched[i]->points.size();
        any = true;
    }
    if (!any) res.notes.push_back("no singular end: schedule ignored");

    for (std::size_t j = 0; j < rows; ++j) {
        SweepRow row;
        row.j = static_cast<int>(j);
        row.a_j = trunc[0] ? sched[0]->points[j] : problem.interval.a;
        row.b_j = trunc[1] ? sched[1]->points[j] : problem.interval.b;
        try {
            const RegularProblem rp = truncate(problem, row.a_j, row.b_j, recipe, 0.0, opt.ctrl);
            solve_row(row, rp, k_max, res.rows, opt);
        } catch (const std::exception& e) {
            row.error = error_text(e);
        }
        res.rows.push_back(std::move(row));
    }
    flag_monotone(res.rows, opt.monotone_slack);
    finish_convergence(res, k_max, tol);
    return res;
}

SweepResult lim3_exact_sweep(const ProblemSpec& problem, int n, double lambda_star, double eps,
                             const TruncationSchedule& schedule, double tol, const SweepOptions& opt) {
    if (!(eps > 0.0)) fail(ErrorKind::PreconditionViolation, "eps must be positive");
    EndpointRecipe recipe = default_recipe(problem, false);
    if (recipe.left.rule == SideRule::Lim3 && recipe.right.rule == SideRule::Inherit) {
        SweepResult r = lim3_exact_sweep(reflect_problem(problem), n, lambda_star, eps, mirror(schedule), tol, opt);
        unmirror(r);
        return r;
    }
    if (recipe.right.rule != SideRule::Lim3 || recipe.left.rule != SideRule::Inherit)
        fail(ErrorKind::Config, "lim-3 sweep needs one regular end and one lim-3 end with a condition function");
    if (schedule.side != Side::Right) fail(ErrorKind::Config, "schedule must approach the lim-3 end");
    schedule.validate(problem.interval);
    recipe.right.force_sigma = true;

    SweepResult res;
    constexpr int kShifts = 8;
    for (std::size_t j = 0; j < schedule.points.size(); ++j) {
        SweepRow row;
        row.j = static_cast<int>(j);
        row.a_j = problem.interval.a;
        row.b_j = schedule.points[j];
        std::string row_flag;
        try {
            std::optional<TruncationDetail> det;
            std::string last_error;
            double lam = lambda_star;
            for (int m = 0; m <= kShifts && !det; ++m) {
                lam = lambda_star + eps * m / kShifts;
                try {
                    det = truncate_detailed(problem, row.a_j, row.b_j, recipe, lam, opt.ctrl);
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::DegenerateG && e.kind() != ErrorKind::SingularU) throw;
                    last_error = e.what();
                }
            }
            if (!det)
                fail(ErrorKind::SigmaInfeasible, "no sigma-forcing condition on [lambda*, lambda*+eps] at b_j = " +
                                                     std::to_string(row.b_j) + " (schedule too coarse?): " +
                                                     last_error);
            if (lam != lambda_star) {
                std::ostringstream os;
                os << "lambda-shift=" << std::setprecision(6) << lam - lambda_star;
                add_flag(row_flag, os.str());
            }
            if (const auto& s = det->synth[1]) {
                row.sigma = inertia_scaled(det->reference[1] - s->W_R.cast<cplx>());
                const Vec2d& u = s->synthesis.u_psi;
                const Vec2d& v = s->synthesis.v_psi;
                row.constraint_residual =
                    (s->W_R * u - v).norm() / std::max(1e-300, s->W_R.norm() * u.norm() + v.norm());
                if (s->synthesis.ill_conditioned) add_flag(row_flag, "ill-conditioned");
            } else {
                add_flag(row_flag, "dirichlet-fallback");
            }
            solve_row(row, det->rp, n, res.rows, opt);
            for (auto& f : row.flags) f = row_flag;
        } catch (const std::exception& e) {
            row.error = error_text(e);
        }
        res.rows.push_back(std::move(row));
    }
    finish_convergence(res, n, tol);
    return res;
}

SweepResult double_sweep(const ProblemSpec& problem, int n, double lambda_star, const TruncationSchedule& left,
                         const TruncationSchedule& right, const EndpointRecipe& recipe, double tol,
                         const SweepOptions& opt) {
    const bool tl = is_truncated(recipe.left), tr = is_truncated(recipe.right);
    SweepResult res;
    auto run = [&](SweepRow& row, const std::vector<SweepRow>& prev) {
        try {
            const RegularProblem rp = truncate(problem, row.a_j, row.b_j, recipe, lambda_star, opt.ctrl);
            solve_row(row, rp, n, prev, opt);
        } catch (const std::exception& e) {
            row.error = error_text(e);
        }
    };

    if (!tl && !tr) {
        SweepRow row;
        row.a_j = problem.interval.a;
        row.b_j = problem.interval.b;
        run(row, res.rows);
        res.rows.push_back(std::move(row));
        res.notes.push_back("both ends regular: single solve");
        finish_convergence(res, n, tol);
        return res;
    }
    if (tl != tr) {
        const TruncationSchedule& s = tl ? left : right;
        s.validate(problem.interval);
        for (std::size_t j = 0; j < s.points.size(); ++j) {
            SweepRow row;
            row.j = static_cast<int>(j);
            row.a_j = tl ? s.points[j] : problem.interval.a;
            row.b_j = tl ? problem.interval.b : s.points[j];
            run(row, res.rows);
            res.rows.push_back(std::move(row));
        }
        finish_convergence(res, n, tol);
        return res;
    }

    left.validate(problem.interval);
    right.validate(problem.interval);
    const bool dirichlet_left = recipe.left.rule == SideRule::Dirichlet;
    for (std::size_t j = 0; j < right.points.size(); ++j) {
        const double threshold = std::max(1.0 / static_cast<double>(j + 1), tol);
        std::vector<SweepRow> inner;
        std::size_t i = 0;
        bool selected = false;
        while (true) {
            SweepRow row;
            row.j = static_cast<int>(j);
            row.a_j = left.points[i];
            row.b_j = right.points[j];
            run(row, inner.empty() ? res.rows : inner);
            inner.push_back(row);
            res.inner_rows.push_back(row);
            if (inner.size() >= 2) {
                const SweepRow& p = inner[inner.size() - 2];
                if (row.error.empty() && p.error.empty()) {
                    double inc = 0.0;
                    for (std::size_t k = 0; k < row.lambdas.size(); ++k)
                        inc = std::max(inc, std::abs(row.lambdas[k] - p.lambdas[k]));
                    if (inc < threshold) {
                        selected = true;
                        break;
                    }
                }
            }
            if (i + 1 >= left.points.size()) break;
            i = std::min(2 * i + 1, left.points.size() - 1);
        }
        SweepRow chosen = inner.back();
        if (!selected && chosen.error.empty())
            for (auto& f : chosen.flags) add_flag(f, "inner-schedule-exhausted");
        if (dirichlet_left && chosen.error.empty()) {
            // Nesting: values do not increase as the Dirichlet point moves toward a.
            for (std::size_t m = 1; m < inner.size(); ++m) {
                if (!inner[m].error.empty() || !inner[m - 1].error.empty()) continue;
                for (std::size_t k = 0; k < chosen.lambdas.size(); ++k)
                    if (inner[m].lambdas[k] > inner[m - 1].lambdas[k] + opt.monotone_slack)
                        add_flag(chosen.flags[k], "nesting-violation");
            }
        }
        res.rows.push_back(std::move(chosen));
    }
    finish_convergence(res, n, tol);
    return res;
}

// ------------------------------------------------------------- diagnostics

InterlacingReport interlacing_check(const std::vector<double>& lambdas, const std::vector<double>& mus,
                                    double slack) {
    InterlacingReport rep;
    if (lambdas.size() != mus.size() || lambdas.empty()) {
        rep.pass = false;
        rep.message = "lists must be nonempty and of equal length";
        return rep;
    }
    auto violate = [&](int k, const std::string& what) {
        rep.pass = false;
        rep.first_violation = k;
        rep.message = "k = " + std::to_string(k) + ": " + what;
    };
    for (std::size_t k = 0; k < lambdas.size() && rep.pass; ++k) {
        if (lambdas[k] > mus[k] + slack) violate(static_cast<int>(k), "lambda_k > mu_k");
        else if (k > 0 && mus[k - 1] > lambdas[k] + slack)
            violate(static_cast<int>(k), "mu_{k-1} > lambda_k");
    }
    if (rep.pass) rep.message = "interlacing holds";
    return rep;
}

double spurious_locator(const std::function<RegularProblem(double)>& family, double lambda_star, int k,
                        std::pair<double, double> beta_bracket, double tol, const StepControl& ctrl) {
    auto above = [&](double beta) { return count_below(family(beta), lambda_star, std::nullopt, ctrl).N > k; };
    double lo = beta_bracket.first, hi = beta_bracket.second;
    if (above(lo)) fail(ErrorKind::NotBracketed, "mu_k(beta_lo) is not above lambda*");
    if (!above(hi)) fail(ErrorKind::NotBracketed, "mu_k(beta_hi) is not below lambda*");
    while (std::abs(hi - lo) > 2.0 * tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (above(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<ProbeRow> proposition_probe(const ProblemSpec& problem, double lambda, const TruncationSchedule& schedule,
                                        const StepControl& ctrl) {
    const EndpointRecipe recipe = default_recipe(problem, false);
    if (recipe.left.rule == SideRule::Lim3 && recipe.right.rule == SideRule::Inherit) {
        auto rows = proposition_probe(reflect_problem(problem), lambda, mirror(schedule), ctrl);
        for (auto& r : rows) r.b_j = -r.b_j;
        return rows;
    }
    if (recipe.right.rule != SideRule::Lim3 || recipe.left.rule != SideRule::Inherit)
        fail(ErrorKind::Config, "probe needs one regular end and one lim-3 end with a condition function");
    schedule.validate(problem.interval);
    std::vector<ProbeRow> out;
    for (double b : schedule.points) {
        ProbeRow row;
        row.b_j = b;
        try {
            const ProblemSpec sub = sub_problem(problem, problem.interval.a, b);
            const Mat2c W_L = weyl_of_pair(sub, as_pair(*problem.left_bc), Side::Left, b, lambda, ctrl);
            const auto [u, v] = real_parts(evaluate_condition(problem, recipe.right.psi, b, ctrl));
            if (u.norm() == 0.0) {
                row.note = "u_psi vanishes";
            } else {
                try {
                    lim3_wr(u, v, W_L, 0);
                    row.min_sigma = 0;
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::TargetInfeasible) throw;
                    lim3_wr(u, v, W_L, 1);
                    row.min_sigma = 1;
                }
            }
        } catch (const std::exception& e) {
            row.min_sigma = -1;
            row.note = error_text(e);
        }
        out.push_back(row);
    }
    return out;
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
    std::ofstream os(path);
    if (!os) fail(ErrorKind::Config, "cannot write " + path);
    os << "j,a_j,b_j,k,lambda_k,flags\n" << std::setprecision(15);
    for (const auto& r : result.rows) {
        if (!r.error.empty()) {
            std::string e = r.error;
            std::replace(e.begin(), e.end(), ',', ' ');
            os << r.j << ',' << r.a_j << ',' << r.b_j << ",,," << "error:" << e << '\n';
            continue;
        }
        for (std::size_t k = 0; k < r.lambdas.size(); ++k)
            os << r.j << ',' << r.a_j << ',' << r.b_j << ',' << k << ',' << r.lambdas[k] << ','
               << (k < r.flags.size() ? r.flags[k] : std::string()) << '\n';
    }
}

}  // namespace sl4
