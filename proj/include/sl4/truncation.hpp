#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sl4/oscillation.hpp"

namespace sl4 {

enum class ScheduleRule { Geometric, Linear, Explicit };

struct TruncationSchedule {
    Side side = Side::Right;
    std::vector<double> points;
    ScheduleRule rule = ScheduleRule::Explicit;

    /// Points at distance first * factor^j from a finite endpoint, j = 0..count-1.
    static TruncationSchedule geometric(Side side, double endpoint, double first, double factor, int count);
    static TruncationSchedule linear(Side side, double start, double stop, double step);
    static TruncationSchedule explicit_points(Side side, std::vector<double> pts);

    /// Throws Config unless strictly monotone toward the endpoint and interior.
    void validate(const Interval& iv) const;
};

enum class SideRule { Inherit, Dirichlet, Lim3, Lim4 };

struct SideRecipe {
    SideRule rule = SideRule::Inherit;
    ConditionFunction psi;                   // lim-3 condition function
    bool force_sigma = false;                // lim-3: synthesize W forcing sigma = 1
    Completion completion = Completion::WeylRoute;
    std::vector<ConditionFunction> theta;    // lim-4: two frozen solutions
};

struct EndpointRecipe {
    std::string case_name;
    SideRecipe left;
    SideRecipe right;
};

/// Recipe implied by the declared classes and conditions. With friedrichs_mode
/// every singular side uses Dirichlet truncation.
EndpointRecipe default_recipe(const ProblemSpec& problem, bool friedrichs_mode = false);

/// Value of a condition function at x (closed form, or propagated from its anchor).
QuasiVector evaluate_condition(const ProblemSpec& problem, const ConditionFunction& f, double x,
                               const StepControl& ctrl = {});

/// Regular problem on [a_j, b_j] per the recipe. lambda_context is used by
/// sigma-forcing lim-3 sides. Throws the synthesis errors (DegenerateG, SingularU, ...).
RegularProblem truncate(const ProblemSpec& problem, double a_j, double b_j, const EndpointRecipe& recipe,
                        double lambda_context, const StepControl& ctrl = {});

/// Mirror x -> -x onto (-b, -a). Quasi-derivatives y' and y^[3] change sign.
ProblemSpec reflect_problem(const ProblemSpec& problem);

struct SweepRow {
    int j = 0;
    double a_j = 0.0;
    double b_j = 0.0;
    std::vector<double> lambdas;
    std::vector<std::string> flags;  // per k; empty string when clean
    std::string error;
    int sigma = -1;  // lim-3 rows: recomputed nu_#(W_L - W_R)
    double constraint_residual = 0.0;  // |W_R u - v| / (|W_R||u| + |v|)
};

struct KConvergence {
    bool converged = false;
    double estimate = 0.0;
    double last_increment = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<KConvergence> convergence;
    std::vector<std::string> notes;
    /// double_sweep: every inner evaluation, in order.
    std::vector<SweepRow> inner_rows;
};

struct SweepOptions {
    StepControl ctrl;
    /// Bisection half-width relative to max(1, |lambda|).
    double eig_rel_tol = 1e-11;
    double monotone_slack = 1e-8;
    /// Rows with an eigenvalue below this are reported as index drift instead of solved.
    double lambda_floor = -1e6;
};

SweepResult friedrichs_sweep(const ProblemSpec& problem, int k_max, const std::vector<TruncationSchedule>& schedules,
                             double tol, const SweepOptions& opt = {});

SweepResult lim3_exact_sweep(const ProblemSpec& problem, int n, double lambda_star, double eps,
                             const TruncationSchedule& schedule, double tol, const SweepOptions& opt = {});

SweepResult double_sweep(const ProblemSpec& problem, int n, double lambda_star, const TruncationSchedule& left,
                         const TruncationSchedule& right, const EndpointRecipe& recipe, double tol,
                         const SweepOptions& opt = {});

struct InterlacingReport {
    bool pass = true;
    int first_violation = -1;
    std::string message;
};

InterlacingReport interlacing_check(const std::vector<double>& lambdas, const std::vector<double>& mus,
                                    double slack = 1e-8);

/// Finds beta with mu_k(beta) = lambda_star on a family decreasing in beta.
double spurious_locator(const std::function<RegularProblem(double)>& family, double lambda_star, int k,
                        std::pair<double, double> beta_bracket, double tol, const StepControl& ctrl = {});

struct ProbeRow {
    double b_j = 0.0;
    int min_sigma = -1;  // -1: inconclusive
    std::string note;
};

/// Minimal feasible sigma per truncation point at spectral parameter lambda.
std::vector<ProbeRow> proposition_probe(const ProblemSpec& problem, double lambda, const TruncationSchedule& schedule,
                                        const StepControl& ctrl = {});

/// CSV with header j,a_j,b_j,k,lambda_k,flags.
void write_sweep_csv(const SweepResult& result, const std::string& path);

}  // namespace sl4
