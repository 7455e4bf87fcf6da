#pragma once

#include <optional>
#include <utility>

#include "sl4/propagator.hpp"

namespace sl4 {

/// Number of negative eigenvalues of a Hermitian 2x2 matrix. `tol` is relative
/// to the Frobenius norm. Throws NotHermitian.
int nu_neg(const Mat2c& H, double tol = 1e-9);

/// Finite interval with a regular self-adjoint pair at each end.
struct RegularProblem {
    ProblemSpec problem;
    RegularPair left_bc;
    RegularPair right_bc;

    double a() const { return problem.interval.a; }
    double b() const { return problem.interval.b; }
};

/// Builds a RegularProblem from a ProblemSpec whose ends are finite with regular pairs
/// (or W forms). Throws Config otherwise.
RegularProblem make_regular(const ProblemSpec& problem);

struct SpectralCount {
    double lambda = 0.0;
    double c = 0.0;
    int delta_L = 0;
    int delta_R = 0;
    int sigma = 0;
    int N = 0;
};

bool is_dirichlet(const RegularPair& bc, double tol = 1e-14);

/// Number of eigenvalues strictly below lambda. c defaults to the midpoint.
SpectralCount count_below(const RegularProblem& rp, double lambda, std::optional<double> c = std::nullopt,
                          const StepControl& ctrl = {});

/// The (k+1)-th eigenvalue localized by bisection on N to an interval of width
/// 2 max(tol, rel_tol |lambda|). The bracket is expanded geometrically if it does
/// not straddle index k.
double kth_eigenvalue(const RegularProblem& rp, int k, std::pair<double, double> bracket, double tol,
                      const StepControl& ctrl = {}, double rel_tol = 0.0);

/// Eigenvalues 0..k_max sharing the bisection work.
std::vector<double> eigenvalues_up_to(const RegularProblem& rp, int k_max, std::pair<double, double> bracket,
                                      double tol, const StepControl& ctrl = {}, double rel_tol = 0.0);

}  // namespace sl4
