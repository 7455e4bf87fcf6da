#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "sl4/boundary.hpp"
#include "sl4/problem.hpp"
#include "sl4/propagator.hpp"

namespace sl4 {

struct GreensOptions {
    StepControl ctrl{.rel_tol = 1e-12, .abs_tol = 1e-14};
    /// A lim-4 right end is replaced by b - reference_gap for the reference solutions.
    double reference_gap = 1e-8;
    /// |[psi_1, conj psi_2]| below this (after dual normalization) counts as real.
    double real_tol = 1e-8;
    /// Largest acceptable condition number of the duality matrix.
    double max_duality_condition = 1e12;
};

/// Solutions at a nonreal lambda that build the Green's function.
///
/// phi_1, phi_2 satisfy the left condition, psi_1, psi_2 the right one. Each is a
/// fixed combination of two raw scalar trajectories, so evaluation anywhere in
/// [a, b_ref] is a dense-output lookup.
struct SolutionBasis {
    cplx lambda = 0.0;
    double a = 0.0;
    double b_ref = 0.0;
    std::array<ScalarTrajectory, 2> phi_raw, psi_raw;
    Mat2c phi_mix = Mat2c::Identity();
    Mat2c psi_mix = Mat2c::Identity();
    /// Caller's declaration; checked against alpha during construction.
    bool real_bc = true;
    /// U_R^T V_L - V_R^T U_L = I holds (checked at the normalization point).
    bool dual_normalized = false;
    /// [psi_1, conj psi_2]: 0 for real conditions, 1 after normalization otherwise.
    cplx alpha = 0.0;
    double normalization_point = 0.0;

    /// Columns are the quasi-vectors of phi_1, phi_2 at x.
    Mat42c phi(double x) const;
    Mat42c psi(double x) const;
};

/// Left end must be regular with a regular pair. right_bc is a RegularPair or
/// WeylForm (regular right end at b) or a two-function LagrangeCondition (lim-4 end,
/// evaluated at b - reference_gap). Throws PreconditionViolation (real lambda, wrong
/// endpoint data, or real/complex declaration contradicted) and EigenvalueCollision.
SolutionBasis build_basis(const ProblemSpec& problem, cplx lambda, const BoundaryForm& right_bc, bool real_bc,
                          const GreensOptions& opt = {});

/// ||U_R^T V_L - V_R^T U_L - I|| at x.
double dual_defect(const SolutionBasis& basis, double x);

struct BlockDefects {
    /// ||U_L^T V_L - V_L^T U_L||
    double left = 0.0;
    /// ||U_R^T V_R - V_R^T U_R - alpha K||, K = [[0,1],[-1,0]]
    double right = 0.0;
};
BlockDefects block_defects(const SolutionBasis& basis, double x);

/// The closed-form inverse [[-V_R^T - alpha K V_L^T, U_R^T + alpha K U_L^T], [V_L^T, -U_L^T]].
Mat4c closed_form_inverse(const SolutionBasis& basis, double x);

/// ||closed_form_inverse(x) * Phi(x) - I_4||.
double inverse_identity_defect(const SolutionBasis& basis, double x);

/// G(x, t); the diagonal takes the common one-sided value.
cplx greens_value(const SolutionBasis& basis, double x, double t);

/// Quasi-derivatives in x of G(x, t), in state order (y, y', y^[3], y^[2]).
Vec4c greens_quasi(const SolutionBasis& basis, double x, double t);

/// psi_1^(j) = psi_1 + c1 phi_1 + c2 phi_2, psi_2^(j) = psi_2 + d1 phi_1 + d2 phi_2.
struct TruncatedCoefficients {
    double b_j = 0.0;
    cplx c1 = 0.0, c2 = 0.0, d1 = 0.0, d2 = 0.0;
    /// Determinant of the bracket system.
    cplx delta = 0.0;
    /// [psi_1^(j), conj psi_2^(j)] = alpha + d1 - c2.
    cplx alpha_j = 0.0;
    /// max |[psi_i^(j), theta_k](b_j)|
    double residual = 0.0;

    double max_abs() const;
};

/// Cramer solution of the two bracket systems with theta values given at b_j.
/// Throws SingularBracketSystem when |Delta| is below singular_tol relative to its entries.
TruncatedCoefficients truncated_coefficients(const SolutionBasis& basis, const QuasiVector& theta1,
                                             const QuasiVector& theta2, double b_j, double singular_tol = 1e-12);

/// Same, with the condition functions evaluated at b_j.
TruncatedCoefficients truncated_coefficients(const ProblemSpec& problem, const SolutionBasis& basis,
                                             const LagrangeCondition& cond, double b_j, const StepControl& ctrl = {});

/// Green's function of the problem truncated at b_j, zero outside the square (a, b_j)^2.
cplx truncated_greens_value(const SolutionBasis& basis, const TruncatedCoefficients& co, double x, double t);

/// Tensor Gauss-Legendre panels on (a, b) with w folded into the weights.
struct KernelGrid {
    std::vector<double> breaks;
    std::vector<double> nodes;
    std::vector<double> weights;
    int order = 8;
};

/// Panels between consecutive break points (a and b added), each split into
/// `subdivide` equal pieces. Nodes are interior, weights positive.
KernelGrid make_kernel_grid(const ProblemSpec& problem, double a, double b, std::vector<double> breaks,
                            int subdivide = 1, int order = 8);

/// Same break points with every panel halved.
KernelGrid refine_grid(const ProblemSpec& problem, const KernelGrid& grid);

/// Kernel values G(x_i, t_k) at the grid nodes, row-major.
std::vector<cplx> sample_kernel(const SolutionBasis& basis, const KernelGrid& grid);

/// HS distance between G and the truncated kernel on (a_j, b_j)^2. The left
/// truncation at a_j is taken with phi's own conditions, so it adds no correction.
double hs_distance(const SolutionBasis& basis, const TruncatedCoefficients& co, const KernelGrid& grid,
                   double a_j, double b_j);

/// HS norm of G restricted to the complement of (a_j, b_j)^2.
double tail_hs_distance(const SolutionBasis& basis, const KernelGrid& grid, double a_j, double b_j);

/// Discretized kernel eigenvalues: approximations of 1/(lambda_n - lambda), largest modulus first.
std::vector<cplx> kernel_eigenvalues(const SolutionBasis& basis, const KernelGrid& grid, int count);

struct ResolventCheck {
    double relative_error = 0.0;
    int panels = 0;
};

/// Applies y = int G f w and checks (l - lambda) y = f in integrated form:
/// y^[3](e) - y^[3](s) = int_s^e ((q - lambda w) y - f w) over panels of the grid.
/// f must vanish outside [support_lo, support_hi].
ResolventCheck resolvent_residual(const ProblemSpec& problem, const SolutionBasis& basis, const KernelGrid& grid,
                                  const std::function<double(double)>& f, double support_lo, double support_hi);

struct DistanceRow {
    int j = 0;
    double b_j = 0.0;
    double hs_distance = 0.0;
    double max_coefficient = 0.0;
};

void write_kernel_csv(const SolutionBasis& basis, const KernelGrid& grid, const std::string& path);
void write_distance_csv(const std::vector<DistanceRow>& rows, const std::string& path);

}  // namespace sl4
