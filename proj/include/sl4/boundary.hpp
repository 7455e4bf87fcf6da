#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sl4/hamiltonian.hpp"
#include "sl4/types.hpp"

namespace sl4 {

/// Separated condition A1 u + A2 v = 0 at one endpoint.
struct RegularPair {
    Mat2c A1 = Mat2c::Identity();
    Mat2c A2 = Mat2c::Zero();
};

/// Condition v = W u with W real symmetric.
struct WeylForm {
    Mat2d W = Mat2d::Zero();
};

/// Maximal-domain data that moves with a truncation point.
///
/// Either a closed form x -> z(x), or a solution of the equation at a real
/// spectral parameter, fixed by its value at an anchor point.
struct ConditionFunction {
    std::function<QuasiVector(double)> closed_form;
    double anchor_x = 0.0;
    QuasiVector anchor_z;
    double anchor_lambda = 0.0;
    std::string label;

    bool has_closed_form() const { return static_cast<bool>(closed_form); }

    static ConditionFunction closed(std::function<QuasiVector(double)> f, std::string label = {}) {
        ConditionFunction c;
        c.closed_form = std::move(f);
        c.label = std::move(label);
        return c;
    }
    static ConditionFunction anchored(double x0, const QuasiVector& z0, double lambda, std::string label = {}) {
        ConditionFunction c;
        c.anchor_x = x0;
        c.anchor_z = z0;
        c.anchor_lambda = lambda;
        c.label = std::move(label);
        return c;
    }
};

/// Conditions [y, psi_i] = 0, one function for lim-3, two for lim-4.
struct LagrangeCondition {
    std::vector<ConditionFunction> functions;
};

using BoundaryForm = std::variant<RegularPair, WeylForm, LagrangeCondition>;

/// Number of scalar conditions the form imposes.
int condition_count(const BoundaryForm& bc);

RegularPair dirichlet_pair();
/// y = 0 and p y'' = 0.
RegularPair hinged_pair();
/// y^[3] = 0 and y^[2] = 0.
RegularPair natural_pair();

/// Throws RankDeficient or NotSelfAdjoint.
RegularPair validate_pair(const Mat2c& A1, const Mat2c& A2, double tol = 1e-12);

/// A1 = -W, A2 = I.
RegularPair weyl_to_pair(const Mat2d& W);

/// Regular pair equivalent of a RegularPair or WeylForm. Lagrange conditions
/// need a point and are handled by the truncation layer.
RegularPair as_pair(const BoundaryForm& bc);

enum class FreeParam { Kappa, Nu };

struct Lim3Synthesis {
    Vec2d u_psi = Vec2d::Zero();
    Vec2d v_psi = Vec2d::Zero();
    Mat2c W_L = Mat2c::Zero();
    FreeParam free_param = FreeParam::Kappa;
    double value = 0.0;
    double C_or_D = 0.0;
    double g = 0.0;
    bool ill_conditioned = false;
};

struct Lim3Result {
    Mat2d W_R;
    Lim3Synthesis synthesis;
};

/// Symmetric W with W u = v, parametrized by the free entry (kappa = W11 or nu = W22).
Mat2d weyl_from_free(const Vec2d& u, const Vec2d& v, FreeParam which, double value);

/// Choice of free parameter by the larger component of u.
FreeParam preferred_free_param(const Vec2d& u);

/// Synthesizes real symmetric W_R with v = W_R u and nu_#(W_L - W_R) = target_sigma.
/// Throws DegenerateG, TargetInfeasible.
Lim3Result lim3_wr(const Vec2d& u_psi, const Vec2d& v_psi, const Mat2c& W_L, int target_sigma,
                   double tol = 1e-12);

/// Rows encode [y, theta_i] = 0. Throws BracketNotVanishing, DependentConditions.
RegularPair lim4_pair_from_solutions(const QuasiVector& theta1, const QuasiVector& theta2, double tol = 1e-9);

enum class Completion {
    /// W route with the free parameter 0 when u_psi != 0.
    WeylRoute,
    /// Second condition involves u only, so the pair shares one condition with Dirichlet.
    DirichletCompatible,
};

/// Self-adjoint pair whose first condition is [y, psi] = 0 and which psi satisfies.
RegularPair lim3_condition_completion(const QuasiVector& psi, Completion mode = Completion::WeylRoute);

/// [y, theta] = 0 for each row of the pair, as quasi-vectors theta.
std::pair<QuasiVector, QuasiVector> pair_condition_vectors(const RegularPair& pair);

}  // namespace sl4
