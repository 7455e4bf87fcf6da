#include "sl4/boundary.hpp"

#include <algorithm>
#include <cmath>

#include "sl4/error.hpp"

namespace sl4 {

int condition_count(const BoundaryForm& bc) {
    if (const auto* lc = std::get_if<LagrangeCondition>(&bc)) return static_cast<int>(lc->functions.size());
    return 2;
}

RegularPair dirichlet_pair() { return {Mat2c::Identity(), Mat2c::Zero()}; }

RegularPair hinged_pair() {
    RegularPair p{Mat2c::Zero(), Mat2c::Zero()};
    p.A1(0, 0) = 1.0;
    p.A2(1, 1) = 1.0;
    return p;
}

RegularPair natural_pair() { return {Mat2c::Zero(), Mat2c::Identity()}; }

RegularPair validate_pair(const Mat2c& A1, const Mat2c& A2, double tol) {
    Eigen::Matrix<cplx, 2, 4> block;
    block << A1, A2;
    Eigen::JacobiSVD<Eigen::Matrix<cplx, 2, 4>> svd(block);
    const auto& sv = svd.singularValues();
    if (!(sv(0) > 0.0) || sv(1) <= 1e-12 * sv(0)) fail(ErrorKind::RankDeficient, "boundary block (A1 A2) has rank < 2");
    Mat2c h = A1 * A2.adjoint();
    double defect = (h - h.adjoint()).norm();
    double scale = std::max(1.0, A1.norm() * A2.norm());
    if (defect > tol * scale)
        fail(ErrorKind::NotSelfAdjoint, "A1 A2* is not Hermitian (defect " + std::to_string(defect) + ")");
    return {A1, A2};
}

RegularPair weyl_to_pair(const Mat2d& W) {
    Mat2d sym = 0.5 * (W + W.transpose());
    return validate_pair(-sym.cast<cplx>(), Mat2c::Identity());
}

RegularPair as_pair(const BoundaryForm& bc) {
    if (const auto* rp = std::get_if<RegularPair>(&bc)) return validate_pair(rp->A1, rp->A2);
    if (const auto* wf = std::get_if<WeylForm>(&bc)) return weyl_to_pair(wf->W);
    fail(ErrorKind::InvalidBoundaryForm, "Lagrange condition needs an evaluation point to become a regular pair");
}

FreeParam preferred_free_param(const Vec2d& u) {
    return std::abs(u(1)) >= std::abs(u(0)) ? FreeParam::Kappa : FreeParam::Nu;
}

Mat2d weyl_from_free(const Vec2d& u, const Vec2d& v, FreeParam which, double value) {
    const double p0 = u(0), p1 = u(1), p3 = v(0), p2 = v(1);
    double kappa, mu, nu;
    if (which == FreeParam::Kappa) {
        if (p1 == 0.0) fail(ErrorKind::PreconditionViolation, "kappa parametrization needs psi^[1] != 0");
        kappa = value;
        mu = (p3 - kappa * p0) / p1;
        nu = (p2 - mu * p0) / p1;
    } else {
        if (p0 == 0.0) fail(ErrorKind::PreconditionViolation, "nu parametrization needs psi^[0] != 0");
        nu = value;
        mu = (p2 - nu * p1) / p0;
        kappa = (p3 - mu * p1) / p0;
    }
    Mat2d W;
    W << kappa, mu, mu, nu;
    return W;
}

namespace {

constexpr double kFreeLimit = 1e6;

// det(W_L - W_R) and trace(W_L - W_R) as affine functions of the free parameter:
// det = c0 + slope * f, trace = t0 - tslope * f.
struct AffineForms {
    double c0, slope, t0, tslope;
};

AffineForms affine_forms(const Vec2d& u, const Vec2d& v, const Mat2c& WL, FreeParam which, double g) {
    const double p0 = u(0), p1 = u(1), p3 = v(0), p2 = v(1);
    const double k = WL(0, 0).real(), n = WL(1, 1).real();
    const double mm = 2.0 * WL(0, 1).real();  // m + conj(m)
    const double detWL = (k * n - std::norm(WL(0, 1)));
    const double trWL = k + n;
    AffineForms f{};
    if (which == FreeParam::Kappa) {
        const double d = p1 * p1;
        f.c0 = detWL + (k * (p0 * p3 - p1 * p2) - p3 * p3 + mm * p1 * p3) / d;
        f.slope = g / d;
        f.t0 = trWL + (p0 * p3 - p1 * p2) / d;
        f.tslope = 1.0 + p0 * p0 / d;
    } else {
        const double d = p0 * p0;
        f.c0 = detWL + (n * (p1 * p2 - p0 * p3) - p2 * p2 + mm * p0 * p2) / d;
        f.slope = g / d;
        f.t0 = trWL + (p1 * p2 - p0 * p3) / d;
        f.tslope = 1.0 + p1 * p1 / d;
    }
    return f;
}

}  // namespace

Lim3Result lim3_wr(const Vec2d& u_psi, const Vec2d& v_psi, const Mat2c& W_L, int target_sigma, double tol) {
    if (u_psi.norm() == 0.0) fail(ErrorKind::PreconditionViolation, "u_psi must be nonzero");
    if (target_sigma != 0 && target_sigma != 1)
        fail(ErrorKind::PreconditionViolation, "target sigma must be 0 or 1");
    const double herm = (W_L - W_L.adjoint()).norm();
    if (herm > 1e-8 * std::max(1.0, W_L.norm())) fail(ErrorKind::NotHermitian, "W_L is not Hermitian");

    Lim3Synthesis syn;
    syn.u_psi = u_psi;
    syn.v_psi = v_psi;
    syn.W_L = W_L;
    const Vec2c uc = u_psi.cast<cplx>();
    syn.g = u_psi.dot(v_psi) - (uc.transpose() * W_L * uc)(0, 0).real();
    if (std::abs(syn.g) <= tol)
        fail(ErrorKind::DegenerateG, "g = " + std::to_string(syn.g) + " is below tolerance");
    syn.free_param = preferred_free_param(u_psi);
    const AffineForms af = affine_forms(u_psi, v_psi, W_L, syn.free_param, syn.g);
    syn.C_or_D = af.c0;

    auto sigma_ok = [&](double f) {
        double det = af.c0 + af.slope * f;
        double tr = af.t0 - af.tslope * f;
        if (target_sigma == 1) return det < 0.0;
        return det > 0.0 && tr > 0.0;
    };

    double f;
    if (target_sigma == 1) {
        f = (-1.0 - af.c0) / af.slope;
    } else {
        const double f_trace = af.t0 / af.tslope;         // trace vanishes here
        const double f_trace1 = f_trace - 1.0 / af.tslope;  // trace equals 1
        const double f_det1 = (1.0 - af.c0) / af.slope;    // det equals 1
        const double f_det0 = -af.c0 / af.slope;
        if (af.slope < 0.0) {
            // det >= 1 for f <= f_det1, trace >= 1 for f <= f_trace1
            f = std::min(f_det1, f_trace1);
        } else if (f_det1 <= f_trace1) {
            f = f_det1;
        } else if (f_det0 < f_trace) {
            f = 0.5 * (f_det0 + f_trace);
        } else {
            fail(ErrorKind::TargetInfeasible, "no free parameter gives W_L - W_R positive definite");
        }
    }
    if (std::abs(f) > kFreeLimit) {
        syn.ill_conditioned = true;
        double clamped = std::copysign(kFreeLimit, f);
        if (sigma_ok(clamped)) f = clamped;
    }
    syn.value = f;
    return {weyl_from_free(u_psi, v_psi, syn.free_param, f), syn};
}

RegularPair lim4_pair_from_solutions(const QuasiVector& theta1, const QuasiVector& theta2, double tol) {
    const double scale = std::max(1e-300, theta1.z.norm() * theta2.z.norm());
    const double s11 = theta1.z.squaredNorm(), s22 = theta2.z.squaredNorm();
    if (std::abs(lagrangian_bracket(theta1, theta2)) > tol * scale ||
        std::abs(lagrangian_bracket(theta1, theta1)) > tol * std::max(1e-300, s11) ||
        std::abs(lagrangian_bracket(theta2, theta2)) > tol * std::max(1e-300, s22))
        fail(ErrorKind::BracketNotVanishing, "condition functions are not bracket-orthogonal");
    Eigen::Matrix<cplx, 4, 2> cols;
    cols << theta1.z, theta2.z;
    Eigen::JacobiSVD<Eigen::Matrix<cplx, 4, 2>> svd(cols);
    if (!(svd.singularValues()(0) > 0.0) || svd.singularValues()(1) <= 1e-12 * svd.singularValues()(0))
        fail(ErrorKind::DependentConditions, "condition functions are linearly dependent");
    Mat2c A1, A2;
    A1.row(0) = theta1.v().conjugate().transpose();
    A1.row(1) = theta2.v().conjugate().transpose();
    A2.row(0) = -theta1.u().conjugate().transpose();
    A2.row(1) = -theta2.u().conjugate().transpose();
    // Balance the rows; the condition subspace is unchanged.
    for (int r = 0; r < 2; ++r) {
        double nr = std::sqrt(A1.row(r).squaredNorm() + A2.row(r).squaredNorm());
        A1.row(r) /= nr;
        A2.row(r) /= nr;
    }
    return validate_pair(A1, A2, 1e-10);
}

RegularPair lim3_condition_completion(const QuasiVector& psi, Completion mode) {
    if (psi.z.norm() == 0.0) fail(ErrorKind::PreconditionViolation, "psi must be nonzero");
    const Vec4c zr = psi.z.real().cast<cplx>();
    const QuasiVector p(zr);
    const Vec2d u = zr.head<2>().real();
    const Vec2d v = zr.tail<2>().real();
    const double un = u.norm();
    if (un > 1e-14 * zr.norm()) {
        if (mode == Completion::WeylRoute) {
            const Vec2d us = u / un, vs = v / un;
            return weyl_to_pair(weyl_from_free(us, vs, preferred_free_param(us), 0.0));
        }
        QuasiVector theta2;
        theta2.z(2) = -u(1);
        theta2.z(3) = u(0);
        return lim4_pair_from_solutions(p, theta2);
    }
    QuasiVector theta2;
    theta2.z(2) = -v(1);
    theta2.z(3) = v(0);
    return lim4_pair_from_solutions(p, theta2);
}

std::pair<QuasiVector, QuasiVector> pair_condition_vectors(const RegularPair& pair) {
    std::pair<QuasiVector, QuasiVector> out;
    for (int r = 0; r < 2; ++r) {
        Vec4c z;
        z << -pair.A2.row(r).transpose().conjugate(), pair.A1.row(r).transpose().conjugate();
        (r == 0 ? out.first : out.second) = QuasiVector(z);
    }
    return out;
}

}  // namespace sl4
