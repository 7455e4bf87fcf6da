#pragma once

#include <span>

#include "sl4/types.hpp"

namespace sl4 {

struct CoefficientSet;
struct ProblemSpec;

/// State z = (y^[0], y^[1], y^[3], y^[2]) at a point.
///
/// The third quasi-derivative sits in slot 2 and the second in slot 3, so
/// u = (z0, z1) and v = (z2, z3) split the state into the two Lagrangian halves.
struct QuasiVector {
    Vec4c z = Vec4c::Zero();

    QuasiVector() = default;
    explicit QuasiVector(const Vec4c& zz) : z(zz) {}

    /// Build from quasi-derivatives in natural order (y, y', p y'', y^[3]).
    static QuasiVector from_derivatives(cplx y0, cplx y1, cplx y2, cplx y3) {
        Vec4c zz;
        zz << y0, y1, y3, y2;
        return QuasiVector(zz);
    }
    static QuasiVector unit(int i) {
        Vec4c zz = Vec4c::Zero();
        zz(i) = 1.0;
        return QuasiVector(zz);
    }

    Vec2c u() const { return z.head<2>(); }
    Vec2c v() const { return z.tail<2>(); }
    QuasiVector conj() const { return QuasiVector(z.conjugate()); }
};

struct SystemMatrices {
    Eigen::Matrix4d J;
    Mat4c S;
};

/// V U^{-1} at a point. For real λ it is Hermitian; the defect of the
/// symmetrization applied on construction is kept for diagnostics.
struct WeylMatrix {
    Mat2c W = Mat2c::Zero();
    double symmetrization_defect = 0.0;

    cplx k() const { return W(0, 0); }
    cplx m() const { return W(0, 1); }
    cplx n() const { return W(1, 1); }
};

struct CoefficientValues {
    double p, s, q, w;
};

const Eigen::Matrix4d& symplectic_j();

SystemMatrices system_matrices(const CoefficientValues& c, cplx lambda);
SystemMatrices system_matrices(const ProblemSpec& problem, double x, cplx lambda);

/// Right-hand side matrix A with z' = A z, i.e. A = -J S.
Mat4c first_order_matrix(const CoefficientValues& c, cplx lambda);

/// [f,g] = u_f^T conj(v_g) - v_f^T conj(u_g).
cplx lagrangian_bracket(const QuasiVector& f, const QuasiVector& g);

/// Entry (j,k) is [states[j], states[k]].
Eigen::MatrixXcd bracket_matrix(std::span<const QuasiVector> states);

}  // namespace sl4
