#include "sl4/hamiltonian.hpp"

#include "sl4/problem.hpp"

namespace sl4 {

const Eigen::Matrix4d& symplectic_j() {
    static const Eigen::Matrix4d J = [] {
        Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
        m(0, 2) = -1.0;
        m(1, 3) = -1.0;
        m(2, 0) = 1.0;
        m(3, 1) = 1.0;
        return m;
    }();
    return J;
}

SystemMatrices system_matrices(const CoefficientValues& c, cplx lambda) {
    SystemMatrices sm;
    sm.J = symplectic_j();
    sm.S = Mat4c::Zero();
    sm.S(0, 0) = lambda * c.w - c.q;
    sm.S(1, 1) = -c.s;
    sm.S(1, 2) = 1.0;
    sm.S(2, 1) = 1.0;
    sm.S(3, 3) = 1.0 / c.p;
    return sm;
}

SystemMatrices system_matrices(const ProblemSpec& problem, double x, cplx lambda) {
    return system_matrices(evaluate_coefficients(problem, x), lambda);
}

Mat4c first_order_matrix(const CoefficientValues& c, cplx lambda) {
    Mat4c a = Mat4c::Zero();
    a(0, 1) = 1.0;
    a(1, 3) = 1.0 / c.p;
    a(2, 0) = c.q - lambda * c.w;
    a(3, 1) = c.s;
    a(3, 2) = -1.0;
    return a;
}

cplx lagrangian_bracket(const QuasiVector& f, const QuasiVector& g) {
    return f.z(0) * std::conj(g.z(2)) + f.z(1) * std::conj(g.z(3))
         - f.z(2) * std::conj(g.z(0)) - f.z(3) * std::conj(g.z(1));
}

Eigen::MatrixXcd bracket_matrix(std::span<const QuasiVector> states) {
    const auto n = static_cast<Eigen::Index>(states.size());
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k)
            a(j, k) = lagrangian_bracket(states[static_cast<std::size_t>(j)], states[static_cast<std::size_t>(k)]);
    return a;
}

}  // namespace sl4
