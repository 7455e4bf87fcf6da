#include "random_problems.hpp"

#include <cmath>
#include <numbers>

namespace sl4::testing {

RegularPair random_pair(std::mt19937_64& rng, int family) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    if (family < 0) family = std::uniform_int_distribution<int>(0, 2)(rng);
    Mat2d A1 = Mat2d::Zero(), A2 = Mat2d::Zero();
    if (family == 0) {
        Mat2d W;
        W(0, 0) = u(rng);
        W(1, 1) = u(rng);
        W(0, 1) = W(1, 0) = u(rng);
        A1 = -W;
        A2 = Mat2d::Identity();
    } else if (family == 1) {
        const double th = std::uniform_real_distribution<double>(0.0, std::numbers::pi)(rng);
        const Vec2d e(std::cos(th), std::sin(th)), ep(-std::sin(th), std::cos(th));
        const double kappa = u(rng);
        A1.row(0) = ep.transpose();
        A1.row(1) = -kappa * e.transpose();
        A2.row(1) = e.transpose();
    } else {
        A1 = Mat2d::Identity();
    }
    Mat2d G;
    do {
        G << u(rng), u(rng), u(rng), u(rng);
    } while (std::abs(G.determinant()) < 0.5);
    return validate_pair((G * A1).cast<cplx>(), (G * A2).cast<cplx>());
}

CoefficientSet random_coefficients(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0), freq(0.5, 4.0), ph(0.0, 2.0 * std::numbers::pi);
    auto wave = [&](double base, double a_max, const char* name) {
        const double a0 = a_max * amp(rng), k = freq(rng), f = ph(rng);
        return Coefficient([=](double x) { return base + a0 * std::sin(k * x + f); }, name);
    };
    CoefficientSet c;
    c.p = wave(1.0, 0.5, "p");
    c.s = wave(0.0, 1.0, "s");
    c.q = wave(0.0, 5.0, "q");
    c.w = wave(1.0, 0.5, "w");
    return c;
}

RegularProblem random_regular_problem(std::mt19937_64& rng) {
    ProblemSpec p;
    p.name = "random";
    p.coefficients = random_coefficients(rng);
    p.interval = {0.0, std::uniform_real_distribution<double>(0.8, 1.5)(rng)};
    p.left_class = p.right_class = EndpointClass{EndpointKind::Regular, 1.0};
    p.left_bc = random_pair(rng);
    p.right_bc = random_pair(rng);
    return make_regular(p);
}

}  // namespace sl4::testing
