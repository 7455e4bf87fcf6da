#pragma once

#include <vector>

namespace sl4 {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Cached rule with n points.
const GaussRule& gauss_legendre_rule(int n);

template <class F>
double gauss_legendre_integrate(F&& f, double lo, double hi, int n) {
    const GaussRule& r = gauss_legendre_rule(n);
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
    return s * half;
}

}  // namespace sl4
