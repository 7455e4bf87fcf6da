#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "sl4/builtins.hpp"
#include "sl4/error.hpp"
#include "sl4/oscillation.hpp"
#include "support/fem_oracle.hpp"
#include "support/random_problems.hpp"

using namespace sl4;
using sl4::testing::clamped_roots;
using sl4::testing::fem_eigenvalues;
using sl4::testing::random_pair;
using sl4::testing::random_regular_problem;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("nu_neg counts negative eigenvalues of Hermitian matrices") {
    Mat2c H;
    H << 1.0, 0.0, 0.0, 2.0;
    CHECK(nu_neg(H) == 0);
    H << -1.0, 0.0, 0.0, 2.0;
    CHECK(nu_neg(H) == 1);
    H << -1.0, cplx(0.0, 0.5), cplx(0.0, -0.5), -2.0;
    CHECK(nu_neg(H) == 2);
    H << 0.0, 1.0, 1.0, 0.0;  // eigenvalues +1, -1
    CHECK(nu_neg(H) == 1);
    H << 1.0, 1.0, 0.0, 1.0;
    CHECK_THROWS_AS(nu_neg(H), Error);
}

TEST_CASE("hinged beam eigenvalues are ((k+1) pi)^4") {
    const RegularProblem rp = make_regular(hinged_beam());
    const auto ev = eigenvalues_up_to(rp, 5, {0.0, 10.0}, 1e-12, {}, 1e-12);
    for (int k = 0; k <= 5; ++k) {
        const double exact = std::pow((k + 1) * std::numbers::pi, 4);
        CHECK(rel(ev[static_cast<std::size_t>(k)], exact) < 1e-8);
    }
}

TEST_CASE("hinged beam on [0, L] scales as (pi / L)^4") {
    for (double L : {0.5, 2.0, 3.7}) {
        const RegularProblem rp = make_regular(hinged_beam(L));
        const double mu0 = kth_eigenvalue(rp, 0, {0.0, 1.0}, 1e-14, {}, 1e-12);
        CHECK(rel(mu0, std::pow(std::numbers::pi / L, 4)) < 1e-8);
    }
}

TEST_CASE("clamped beam eigenvalues match the roots of cos k cosh k = 1") {
    const RegularProblem rp = make_regular(clamped_beam());
    const auto roots = clamped_roots(5);
    const auto ev = eigenvalues_up_to(rp, 4, {0.0, 10.0}, 1e-12, {}, 1e-12);
    for (int k = 0; k < 5; ++k) CHECK(rel(ev[static_cast<std::size_t>(k)], std::pow(roots[static_cast<std::size_t>(k)], 4)) < 1e-8);
    CHECK(std::abs(roots[0] - 4.730040744862704) < 1e-12);
}

TEST_CASE("counting function is nondecreasing in lambda") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const RegularProblem rp = random_regular_problem(rng);
        int prev = -1;
        for (double lam = -200.0; lam <= 3000.0; lam += 137.0) {
            const int n = count_below(rp, lam).N;
            CHECK(n >= prev);
            CHECK(n >= 0);
            prev = n;
        }
    }
}

TEST_CASE("count is independent of the matching point") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> lam_dist(-50.0, 5000.0);
    for (int trial = 0; trial < 8; ++trial) {
        const RegularProblem rp = random_regular_problem(rng);
        const double lam = lam_dist(rng);
        const double L = rp.b() - rp.a();
        const int ref = count_below(rp, lam, rp.a() + 0.5 * L).N;
        for (double f : {0.1, 0.3, 0.7, 0.9}) CHECK(count_below(rp, lam, rp.a() + f * L).N == ref);
    }
}

TEST_CASE("eigenvalue index equals the count just above it") {
    std::mt19937_64 rng(5);
    const RegularProblem rp = random_regular_problem(rng);
    const auto ev = eigenvalues_up_to(rp, 3, {-100.0, 100.0}, 1e-10, {}, 1e-12);
    for (int k = 0; k <= 3; ++k) {
        const double lk = ev[static_cast<std::size_t>(k)];
        const double d = 1e-6 * std::max(1.0, std::abs(lk));
        CHECK(count_below(rp, lk - d).N == k);
        CHECK(count_below(rp, lk + d).N == k + 1);
    }
}

TEST_CASE("random regular problems agree with the finite element oracle") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 4; ++trial) {
        const RegularProblem rp = random_regular_problem(rng);
        const auto& c = rp.problem.coefficients;
        const auto ev = eigenvalues_up_to(rp, 3, {-100.0, 100.0}, 1e-12, {}, 1e-12);
        const auto coarse = fem_eigenvalues(c, rp.a(), rp.b(), rp.left_bc, rp.right_bc, 100, 4);
        const auto fine = fem_eigenvalues(c, rp.a(), rp.b(), rp.left_bc, rp.right_bc, 200, 4);
        for (std::size_t k = 0; k < 4; ++k) {
            const double scale = std::max(1.0, std::abs(fine[k]));
            // Hermite cubics converge at fourth order, so the grid change bounds the fine error.
            const double fem_err = std::abs(coarse[k] - fine[k]);
            INFO("trial " << trial << " k " << k << " shooting " << ev[k] << " fem " << fine[k]);
            CHECK(fem_err / scale < 1e-6);
            CHECK(std::abs(ev[k] - fine[k]) <= fem_err + 1e-9 * scale);
        }
    }
}

TEST_CASE("every pair family gives a self-adjoint problem matched by the oracle") {
    std::mt19937_64 rng(99);
    for (int fl = 0; fl < 3; ++fl)
        for (int fr = 0; fr < 3; ++fr) {
            ProblemSpec p = hinged_beam();
            p.left_bc = random_pair(rng, fl);
            p.right_bc = random_pair(rng, fr);
            const RegularProblem rp = make_regular(p);
            const auto ev = eigenvalues_up_to(rp, 2, {-100.0, 100.0}, 1e-12, {}, 1e-12);
            const auto coarse = fem_eigenvalues(p.coefficients, 0.0, 1.0, rp.left_bc, rp.right_bc, 100, 3);
            const auto fine = fem_eigenvalues(p.coefficients, 0.0, 1.0, rp.left_bc, rp.right_bc, 200, 3);
            for (std::size_t k = 0; k < 3; ++k) {
                INFO("families " << fl << "," << fr << " k " << k << " shooting " << ev[k] << " fem " << fine[k]);
                const double scale = std::max(1.0, std::abs(fine[k]));
                CHECK(std::abs(coarse[k] - fine[k]) / scale < 1e-6);
                CHECK(std::abs(ev[k] - fine[k]) <= std::abs(coarse[k] - fine[k]) + 1e-9 * scale);
            }
        }
}
