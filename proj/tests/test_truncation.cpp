#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "sl4/builtins.hpp"
#include "sl4/error.hpp"
#include "sl4/truncation.hpp"
#include "support/fem_oracle.hpp"
#include "support/random_problems.hpp"

using namespace sl4;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("schedule constructors and validation") {
    const Interval unit{0.0, 1.0};
    const TruncationSchedule g = TruncationSchedule::geometric(Side::Right, 1.0, 0.1, 0.5, 5);
    REQUIRE(g.points.size() == 5);
    CHECK(g.points[0] == doctest::Approx(0.9));
    CHECK(g.points[4] == doctest::Approx(1.0 - 0.1 / 16.0));
    CHECK_NOTHROW(g.validate(unit));
    const TruncationSchedule gl = TruncationSchedule::geometric(Side::Left, 0.0, 0.1, 0.5, 3);
    CHECK(gl.points[2] == doctest::Approx(0.025));
    CHECK_NOTHROW(gl.validate(unit));
    const TruncationSchedule lin = TruncationSchedule::linear(Side::Right, 3.0, 10.0, 1.0);
    CHECK(lin.points.size() == 8);
    CHECK_NOTHROW(lin.validate({0.0, std::numeric_limits<double>::infinity()}));
    auto kind = [&](const TruncationSchedule& s) {
        try {
            s.validate(unit);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::PreconditionViolation;
    };
    CHECK(kind(TruncationSchedule::explicit_points(Side::Right, {0.5, 0.4})) == ErrorKind::Config);
    CHECK(kind(TruncationSchedule::explicit_points(Side::Right, {0.5, 1.0})) == ErrorKind::Config);
    CHECK(kind(TruncationSchedule::explicit_points(Side::Left, {0.5, 0.6})) == ErrorKind::Config);
    CHECK(kind(TruncationSchedule::explicit_points(Side::Right, {})) == ErrorKind::Config);
}

TEST_CASE("interlacing check logic") {
    CHECK(interlacing_check({1.0, 3.0, 5.0}, {2.0, 4.0, 6.0}).pass);
    CHECK(interlacing_check({1.0, 2.0}, {1.0, 2.0}).pass);  // equality is allowed
    const InterlacingReport low = interlacing_check({3.0, 4.0}, {2.0, 5.0});
    CHECK_FALSE(low.pass);
    CHECK(low.first_violation == 0);
    const InterlacingReport mid = interlacing_check({1.0, 3.0, 5.0}, {2.0, 2.5, 6.0});
    CHECK_FALSE(mid.pass);
    CHECK(mid.first_violation == 1);
}

TEST_CASE("Friedrichs sweep on the quartic well decreases and matches the oracle") {
    const ProblemSpec p = quartic_well();
    const auto sched = TruncationSchedule::linear(Side::Right, 3.0, 10.0, 1.0);
    const SweepResult res = friedrichs_sweep(p, 2, {sched}, 1e-6);
    REQUIRE(res.rows.size() == 8);
    for (std::size_t j = 0; j < res.rows.size(); ++j) {
        REQUIRE(res.rows[j].error.empty());
        if (j == 0) continue;
        // Domain monotonicity of Dirichlet truncations.
        for (std::size_t k = 0; k < 3; ++k) CHECK(res.rows[j].lambdas[k] <= res.rows[j - 1].lambdas[k] + 1e-8);
    }
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(res.convergence[k].converged);
        CHECK(res.convergence[k].last_increment < 1e-6);
    }
    // The b = 10 row is the clamped problem on [0, 10].
    const auto coarse = sl4::testing::fem_eigenvalues(p.coefficients, 0.0, 10.0, dirichlet_pair(), dirichlet_pair(), 400, 3);
    const auto fine = sl4::testing::fem_eigenvalues(p.coefficients, 0.0, 10.0, dirichlet_pair(), dirichlet_pair(), 800, 3);
    for (std::size_t k = 0; k < 3; ++k) {
        const double fem_err = std::abs(coarse[k] - fine[k]);
        INFO("k " << k << " sweep " << res.rows.back().lambdas[k] << " fem " << fine[k]);
        CHECK(fem_err / fine[k] < 1e-7);
        CHECK(std::abs(res.rows.back().lambdas[k] - fine[k]) <= fem_err + 1e-8 * fine[k]);
    }
}

TEST_CASE("spurious locator places lambda* at the hinged eigenvalue of (0, beta)") {
    const ProblemSpec base = hinged_beam();
    auto family = [&](double beta) {
        ProblemSpec sub = base;
        sub.interval.b = beta;
        return make_regular(sub);
    };
    for (int k : {0, 1, 2}) {
        const double lambda_star = 2000.0;
        const double beta = spurious_locator(family, lambda_star, k, {0.05, 3.0}, 1e-13);
        // mu_k(beta) = ((k+1) pi / beta)^4.
        CHECK(rel(beta, (k + 1) * std::numbers::pi / std::pow(lambda_star, 0.25)) < 1e-10);
        const double mu = kth_eigenvalue(family(beta), k, {lambda_star - 1, lambda_star + 1}, 1e-12, {}, 1e-13);
        CHECK(rel(mu, lambda_star) < 1e-8);
    }
}

TEST_CASE("mirroring preserves the spectrum") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 5; ++trial) {
        const RegularProblem rp = sl4::testing::random_regular_problem(rng);
        const ProblemSpec m = reflect_problem(rp.problem);
        CHECK(m.interval.a == -rp.b());
        CHECK(m.interval.b == -rp.a());
        const RegularProblem rm = make_regular(m);
        const auto e0 = eigenvalues_up_to(rp, 3, {-100.0, 100.0}, 1e-12, {}, 1e-12);
        const auto e1 = eigenvalues_up_to(rm, 3, {-100.0, 100.0}, 1e-12, {}, 1e-12);
        for (std::size_t k = 0; k < 4; ++k) CHECK(rel(e1[k], e0[k]) < 1e-9);
    }
}

TEST_CASE("lim-3 truncations interlace with Dirichlet truncations") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> theta(-1.5, 1.5), gap(-3.0, -1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const ProblemSpec p = lim3_beam(theta(rng));
        EndpointRecipe with_psi = default_recipe(p);
        REQUIRE(with_psi.right.rule == SideRule::Lim3);
        with_psi.right.completion = Completion::DirichletCompatible;
        const EndpointRecipe dirichlet = default_recipe(p, true);
        const double b_j = 1.0 - std::pow(10.0, gap(rng));
        const auto lam = eigenvalues_up_to(truncate(p, 0.0, b_j, with_psi, 0.0), 3, {-1.0, 1.0}, 1e-14, {}, 1e-11);
        const auto mu = eigenvalues_up_to(truncate(p, 0.0, b_j, dirichlet, 0.0), 3, {-1.0, 1.0}, 1e-14, {}, 1e-11);
        const InterlacingReport r = interlacing_check(lam, mu);
        INFO("b_j " << b_j << ": " << r.message);
        CHECK(r.pass);
    }
}

TEST_CASE("lim-3 exact sweep forces sigma and meets the constraint") {
    const ProblemSpec p = lim3_beam(0.4);
    const auto sched = TruncationSchedule::geometric(Side::Right, 1.0, 0.1, 0.5, 6);
    const SweepResult res = lim3_exact_sweep(p, 2, 300.0, 0.3, sched, 1e-6);
    REQUIRE(res.rows.size() == 6);
    int solved = 0;
    for (const SweepRow& r : res.rows) {
        INFO("b_j " << r.b_j << " error " << r.error);
        if (!r.error.empty()) continue;
        ++solved;
        CHECK(r.sigma == 1);
        CHECK(r.constraint_residual <= 1e-12);
        for (std::size_t k = 1; k < r.lambdas.size(); ++k) CHECK(r.lambdas[k] >= r.lambdas[k - 1]);
    }
    CHECK(solved >= 4);
    const auto path = std::filesystem::temp_directory_path() / "sl4_sweep_test.csv";
    write_sweep_csv(res, path.string());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "j,a_j,b_j,k,lambda_k,flags");
    std::filesystem::remove(path);
}
