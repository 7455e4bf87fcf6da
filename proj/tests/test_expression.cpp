#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "sl4/error.hpp"
#include "sl4/expression.hpp"

using sl4::Error;
using sl4::ErrorKind;
using sl4::Expression;

TEST_CASE("arithmetic precedence and associativity") {
    CHECK(Expression::parse("1 + 2*3")(0.0) == doctest::Approx(7.0));
    CHECK(Expression::parse("(1 + 2)*3")(0.0) == doctest::Approx(9.0));
    CHECK(Expression::parse("2^3^2")(0.0) == doctest::Approx(512.0));
    CHECK(Expression::parse("-x^2")(3.0) == doctest::Approx(-9.0));
    CHECK(Expression::parse("8/4/2")(0.0) == doctest::Approx(1.0));
    CHECK(Expression::parse("1 - 2 - 3")(0.0) == doctest::Approx(-4.0));
    CHECK(Expression::parse("2e-3 * 1E3")(0.0) == doctest::Approx(2.0));
}

TEST_CASE("functions and constants") {
    CHECK(Expression::parse("exp(0)")(0.0) == doctest::Approx(1.0));
    CHECK(Expression::parse("log(exp(2.5))")(0.0) == doctest::Approx(2.5));
    CHECK(Expression::parse("sin(pi/2)")(0.0) == doctest::Approx(1.0));
    CHECK(Expression::parse("cos(pi)")(0.0) == doctest::Approx(-1.0));
    CHECK(Expression::parse("sqrt(x)")(16.0) == doctest::Approx(4.0));
    CHECK(Expression::parse("abs(x)")(-3.0) == doctest::Approx(3.0));
    CHECK(Expression::parse("(1-x)^3")(0.5) == doctest::Approx(0.125));
}

TEST_CASE("constant folding is detected") {
    const Expression c = Expression::parse("2*pi");
    CHECK(c.is_constant());
    CHECK(c(123.0) == doctest::Approx(2.0 * std::numbers::pi));
    CHECK_FALSE(Expression::parse("x + 1").is_constant());
    CHECK(Expression::constant(4.5)(0.0) == 4.5);
}

TEST_CASE("malformed input raises a parse error") {
    for (const char* bad : {"", "1 +", "(x", "x)", "foo(x)", "x x", "2 ** 3", "sin()", "1..2", "y"}) {
        INFO("input: '" << bad << "'");
        try {
            (void)Expression::parse(bad);
            FAIL("accepted malformed input");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Parse);
        }
    }
}

TEST_CASE("random polynomials evaluate like Horner's rule") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        double c[4];
        for (double& v : c) v = u(rng);
        std::ostringstream text;
        text.precision(17);
        text << c[0] << " + " << c[1] << "*x + " << c[2] << "*x^2 + " << c[3] << "*x^3";
        const Expression e = Expression::parse(text.str());
        const double x = u(rng);
        const double horner = ((c[3] * x + c[2]) * x + c[1]) * x + c[0];
        CHECK(e(x) == doctest::Approx(horner).epsilon(1e-12));
    }
}
