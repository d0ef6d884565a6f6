#include <doctest.h>

#include <cmath>

#include "lorgeo/expression.hpp"
#include "lorgeo/random.hpp"
#include "testutil.hpp"

using namespace lorgeo;
using lorgeo_test::vec;

TEST_SUITE("expression") {

TEST_CASE("literals, precedence, functions") {
    const double x[2] = {0.5, -2.0};
    CHECK(Expr::parse("1+2*3", 2).eval(x) == doctest::Approx(7.0));
    CHECK(Expr::parse("(1+2)*3", 2).eval(x) == doctest::Approx(9.0));
    CHECK(Expr::parse("2^3^1", 2).eval(x) == doctest::Approx(8.0));
    CHECK(Expr::parse("-x1^2", 2).eval(x) == doctest::Approx(-0.25));
    CHECK(Expr::parse("x2/4", 2).eval(x) == doctest::Approx(-0.5));
    CHECK(Expr::parse("exp(0)+sin(0)+cos(0)", 2).eval(x) == doctest::Approx(2.0));
    CHECK(Expr::parse("sqrt(x1+0.5)", 2).eval(x) == doctest::Approx(1.0));
    CHECK(Expr::parse("2*pi", 1).eval(x) == doctest::Approx(6.283185307179586));
    CHECK(Expr::parse("1 + 0.5*exp(-x1^2)", 1).eval(x) ==
          doctest::Approx(1.0 + 0.5 * std::exp(-0.25)));
}

TEST_CASE("x0 is rejected by name") {
    CHECK_THROWS_WITH_AS(Expr::parse("x0+1", 2), doctest::Contains("x0"), ParseError);
}

TEST_CASE("unknown identifiers and malformed input") {
    CHECK_THROWS_AS(Expr::parse("x3", 2), ParseError);
    CHECK_THROWS_AS(Expr::parse("foo(x1)", 2), ParseError);
    CHECK_THROWS_AS(Expr::parse("y1", 2), ParseError);
    CHECK_THROWS_AS(Expr::parse("1+", 2), ParseError);
    CHECK_THROWS_AS(Expr::parse("(1", 2), ParseError);
    CHECK_THROWS_AS(Expr::parse("1 2", 2), ParseError);
}

TEST_CASE("analytic derivative matches central differences") {
    // property: random points, several expressions
    const char* exprs[] = {
        "1+0.5*exp(-x1^2)",
        "sin(x1)*cos(x2)+x2^3",
        "sqrt(1+x1^2+x2^2)",
        "x1*x2/(1+x1^2)",
        "exp(-(x1^2+x2^2))*(2+sin(x2))",
    };
    Rng rng(7);
    for (const char* src : exprs) {
        const Expr e = Expr::parse(src, 2);
        const Expr d1 = e.derivative(0);
        const Expr d2 = e.derivative(1);
        for (int it = 0; it < 50; ++it) {
            double x[2] = {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
            const double h = 1e-5;
            for (int axis = 0; axis < 2; ++axis) {
                double xp[2] = {x[0], x[1]}, xm[2] = {x[0], x[1]};
                xp[axis] += h;
                xm[axis] -= h;
                const double fd = (e.eval(xp) - e.eval(xm)) / (2 * h);
                const double an = (axis == 0 ? d1 : d2).eval(x);
                CHECK(std::abs(an - fd) <= std::max(1e-6, 1e-4 * std::abs(an)));
            }
        }
    }
}

TEST_CASE("derivative of general power") {
    // d/dx x1^x2 at (2, 3) = x2 * x1^(x2-1) = 12
    const Expr e = Expr::parse("x1^x2", 2);
    const double x[2] = {2.0, 3.0};
    CHECK(e.derivative(0).eval(x) == doctest::Approx(12.0));
    // d/dx2 = x1^x2 log(x1) = 8 log 2
    CHECK(e.derivative(1).eval(x) == doctest::Approx(8.0 * std::log(2.0)));
}

TEST_CASE("affine combination endpoints are exact") {
    const Expr a = Expr::parse("1+0.5*exp(-x1^2)", 1);
    const Expr b = Expr::parse("2*x1", 1);
    const double x[1] = {0.37};
    CHECK(Expr::affine_combination(a, b, 0.0).eval(x) == a.eval(x));
    CHECK(Expr::affine_combination(a, b, 1.0).eval(x) == b.eval(x));
    const double mid = Expr::affine_combination(a, b, 0.25).eval(x);
    CHECK(mid == doctest::Approx(a.eval(x) + 0.25 * (b.eval(x) - a.eval(x))));
}

TEST_CASE("round trip through to_string") {
    Rng rng(11);
    const char* exprs[] = {"1+0.5*exp(-x1^2)", "x1^2-x2^2/(3+x1)", "-(x1+1)*sin(x2)"};
    for (const char* src : exprs) {
        const Expr e = Expr::parse(src, 2);
        const Expr back = Expr::parse(e.to_string(), 2);
        for (int it = 0; it < 20; ++it) {
            double x[2] = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
            CHECK(back.eval(x) == doctest::Approx(e.eval(x)).epsilon(1e-14));
        }
    }
}

}  // TEST_SUITE
