#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fiocalc/expr.hpp"

#include <array>

using namespace fiocalc;

TEST_CASE("parse and evaluate polynomial and trig terms") {
    const Expr e = Expr::parse("y + y^3", {"y"});
    CHECK(e.eval(std::array<double, 1>{2.0}) == doctest::Approx(10.0));

    const Expr m = Expr::parse("(1+0.3*sin(x1))^(-2)", {"x1", "x2"});
    const double x1 = 0.7;
    const double expected = std::pow(1 + 0.3 * std::sin(x1), -2);
    CHECK(m.eval(std::array<double, 2>{x1, 0.0}) == doctest::Approx(expected));

    CHECK(Expr::parse("2*pi", {}).eval(std::array<double, 0>{}) == doctest::Approx(2 * M_PI));
    CHECK(Expr::parse("sqrt(4) - exp(0) / 2", {}).eval(std::array<double, 0>{}) ==
          doctest::Approx(1.5));
}

TEST_CASE("symbolic derivative matches finite differences") {
    const Expr e = Expr::parse("y + 0.3*sin(2*y) - y^2/4", {"y"});
    const Expr d = e.derivative("y");
    for (double y : {-1.3, 0.0, 0.4, 2.2}) {
        const double h = 1e-6;
        const double fd = (e.eval(std::array<double, 1>{y + h}) -
                           e.eval(std::array<double, 1>{y - h})) /
                          (2 * h);
        CHECK(d.eval(std::array<double, 1>{y}) == doctest::Approx(fd).epsilon(1e-6));
    }
    const Expr dd = d.derivative("y");
    CHECK(dd.eval(std::array<double, 1>{0.0}) == doctest::Approx(-0.5 - 1.2 * std::sin(0.0)));
}

TEST_CASE("negative integer exponents differentiate correctly") {
    const Expr e = Expr::parse("(1+x1)^(-2)", {"x1"});
    const Expr d = e.derivative("x1");
    CHECK(d.eval(std::array<double, 1>{1.0}) == doctest::Approx(-2.0 / 8.0));
}

TEST_CASE("syntax and variable errors are rejected") {
    CHECK_THROWS_AS(Expr::parse("y +", {"y"}), ValidationError);
    CHECK_THROWS_AS(Expr::parse("z", {"y"}), ValidationError);
    CHECK_THROWS_AS(Expr::parse("foo(y)", {"y"}), ValidationError);
    CHECK_THROWS_AS(Expr::parse("y^x", {"y", "x"}), ValidationError);
}
