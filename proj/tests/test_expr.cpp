#include "stricttest/expr.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace stricttest {
namespace {

ExprPtr parse(const std::string& s, std::map<std::string, double> params = {}) {
    return parse_expression(s, params);
}

TEST(Expr, BasicEvaluation) {
    EXPECT_DOUBLE_EQ(parse("abs(x)^0.5")->eval(4.0), 2.0);
    EXPECT_DOUBLE_EQ(parse("abs(x)^2")->eval(-3.0), 9.0);
    EXPECT_DOUBLE_EQ(parse("2*x + 1")->eval(3.0), 7.0);
    EXPECT_DOUBLE_EQ(parse("x^2 - x^(-1)")->eval(2.0), 3.5);
    EXPECT_DOUBLE_EQ(parse("exp(log(x))")->eval(5.0), 5.0);
    EXPECT_DOUBLE_EQ(parse("-x^2")->eval(3.0), -9.0);  // unary minus binds outside the power
}

TEST(Expr, Parameters) {
    std::map<std::string, double> p{{"mu0", 2.0}, {"alpha", 1.5}};
    EXPECT_DOUBLE_EQ(parse("mu0*x^alpha", p)->eval(4.0), 16.0);
    EXPECT_DOUBLE_EQ(parse("-(mu0/2)*x", p)->eval(3.0), -3.0);
    EXPECT_THROW(parse("nope*x"), ParseError);
}

TEST(Expr, DomainErrors) {
    EXPECT_THROW(parse("x^(-1)")->eval(0.0), EvalError);
    EXPECT_THROW(parse("log(x)")->eval(-1.0), EvalError);
    EXPECT_THROW(parse("1/x")->eval(0.0), EvalError);
    EXPECT_THROW(parse("x^0.5")->eval(-2.0), EvalError);  // needs abs(x)^0.5
    EXPECT_DOUBLE_EQ(parse("x^3")->eval(-2.0), -8.0);     // integer powers are fine
}

TEST(Expr, ExponentMustBeConstant) {
    EXPECT_THROW(parse("x^x"), ParseError);
    EXPECT_NO_THROW(parse("x^(1+1)"));
    EXPECT_DOUBLE_EQ(parse("x^(2*2-1)")->eval(2.0), 8.0);
}

TEST(Expr, CompiledMatchesTree) {
    std::map<std::string, double> p{{"a", 0.7}};
    auto exprs = {"abs(x)^1.5 + a*x", "exp(-x^2/2)", "(x+1)/(x^2+4)", "log(abs(x)+2)*x",
                  "-(3/2)*abs(x)^0.5"};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (const char* s : exprs) {
        ExprPtr e = parse(s, p);
        CompiledExpr ce(e);
        for (int i = 0; i < 200; ++i) {
            double x = u(rng);
            double tv = e->eval(x);
            double cv = ce(x);
            EXPECT_NEAR(tv, cv, 1e-12 * (1.0 + std::abs(tv))) << s << " at " << x;
        }
    }
}

TEST(Expr, CompiledReportsFaultsAsNaN) {
    CompiledExpr ce(parse("log(x)"));
    EXPECT_TRUE(std::isnan(ce(-1.0)));
    CompiledExpr pw(parse("x^0.5"));
    EXPECT_TRUE(std::isnan(pw(-4.0)));
}

TEST(Expr, PrintReparseAgrees) {
    std::map<std::string, double> p{{"sigma0", 0.5}, {"beta", 1.2}};
    ExprPtr e = parse("sigma0*x^beta + abs(x)^0.5/(x+3)", p);
    ExprPtr r = parse(e->print());
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.1, 20.0);
    for (int i = 0; i < 100; ++i) {
        double x = u(rng);
        double a = e->eval(x), bb = r->eval(x);
        EXPECT_NEAR(a, bb, 1e-12 * (1.0 + std::abs(a)));
    }
}

TEST(Expr, StructuralEquality) {
    EXPECT_TRUE(Expr::equal(parse("x^2+1"), parse("x^2+1")));
    EXPECT_FALSE(Expr::equal(parse("x^2+1"), parse("1+x^2")));  // structural, not algebraic
    EXPECT_TRUE(Expr::equal(parse("2*3*x"), parse("6*x")));     // constants fold
}

}  // namespace
}  // namespace stricttest
