#include "stricttest/config.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace stricttest {
namespace {

const char* kEaa1 = R"(
# polynomial drift against unit noise
param alpha = 2
interval = (-inf, inf)
x0 = 0
mu = abs(x)^alpha
sigma = 1
b = x
asym left  mu C=1 p=alpha
asym right mu C=1 p=alpha
asym left  b  C=-1 p=1
asym right b  C=1  p=1
)";

const char* kCev = R"(
param mu0 = 1
param sigma0 = 1
param alpha = 0
param beta = 0
interval = (0, inf)
x0 = 1
mu = mu0*x^alpha
sigma = sigma0*x^beta
b = -(mu0/sigma0)*x^(alpha-beta)
asym left  mu C=mu0 p=alpha
asym right mu C=mu0 p=alpha
asym left  sigma C=sigma0 p=beta
asym right sigma C=sigma0 p=beta
asym left  b C=-(mu0/sigma0) p=alpha-beta
asym right b C=-(mu0/sigma0) p=alpha-beta
)";

TEST(Config, ParsesInlineStatements) {
    ProblemSpec s = parse_problem("J=(0,inf); x0=1; mu=x; sigma=x; b=-1");
    EXPECT_DOUBLE_EQ(s.l, 0.0);
    EXPECT_TRUE(std::isinf(s.r));
    EXPECT_DOUBLE_EQ(s.x0, 1.0);
    EXPECT_DOUBLE_EQ(s.c, 1.0);
    EXPECT_DOUBLE_EQ(s.b->eval(3.0), -1.0);
}

TEST(Config, Eaa1RoundTrip) {
    ProblemSpec s = parse_problem(kEaa1);
    EXPECT_DOUBLE_EQ(s.mu->eval(-3.0), 9.0);
    EXPECT_DOUBLE_EQ(s.sigma->eval(5.0), 1.0);
    ASSERT_TRUE(s.asym_right.mu.has_value());
    EXPECT_DOUBLE_EQ(s.asym_right.mu->p, 2.0);
    ASSERT_TRUE(s.asym_left.b.has_value());
    EXPECT_DOUBLE_EQ(s.asym_left.b->C, -1.0);
    // sigma is constant: its endpoint behaviour is implied
    ASSERT_TRUE(s.asym_right.sigma.has_value());
    EXPECT_DOUBLE_EQ(s.asym_right.sigma->C, 1.0);

    ProblemSpec re = parse_problem(print_problem(s));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    for (int i = 0; i < 200; ++i) {
        double x = u(rng);
        EXPECT_NEAR(s.mu->eval(x), re.mu->eval(x), 1e-12 * (1 + std::abs(s.mu->eval(x))));
        EXPECT_NEAR(s.b->eval(x), re.b->eval(x), 1e-12 * (1 + std::abs(s.b->eval(x))));
    }
    ASSERT_TRUE(re.asym_right.mu.has_value());
    EXPECT_DOUBLE_EQ(re.asym_right.mu->p, 2.0);
}

TEST(Config, CevClosedFormAgreement) {
    ProblemSpec s = parse_problem(kCev);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.01, 50.0);
    for (int i = 0; i < 100; ++i) {
        double x = u(rng);
        EXPECT_NEAR(s.mu->eval(x), 1.0, 1e-12);
        EXPECT_NEAR(s.sigma->eval(x), 1.0, 1e-12);
        EXPECT_NEAR(s.b->eval(x), -1.0, 1e-12);
    }
}

TEST(Config, ValidationErrors) {
    EXPECT_THROW(parse_problem("interval=(0,inf); x0=-1; sigma=1"), ValidationError);
    EXPECT_THROW(parse_problem("x0=0; sigma=1"), ValidationError);          // no interval
    EXPECT_THROW(parse_problem("interval=(-1,1); x0=0"), ValidationError);  // no sigma
    EXPECT_THROW(parse_problem("interval=(-1,1); x0=0; sigma=x"), ValidationError);  // sigma(0)=0
    EXPECT_THROW(parse_problem("interval=(1,-1); x0=0; sigma=1"), ValidationError);
    EXPECT_THROW(parse_problem("interval=(-1,1); x0=0; sigma=1; nonsense=3"), ValidationError);
}

TEST(Config, BZeroDetection) {
    EXPECT_TRUE(is_b_zero_ae(parse_problem("J=(-inf,inf); x0=0; mu=0; sigma=1")));
    EXPECT_FALSE(is_b_zero_ae(parse_problem("J=(-inf,inf); x0=0; mu=0; sigma=1; b=x")));
    // syntactically nonzero, pointwise zero
    EXPECT_TRUE(is_b_zero_ae(parse_problem("J=(-inf,inf); x0=0; mu=0; sigma=1; b=x-x")));
    // declared nonzero endpoint behaviour blocks the claim
    ProblemSpec s = parse_problem(
        "J=(-inf,inf); x0=0; mu=0; sigma=1; b=x-x; asym right b C=1 p=1");
    EXPECT_FALSE(is_b_zero_ae(s));
}

TEST(Config, RebindParams) {
    ProblemSpec s = rebind_params(kCev, {{"alpha", 1.0}, {"beta", 0.5}});
    EXPECT_NEAR(s.mu->eval(4.0), 4.0, 1e-12);
    EXPECT_NEAR(s.sigma->eval(4.0), 2.0, 1e-12);
    EXPECT_NEAR(s.asym_right.b->p, 0.5, 1e-12);
    EXPECT_THROW(rebind_params(kCev, {{"gamma_", 1.0}}), ValidationError);
}

TEST(Config, ProbeGridStaysInside) {
    ProblemSpec s = parse_problem("J=(0,inf); x0=1; sigma=1");
    for (double x : probe_grid(s)) {
        EXPECT_GT(x, 0.0);
        EXPECT_TRUE(std::isfinite(x));
    }
}

}  // namespace
}  // namespace stricttest
