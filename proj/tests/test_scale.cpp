#include "stricttest/scale.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "battery.hpp"
#include "stricttest/config.hpp"

namespace stricttest {
namespace {

using stricttest_tests::bcev_config;
using stricttest_tests::cev_config;
using stricttest_tests::eaa1_config;
using stricttest_tests::scale_battery;

TEST(Scale, DriftlessScaleIsAffine) {
    ProblemSpec spec = parse_problem("J=(-inf,inf); x0=0; mu=0; sigma=1; b=0");
    ScaleBundle b = build_scale(spec, Which::Original);
    EXPECT_DOUBLE_EQ(b.density(3.0), 1.0);
    EXPECT_DOUBLE_EQ(b.density(-7.0), 1.0);
    for (double x : {-5.0, -1.0, 0.25, 2.0, 9.0}) EXPECT_NEAR(b.scale(x), x, 1e-8);
    EXPECT_EQ(b.s_limit_finite(Endpoint::Left), TriState::No);
    EXPECT_EQ(b.s_limit_finite(Endpoint::Right), TriState::No);
}

TEST(Scale, ScaleIsIncreasingAndZeroAtReference) {
    ProblemSpec spec = parse_problem(eaa1_config(2.0));
    ScaleBundle b = build_scale(spec, Which::Original);
    EXPECT_DOUBLE_EQ(b.scale(spec.c), 0.0);
    double prev = -kInf;
    for (double x : {-3.0, -1.0, -0.25, 0.0, 0.25, 1.0, 3.0}) {
        double s = b.scale(x);
        EXPECT_GT(s, prev);
        prev = s;
    }
}

TEST(Scale, Eaa1ScaleLimits) {
    // s(-inf) = -inf for every alpha > -1; s(+inf) finite
    for (double alpha : {-0.5, 0.5, 2.0, 4.0}) {
        ProblemSpec spec = parse_problem(eaa1_config(alpha));
        ScaleBundle orig = build_scale(spec, Which::Original);
        EXPECT_EQ(orig.s_limit_finite(Endpoint::Left), TriState::No) << alpha;
        EXPECT_EQ(orig.s_limit_finite(Endpoint::Right), TriState::Yes) << alpha;
    }
}

TEST(Scale, Eaa1AuxiliaryExitAtInfinityIffAlphaAboveOne) {
    struct Case {
        double alpha;
        TriState exits;
    } cases[] = {{0.5, TriState::No},
                 {1.0, TriState::No},
                 {2.0, TriState::Yes},
                 {4.0, TriState::Yes}};
    for (auto [alpha, expect] : cases) {
        ProblemSpec spec = parse_problem(eaa1_config(alpha));
        ScaleBundle aux = build_scale(spec, Which::Auxiliary);
        FellerFunctional f = feller_limit_on(aux, Endpoint::Right);
        EXPECT_EQ(f.exits, expect) << "alpha=" << alpha;
        // never exits at -inf
        FellerFunctional g = feller_limit_on(aux, Endpoint::Left);
        EXPECT_EQ(g.exits, TriState::No) << "alpha=" << alpha;
    }
}

TEST(Scale, Eaa1OriginalExitsIffAlphaAboveOne) {
    for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
        ProblemSpec spec = parse_problem(eaa1_config(alpha));
        FellerFunctional f = feller_limit(spec, Which::Original, Endpoint::Right);
        EXPECT_EQ(f.exits, alpha > 1.0 ? TriState::Yes : TriState::No) << alpha;
        FellerFunctional g = feller_limit(spec, Which::Original, Endpoint::Left);
        EXPECT_EQ(g.exits, TriState::No) << alpha;
    }
}

TEST(Scale, CevAuxiliaryDensityIsConstant) {
    // the auxiliary drift cancels exactly: flat density, affine scale
    ProblemSpec spec = parse_problem(cev_config(1.0, 0.5));
    ScaleBundle aux = build_scale(spec, Which::Auxiliary);
    double d1 = aux.density(0.5), d2 = aux.density(2.0), d3 = aux.density(17.0);
    EXPECT_NEAR(d1, d2, 1e-9 * d1);
    EXPECT_NEAR(d2, d3, 1e-9 * d2);
    EXPECT_NEAR(aux.scale(3.0) - aux.scale(2.0), d1, 1e-7 * d1);
    ASSERT_TRUE(aux.density_form(Endpoint::Right).has_value());
    EXPECT_DOUBLE_EQ(aux.density_form(Endpoint::Right)->p, 0.0);
    EXPECT_DOUBLE_EQ(aux.density_form(Endpoint::Right)->a, 0.0);
}

TEST(Scale, CevAuxiliaryExitAtZeroIffBetaBelowOne) {
    for (double beta : {-0.5, 0.5, 1.0, 1.5}) {
        ProblemSpec spec = parse_problem(cev_config(0.0, beta));
        ScaleBundle aux = build_scale(spec, Which::Auxiliary);
        FellerFunctional f = feller_limit_on(aux, Endpoint::Left);
        EXPECT_EQ(f.exits, beta < 1.0 ? TriState::Yes : TriState::No) << "beta=" << beta;
        // the auxiliary diffusion never exits at +inf (affine scale)
        FellerFunctional g = feller_limit_on(aux, Endpoint::Right);
        EXPECT_EQ(g.exits, TriState::No) << "beta=" << beta;
    }
}

TEST(Scale, DriftlessLinearSigmaNeverExits) {
    // dY = Y dW on (0,inf): no exit at either endpoint
    ProblemSpec spec = parse_problem(
        "J=(0,inf); x0=1; mu=0; sigma=x; b=0;"
        "asym left sigma C=1 p=1; asym right sigma C=1 p=1");
    for (Endpoint e : {Endpoint::Left, Endpoint::Right}) {
        FellerFunctional f = feller_limit(spec, Which::Original, e);
        EXPECT_EQ(f.exits, TriState::No) << to_string(e);
    }
}

TEST(Scale, EquivalentRoutesAgreeAcrossBattery) {
    // Feller's limit and the scale-form condition decide the same exits
    // wherever both are conclusive.
    for (const auto& entry : scale_battery()) {
        ProblemSpec spec = parse_problem(entry.config);
        for (Which w : {Which::Original, Which::Auxiliary}) {
            ScaleBundle b = build_scale(spec, w);
            for (Endpoint e : {Endpoint::Left, Endpoint::Right}) {
                FellerFunctional f = feller_limit_on(b, e);
                if (f.v_route != TriState::Unknown && f.s_route != TriState::Unknown)
                    EXPECT_EQ(f.v_route, f.s_route)
                        << entry.name << " " << to_string(w) << " " << to_string(e);
                EXPECT_NE(f.exits, TriState::Unknown)
                    << entry.name << " " << to_string(w) << " " << to_string(e);
            }
        }
    }
}

TEST(Scale, ReferencePointInvariance) {
    // moving c shifts s by a constant and rescales the density by a
    // positive constant; all endpoint verdicts stay put
    std::string base = eaa1_config(2.0);
    ProblemSpec s1 = parse_problem(base);
    ProblemSpec s2 = parse_problem(base + "c = 0.7\n");
    ScaleBundle b1 = build_scale(s1, Which::Auxiliary);
    ScaleBundle b2 = build_scale(s2, Which::Auxiliary);
    double ratio = b2.density(0.2) / b1.density(0.2);
    for (double x : {-1.0, 0.1, 0.5, 1.3}) {
        EXPECT_NEAR(b2.density(x) / b1.density(x), ratio, 1e-8 * ratio);
    }
    double shift = b2.scale(0.2) - ratio * b1.scale(0.2);
    for (double x : {-1.0, 0.5, 1.3}) {
        EXPECT_NEAR(b2.scale(x), ratio * b1.scale(x) + shift, 1e-6 * (1 + std::abs(shift)));
    }
    for (Endpoint e : {Endpoint::Left, Endpoint::Right}) {
        EXPECT_EQ(b1.s_limit_finite(e), b2.s_limit_finite(e));
        EXPECT_EQ(feller_limit_on(b1, e).exits, feller_limit_on(b2, e).exits);
    }
}

TEST(Scale, GoodnessTailConditionEaa1) {
    // right endpoint good iff alpha > 3
    for (double alpha : {2.0, 3.0, 3.5, 4.0}) {
        ProblemSpec spec = parse_problem(eaa1_config(alpha));
        ScaleBundle orig = build_scale(spec, Which::Original);
        EndpointWeight w = b_squared_weight(spec, Endpoint::Right);
        RouteResult rr = endpoint_tail_condition(orig, Endpoint::Right, w, {});
        EXPECT_EQ(rr.holds, alpha > 3.0 ? TriState::Yes : TriState::No)
            << alpha << " " << rr.note;
    }
}

}  // namespace
}  // namespace stricttest
