#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stricttest/asymp.hpp"
#include "stricttest/expr.hpp"

namespace stricttest {

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& m) : std::runtime_error(m) {}
};

// Declared endpoint behaviour of one coefficient, in the local frame of
// that endpoint (u = |x| toward an infinite endpoint, u = distance to a
// finite one).  Absent means the analytic route is unavailable there.
struct EndpointAsymptotics {
    std::optional<AsymptoticForm> mu, sigma, b;
    std::optional<AsymptoticForm> mu2, sigma2;  // second SDE of a pair
};

// One-dimensional SDE problem on J = (l, r):
//   dY = mu(Y) dt + sigma(Y) dW,  Y_0 = x0,
// with the exponent coefficient b for the stochastic exponential of
// int b(Y) dW.  A second drift/diffusion pair may ride along for the
// two-SDE comparison commands.
struct ProblemSpec {
    double l = -std::numeric_limits<double>::infinity();
    double r = std::numeric_limits<double>::infinity();
    double x0 = 0.0;
    double c = 0.0;  // reference point for scale integrals
    ExprPtr mu, sigma, b;
    ExprPtr mu2, sigma2;  // optional second SDE
    EndpointAsymptotics asym_left, asym_right;
    std::map<std::string, double> params;

    bool has_pair() const { return mu2 != nullptr; }

    bool left_infinite() const { return std::isinf(l); }
    bool right_infinite() const { return std::isinf(r); }
    Frame frame_left() const { return left_infinite() ? Frame::ToInfinity : Frame::ToZero; }
    Frame frame_right() const { return right_infinite() ? Frame::ToInfinity : Frame::ToZero; }
};

// Parses the line-oriented configuration grammar:
//   interval = (L, R)         L, R real literals or -inf / inf
//   x0 = <const-expr>
//   c = <const-expr>          optional reference point (default x0)
//   param <name> = <const-expr>
//   mu = <expr>   sigma = <expr>   b = <expr>
//   mu2 = <expr>  sigma2 = <expr>  (second SDE, comparison commands)
//   asym <left|right> <mu|sigma|b> C=.. [a=..] [gamma=..] [p=..] [q=..]
//   asym2 <left|right> <mu|sigma> ...
// `#` starts a comment; statements may also be separated by `;`.
// Asymptotic fields accept bound parameters so that sweeps stay
// consistent with the declared endpoint behaviour.
ProblemSpec parse_problem(const std::string& text);

// Re-binds named parameters and re-parses coefficient expressions; used
// by sweeps.  Throws ValidationError on unknown names.
ProblemSpec rebind_params(const std::string& text, const std::map<std::string, double>& override);

std::string print_problem(const ProblemSpec& spec);

// Deterministic dense probe grid: 512 Chebyshev points per compact
// interval [l+d_k, r-d_k] over a geometric ladder of margins d_k,
// constructed in the arctan coordinate.
std::vector<double> probe_grid(const ProblemSpec& spec, int points_per_level = 512,
                               int levels = 7);

// True iff b vanishes on the probe grid and no declared asymptotic of b
// contradicts it.
bool is_b_zero_ae(const ProblemSpec& spec);

}  // namespace stricttest
