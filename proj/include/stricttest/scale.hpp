#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stricttest/config.hpp"
#include "stricttest/quad.hpp"
#include "stricttest/tristate.hpp"

namespace stricttest {

enum class Which { Original, Auxiliary };
enum class Endpoint { Left, Right };

inline const char* to_string(Endpoint e) { return e == Endpoint::Left ? "left" : "right"; }
inline const char* to_string(Which w) { return w == Which::Original ? "original" : "auxiliary"; }

// Evidence trail: (condition id, verdict text) pairs collected by every
// endpoint decision so reports can cite what fired.
using Evidence = std::vector<std::pair<std::string, std::string>>;

struct ScaleOptions {
    bool cross_check = true;   // run quadrature against conclusive analytic verdicts
    bool numeric_fallback = true;  // let quadrature decide when forms are missing
    QuadOptions quad;
};

// Scale data of one diffusion: density rho = exp(-int_c 2 mu/sigma^2)
// (the auxiliary flavour folds in exp(-int_c 2 b/sigma)), the scale
// function s with s(c) = 0, endpoint limits of s, and the derived
// density forms at each endpoint.
class ScaleBundle {
public:
    Which which;
    double l, r, c;

    double density(double x) const { return std::exp(-exponent_value(x)); }
    double log_density(double x) const { return -exponent_value(x); }
    double scale(double x) const;  // s(x), strictly increasing, s(c) = 0

    const IntegralVerdict& s_limit(Endpoint e) const { return e == Endpoint::Left ? s_l_ : s_r_; }
    TriState s_limit_finite(Endpoint e) const;

    const std::optional<AsymptoticForm>& density_form(Endpoint e) const {
        return e == Endpoint::Left ? form_l_ : form_r_;
    }
    const std::optional<AsymptoticForm>& sigma2_form(Endpoint e) const {
        return e == Endpoint::Left ? sig2_l_ : sig2_r_;
    }

    double endpoint(Endpoint e) const { return e == Endpoint::Left ? l : r; }
    Frame frame(Endpoint e) const;

    // --- numeric endpoint machinery (lazy, immutable once built) ---------
    // Scale-free ratios evaluated through local ladder recurrences:
    //   tau(y) = (int over [y, e] of rho) / rho(y)
    //   nu(z)  = rho(z) * |m(z)|  (the v-functional integrand)
    // Both avoid global exponent arithmetic entirely.
    double tau(Endpoint e, double y) const;
    double nu(Endpoint e, double z) const;
    bool tau_available(Endpoint e) const;

    double exponent_value(double x) const;
    double sigma2(double x) const;
    double sigma_value(double x) const;

    struct Impl;
    std::shared_ptr<Impl> impl;

private:
    friend ScaleBundle build_scale(const ProblemSpec&, Which, const ScaleOptions&);
    IntegralVerdict s_l_, s_r_;
    std::optional<AsymptoticForm> form_l_, form_r_;
    std::optional<AsymptoticForm> sig2_l_, sig2_r_;
};

ScaleBundle build_scale(const ProblemSpec& spec, Which which, const ScaleOptions& opt = {});

// Weight attached to the second clause of an endpoint test: the
// integrand is (|s(e) - s| * w) / (rho sigma^2).
struct EndpointWeight {
    RealFn fn;  // nonnegative
    std::optional<AsymptoticForm> form;  // in the endpoint's frame
    std::string name;
};

EndpointWeight unit_weight(const ScaleBundle& b, Endpoint e);

struct RouteResult {
    TriState holds = TriState::Unknown;
    std::string note;
};

// Second-clause membership test at the endpoint: requires the s-limit
// finite there and the weighted tail integrand locally integrable.
// Decided analytically from forms when available (authoritative),
// cross-checked / decided by quadrature per options.
RouteResult endpoint_tail_condition(const ScaleBundle& b, Endpoint e, const EndpointWeight& w,
                                    const ScaleOptions& opt, Evidence* ev = nullptr);

// Feller exit test at the endpoint, run through BOTH equivalent routes
// (the v-functional limit and the scale-form condition); conclusive
// routes must agree or the result degrades to Unknown.
struct FellerFunctional {
    Endpoint endpoint;
    IntegralVerdict v_limit;  // verdict of the v-functional at e
    TriState exits = TriState::Unknown;
    TriState v_route = TriState::Unknown;  // exit flag per the v-functional
    TriState s_route = TriState::Unknown;  // exit flag per the scale-form condition
    Evidence evidence;
};

FellerFunctional feller_limit_on(const ScaleBundle& b, Endpoint e, const ScaleOptions& opt = {});
FellerFunctional feller_limit(const ProblemSpec& spec, Which which, Endpoint e,
                              const ScaleOptions& opt = {});

// Derived endpoint weight b^2 (for the goodness tests) and the squared
// drift mismatch (for the separating-time tests).
EndpointWeight b_squared_weight(const ProblemSpec& spec, Endpoint e);

}  // namespace stricttest
