#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace stricttest {

// Leading-order forms  C * exp(a * u^gamma) * u^p * L(u)^q  in a local
// endpoint variable u, where L(u) = |log u|.  Two frames:
//   ToInfinity: u -> infinity  (u = x at +inf, u = -x at -inf)
//   ToZero:     u -> 0+        (u = r - x or x - l at a finite endpoint)
// The exponential factor is meaningful when it actually moves:
// gamma > 0 in the ToInfinity frame, gamma < 0 in the ToZero frame
// (exp(a/u^m) essential singularities).  A factor whose exponent tends
// to 0 is normalized away.
//
// `slack` records what was dropped when forms were combined:
//   Exact      - trusted at leading order including the log exponent;
//   SubPower   - correct up to an unknown u^{o(1)} factor (decisions at
//                p == -1 exactly become inconclusive);
//   SuperPower - only the exponential factor is trusted.

enum class Frame { ToInfinity, ToZero };

enum class Slack { Exact, SubPower, SuperPower };

enum class ConvergenceVerdict { Converges, Diverges };

// Raised when a combination leaves the representable family (doubly
// exponential factors, log-log antiderivatives, ambiguous cancellation).
struct FormError : std::runtime_error {
    explicit FormError(const std::string& m) : std::runtime_error(m) {}
};

struct AsymptoticForm {
    double C = 0.0;
    double a = 0.0;
    double gamma = 0.0;
    double p = 0.0;
    double q = 0.0;
    Frame frame = Frame::ToInfinity;
    Slack slack = Slack::Exact;

    bool is_zero() const { return C == 0.0; }

    static AsymptoticForm zero(Frame f);
    static AsymptoticForm make(Frame f, double C, double a = 0.0, double gamma = 0.0,
                               double p = 0.0, double q = 0.0, Slack s = Slack::Exact);

    std::string str() const;
};

bool same_shape(const AsymptoticForm& f, const AsymptoticForm& g);

// Product of forms in the same frame.  Exponentials with matching gamma
// add their coefficients; with differing gamma the dominant one is kept
// and the result is downgraded to SuperPower slack.
AsymptoticForm mul(const AsymptoticForm& f, const AsymptoticForm& g);

AsymptoticForm inverse(const AsymptoticForm& f);
AsymptoticForm squared(const AsymptoticForm& f);

// Sum at leading order.  If the leading terms cancel exactly the `on_cancel`
// callback (when provided) must confirm that the true sum vanishes;
// otherwise the sum is not determined at this order and FormError is thrown.
AsymptoticForm add(const AsymptoticForm& f, const AsymptoticForm& g,
                   const std::function<bool()>& on_cancel = nullptr);

// Convergence of the integral of |f| over a one-sided neighbourhood of
// the endpoint (the L^1_loc membership test at the endpoint).
ConvergenceVerdict decide_convergence(const AsymptoticForm& f);

// Leading-order form of the tail integral collecting the mass adjacent
// to the endpoint (int_x^inf in the ToInfinity frame, int_0^u in the
// ToZero frame).  Precondition: decide_convergence(f) == Converges.
AsymptoticForm integrate_tail(const AsymptoticForm& f);

// Antiderivative from a fixed interior point toward the endpoint.
// Either tends to a finite limit or grows with a representable form.
struct Antiderivative {
    bool finite_limit = false;
    AsymptoticForm growth;  // valid when !finite_limit
};
Antiderivative antiderivative(const AsymptoticForm& f);

// Form of exp(sign * F) where F is the antiderivative of `integrand`
// toward the endpoint; the composition rule behind the scale densities.
// Pure-power growth of F yields an exponential form, logarithmic growth
// a power, a finite limit a constant.
AsymptoticForm exp_of_antiderivative(const AsymptoticForm& integrand, double sign);

}  // namespace stricttest
