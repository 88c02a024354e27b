#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace stricttest {

using RealFn = std::function<double(double)>;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Tri-state result of an improper integral.  Finite carries the value
// and an error bound; Divergent is declared only on sustained monotone
// growth of the partial sums; everything else stays Inconclusive with
// the probe trace attached.
struct IntegralVerdict {
    enum class Tag { Finite, Divergent, Inconclusive };
    Tag tag = Tag::Inconclusive;
    double value = 0.0;
    double abs_err = 0.0;
    std::string report;

    bool finite() const { return tag == Tag::Finite; }
    bool divergent() const { return tag == Tag::Divergent; }
    bool inconclusive() const { return tag == Tag::Inconclusive; }

    static IntegralVerdict finite_v(double v, double e) {
        return {Tag::Finite, v, e, ""};
    }
    static IntegralVerdict divergent_v(std::string why = "") {
        return {Tag::Divergent, 0.0, 0.0, std::move(why)};
    }
    static IntegralVerdict inconclusive_v(std::string why = "") {
        return {Tag::Inconclusive, 0.0, 0.0, std::move(why)};
    }
    const char* tag_name() const {
        switch (tag) {
            case Tag::Finite: return "finite";
            case Tag::Divergent: return "divergent";
            default: return "inconclusive";
        }
    }
};

struct EvaluationError : std::runtime_error {
    EvaluationError(const std::string& what, double x)
        : std::runtime_error(what + " at x=" + std::to_string(x)), abscissa(x) {}
    double abscissa;
};

struct QuadOptions {
    double tol = 1e-9;        // absolute tolerance for Finite verdicts
    int ladder_depth = 60;    // rungs per improper endpoint
    double ladder_ratio = 0.6;  // geometric factor in the arctan coordinate
    int growth_rungs = 6;     // sustained-growth window for Divergent
    double growth_factor = 1.05;
};

// Adaptive Gauss-Kronrod (G7,K15) on a proper interval.  Endpoints are
// never evaluated (the nodes are interior).
double gk_integrate(const RealFn& f, double a, double b, double tol, double* err_out = nullptr);

// Improper integral over (lo, hi); either endpoint may be infinite or a
// singularity of f.  Endpoint mass is collected over a geometric ladder
// in the arctan coordinate.
IntegralVerdict integrate(const RealFn& f, double lo, double hi, double tol = 1e-9,
                          const QuadOptions& opt = {});

enum class Side { Left, Right };

// One-sided integrability probe toward `endpoint` starting from `from`:
// classifies int f over the approach as Finite / Divergent / Inconclusive
// by fitting the decay of per-rung increments.
IntegralVerdict probe_tail(const RealFn& f, double from, double endpoint, Side side,
                           const QuadOptions& opt = {});

// Same classification applied to an externally computed sequence of
// nonnegative per-rung masses along a geometric ladder.
IntegralVerdict classify_mass_sequence(const std::vector<double>& inc,
                                       const QuadOptions& opt = {});

// Signed cumulative integral x -> int_anchor^x f with a reusable node
// cache.  The cache is seeded eagerly on construction; value() bridges
// from the nearest node without mutating shared state.
class CumulativeIntegral {
public:
    CumulativeIntegral(RealFn f, double anchor, double lo, double hi, double tol = 1e-10,
                       int seed_nodes_per_side = 192);
    double value(double x) const;
    double anchor() const { return anchor_; }

private:
    RealFn f_;
    double anchor_, lo_, hi_, tol_;
    std::vector<std::pair<double, double>> nodes_;  // (x, int_anchor^x)
};

// log of int_anchor^x exp(g(y)) w(y) dy for positive weight w, bridged
// in log space so that wildly scaled densities neither overflow nor
// underflow.  Direction is fixed at construction (anchor toward `toward`).
class LogCumulative {
public:
    LogCumulative(RealFn g, RealFn w, double anchor, double toward, double rel_tol = 1e-10,
                  int seed_nodes = 192);
    // log integral from anchor to x (x must lie between anchor and `toward`).
    double log_value(double x) const;

private:
    RealFn g_, w_;
    double anchor_, toward_;
    double rel_tol_;
    std::vector<std::pair<double, double>> nodes_;  // (x, log int)
    double log_panel(double a, double b) const;
};

// log of int_a^b exp(g(y)) w(y) dy for nonnegative w, computed with
// per-panel rescaling so extreme densities stay representable.
double log_integrate(const RealFn& g, const RealFn& w, double a, double b,
                     double rel_tol = 1e-10);

// Maps between x-space and the compactified arctan coordinate used for
// ladders and grids.
inline double to_t(double x) { return std::atan(x); }
inline double from_t(double t) { return std::tan(t); }

// Geometric ladder of points approaching `endpoint` from `from` in the
// arctan coordinate; returns strictly monotone x values, nearest last.
std::vector<double> endpoint_ladder(double from, double endpoint, int depth, double ratio);

double logaddexp(double a, double b);

}  // namespace stricttest
