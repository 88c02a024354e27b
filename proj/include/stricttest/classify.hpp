#pragma once

#include <string>
#include <vector>

#include "stricttest/scale.hpp"

namespace stricttest {

// Per-endpoint summary: whether each diffusion can exit there, whether
// the endpoint is good (the b^2-weighted tail condition), and the
// finiteness of both scale limits, with the evidence trail.
struct EndpointReport {
    Endpoint endpoint = Endpoint::Right;
    TriState y_exits = TriState::Unknown;
    TriState ytilde_exits = TriState::Unknown;
    TriState good = TriState::Unknown;
    TriState s_limit_finite = TriState::Unknown;
    TriState stilde_limit_finite = TriState::Unknown;
    // the two equivalent goodness routes (original and auxiliary scale)
    TriState good_direct = TriState::Unknown;
    TriState good_aux = TriState::Unknown;
    Evidence evidence;
};

enum class Verdict {
    StrictLocalMartingale,
    MartingaleNotUI,
    UniformlyIntegrableMartingale,
    Unknown,
};

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::StrictLocalMartingale: return "StrictLocalMartingale";
        case Verdict::MartingaleNotUI: return "MartingaleNotUI";
        case Verdict::UniformlyIntegrableMartingale: return "UniformlyIntegrableMartingale";
        default: return "Unknown";
    }
}

struct Classification {
    TriState martingale_all_T = TriState::Unknown;  // martingale on every [0, T]
    TriState ui_martingale = TriState::Unknown;
    Verdict verdict = Verdict::Unknown;
    std::vector<std::string> triggered;  // conclusive conditions among (a)-(d), (A)-(D)
    EndpointReport left, right;
};

struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& m) : std::runtime_error(m) {}
};

// Shares the two scale bundles across the per-endpoint analyses of one
// problem; cheap to construct, reusable across the classify operations.
class Analyzer {
public:
    Analyzer(const ProblemSpec& spec, const ScaleOptions& opt = {});

    EndpointReport endpoint_report(Endpoint e) const;

    // Martingale test: (a) the auxiliary diffusion does not exit right,
    // or (b) right is good; and (c) it does not exit left, or (d) left
    // is good.  Uniform integrability: b vanishing, or a good endpoint
    // paired with the opposite auxiliary scale limit infinite, or both
    // endpoints good.
    Classification classify_martingale() const;

    // Shortcut valid only when the original diffusion provably does not
    // exit: the exponential is a martingale iff the auxiliary diffusion
    // does not exit either.  Throws PreconditionError otherwise.
    Classification classify_no_exit() const;

    const ScaleBundle& original() const { return orig_; }
    const ScaleBundle& auxiliary() const { return aux_; }
    const ProblemSpec& spec() const { return spec_; }

private:
    ProblemSpec spec_;
    ScaleOptions opt_;
    ScaleBundle orig_, aux_;
    bool b_zero_;
};

Classification classify_martingale(const ProblemSpec& spec, const ScaleOptions& opt = {});
Classification classify_no_exit(const ProblemSpec& spec, const ScaleOptions& opt = {});
EndpointReport endpoint_report(const ProblemSpec& spec, Endpoint e, const ScaleOptions& opt = {});

}  // namespace stricttest
