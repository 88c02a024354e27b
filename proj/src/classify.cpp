#include "stricttest/classify.hpp"

#include <sstream>

namespace stricttest {

Analyzer::Analyzer(const ProblemSpec& spec, const ScaleOptions& opt)
    : spec_(spec),
      opt_(opt),
      orig_(build_scale(spec, Which::Original, opt)),
      aux_(build_scale(spec, Which::Auxiliary, opt)),
      b_zero_(is_b_zero_ae(spec)) {}

EndpointReport Analyzer::endpoint_report(Endpoint e) const {
    EndpointReport rep;
    rep.endpoint = e;
    rep.s_limit_finite = orig_.s_limit_finite(e);
    rep.stilde_limit_finite = aux_.s_limit_finite(e);

    FellerFunctional fy = feller_limit_on(orig_, e, opt_);
    FellerFunctional fyt = feller_limit_on(aux_, e, opt_);
    rep.y_exits = fy.exits;
    rep.ytilde_exits = fyt.exits;
    for (auto& item : fy.evidence) rep.evidence.push_back(std::move(item));
    for (auto& item : fyt.evidence) rep.evidence.push_back(std::move(item));

    // Goodness through both equivalent routes: the b^2-weighted tail
    // condition on the original scale and on the auxiliary scale.
    EndpointWeight w = b_squared_weight(spec_, e);
    RouteResult direct = endpoint_tail_condition(orig_, e, w, opt_, &rep.evidence);
    RouteResult through_aux = endpoint_tail_condition(aux_, e, w, opt_, &rep.evidence);
    rep.good_direct = direct.holds;
    rep.good_aux = through_aux.holds;
    if (direct.holds != TriState::Unknown && through_aux.holds != TriState::Unknown &&
        direct.holds != through_aux.holds) {
        rep.good = TriState::Unknown;
        rep.evidence.emplace_back("good@" + std::string(to_string(e)),
                                  "conclusive disagreement between the two goodness routes");
    } else {
        rep.good = direct.holds != TriState::Unknown ? direct.holds : through_aux.holds;
    }

    // An endpoint at which exactly one of the two diffusions exits is bad.
    if (rep.y_exits != TriState::Unknown && rep.ytilde_exits != TriState::Unknown &&
        rep.y_exits != rep.ytilde_exits) {
        if (rep.good == TriState::Yes) {
            rep.evidence.emplace_back("good@" + std::string(to_string(e)),
                                      "exit flags differ yet tests claim good; degraded to unknown");
            rep.good = TriState::Unknown;
        } else {
            rep.good = TriState::No;
            rep.evidence.emplace_back("good@" + std::string(to_string(e)),
                                      "bad: exactly one of the diffusions exits here");
        }
    }
    return rep;
}

Classification Analyzer::classify_martingale() const {
    Classification cls;
    cls.right = endpoint_report(Endpoint::Right);
    cls.left = endpoint_report(Endpoint::Left);

    TriState a = tri_not(cls.right.ytilde_exits);
    TriState b = cls.right.good;
    TriState c = tri_not(cls.left.ytilde_exits);
    TriState d = cls.left.good;
    cls.martingale_all_T = tri_and(tri_or(a, b), tri_or(c, d));

    TriState condA = tri_of(b_zero_);
    TriState condB = tri_and(cls.right.good, tri_not(cls.left.stilde_limit_finite));
    TriState condC = tri_and(cls.left.good, tri_not(cls.right.stilde_limit_finite));
    TriState condD = tri_and(cls.right.good, cls.left.good);
    cls.ui_martingale = tri_or(tri_or(condA, condB), tri_or(condC, condD));

    // A uniformly integrable martingale is in particular a martingale.
    if (cls.ui_martingale == TriState::Yes && cls.martingale_all_T == TriState::Unknown)
        cls.martingale_all_T = TriState::Yes;
    if (cls.ui_martingale == TriState::Yes && cls.martingale_all_T == TriState::No) {
        cls.triggered.emplace_back("inconsistent: UI yes but martingale no; degraded");
        cls.ui_martingale = TriState::Unknown;
        cls.martingale_all_T = TriState::Unknown;
    }
    if (cls.martingale_all_T == TriState::No) cls.ui_martingale = TriState::No;

    auto note = [&cls](const char* id, TriState t) {
        if (t == TriState::Yes) cls.triggered.emplace_back(id);
    };
    note("(a) auxiliary does not exit right", a);
    note("(b) right endpoint good", b);
    note("(c) auxiliary does not exit left", c);
    note("(d) left endpoint good", d);
    note("(A) b = 0 a.e.", condA);
    note("(B) right good, auxiliary scale unbounded left", condB);
    note("(C) left good, auxiliary scale unbounded right", condC);
    note("(D) both endpoints good", condD);

    if (cls.ui_martingale == TriState::Yes)
        cls.verdict = Verdict::UniformlyIntegrableMartingale;
    else if (cls.martingale_all_T == TriState::Yes && cls.ui_martingale == TriState::No)
        cls.verdict = Verdict::MartingaleNotUI;
    else if (cls.martingale_all_T == TriState::No)
        cls.verdict = Verdict::StrictLocalMartingale;
    else
        cls.verdict = Verdict::Unknown;
    return cls;
}

Classification Analyzer::classify_no_exit() const {
    EndpointReport right = endpoint_report(Endpoint::Right);
    EndpointReport left = endpoint_report(Endpoint::Left);
    if (right.y_exits != TriState::No || left.y_exits != TriState::No) {
        std::ostringstream os;
        os << "classify_no_exit requires a non-exiting diffusion, but exit flags are "
           << to_string(left.y_exits) << " (left), " << to_string(right.y_exits) << " (right)";
        throw PreconditionError(os.str());
    }
    Classification cls = classify_martingale();
    TriState no_exit_mart =
        tri_and(tri_not(right.ytilde_exits), tri_not(left.ytilde_exits));
    if (no_exit_mart != TriState::Unknown && cls.martingale_all_T != TriState::Unknown &&
        no_exit_mart != cls.martingale_all_T) {
        cls.triggered.emplace_back("inconsistent: no-exit shortcut disagrees with full test");
        cls.martingale_all_T = TriState::Unknown;
        cls.verdict = Verdict::Unknown;
    }
    return cls;
}

Classification classify_martingale(const ProblemSpec& spec, const ScaleOptions& opt) {
    return Analyzer(spec, opt).classify_martingale();
}

Classification classify_no_exit(const ProblemSpec& spec, const ScaleOptions& opt) {
    return Analyzer(spec, opt).classify_no_exit();
}

EndpointReport endpoint_report(const ProblemSpec& spec, Endpoint e, const ScaleOptions& opt) {
    return Analyzer(spec, opt).endpoint_report(e);
}

}  // namespace stricttest
