#include "stricttest/asymp.hpp"

#include <cmath>
#include <sstream>

namespace stricttest {

namespace {

Slack worse(Slack a, Slack b) { return (int)a > (int)b ? a : b; }

// True when the exponential factor actually tends to 0 or infinity in
// this frame (rather than to 1).
bool exp_active(Frame f, double gamma) {
    return f == Frame::ToInfinity ? gamma > 0.0 : gamma < 0.0;
}

// Growth strength of the exponent term a*u^gamma: larger |gamma| in the
// direction of the frame limit means faster scale.
double exp_scale(Frame f, double gamma) {
    return f == Frame::ToInfinity ? gamma : -gamma;
}

}  // namespace

AsymptoticForm AsymptoticForm::zero(Frame f) {
    AsymptoticForm z;
    z.frame = f;
    return z;
}

AsymptoticForm AsymptoticForm::make(Frame f, double C, double a, double gamma, double p, double q,
                                    Slack s) {
    AsymptoticForm r;
    r.frame = f;
    r.C = C;
    r.slack = s;
    if (C == 0.0) return r;  // zero form: all other fields stay 0
    if (a != 0.0 && exp_active(f, gamma)) {
        r.a = a;
        r.gamma = gamma;
    } else if (a != 0.0 && gamma == 0.0) {
        r.C *= std::exp(a);  // exp(a) is just a constant
    }
    // otherwise the exponential tends to 1 and is absorbed at leading order
    r.p = p;
    r.q = q;
    return r;
}

std::string AsymptoticForm::str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    os << C;
    if (a != 0.0) os << "*exp(" << a << "*u^" << gamma << ")";
    if (p != 0.0) os << "*u^" << p;
    if (q != 0.0) os << "*L^" << q;
    os << (frame == Frame::ToInfinity ? " [u->inf]" : " [u->0+]");
    if (slack == Slack::SubPower) os << " (sub-power slack)";
    if (slack == Slack::SuperPower) os << " (super-power slack)";
    return os.str();
}

bool same_shape(const AsymptoticForm& f, const AsymptoticForm& g) {
    return f.frame == g.frame && f.a == g.a && f.gamma == g.gamma && f.p == g.p && f.q == g.q;
}

AsymptoticForm mul(const AsymptoticForm& f, const AsymptoticForm& g) {
    if (f.frame != g.frame) throw FormError("mul: mixed frames");
    if (f.is_zero() || g.is_zero()) return AsymptoticForm::zero(f.frame);
    Slack s = worse(f.slack, g.slack);
    double a = 0.0, gamma = 0.0;
    if (f.a != 0.0 && g.a != 0.0) {
        if (f.gamma == g.gamma) {
            a = f.a + g.a;
            gamma = f.gamma;
            if (a == 0.0) {
                gamma = 0.0;
                // Exact cancellation of the exponential scale: the power-log
                // residue is only meaningful if neither factor had already
                // dropped a super-polynomial term.
                if (s == Slack::SuperPower)
                    throw FormError("mul: exponential cancellation with untrusted residue");
            }
        } else {
            // The faster exponential dominates; the slower one is dropped,
            // which taints everything below the exponential scale.
            const AsymptoticForm& dom =
                exp_scale(f.frame, f.gamma) > exp_scale(g.frame, g.gamma) ? f : g;
            a = dom.a;
            gamma = dom.gamma;
            s = Slack::SuperPower;
        }
    } else if (f.a != 0.0) {
        a = f.a;
        gamma = f.gamma;
    } else if (g.a != 0.0) {
        a = g.a;
        gamma = g.gamma;
    }
    return AsymptoticForm::make(f.frame, f.C * g.C, a, gamma, f.p + g.p, f.q + g.q, s);
}

AsymptoticForm inverse(const AsymptoticForm& f) {
    if (f.is_zero()) throw FormError("inverse of zero form");
    return AsymptoticForm::make(f.frame, 1.0 / f.C, -f.a, f.gamma, -f.p, -f.q, f.slack);
}

AsymptoticForm squared(const AsymptoticForm& f) { return mul(f, f); }

namespace {

// Total order on growth as u approaches the frame limit.
// Returns +1 if f grows strictly faster than g, -1 if slower, 0 if the
// shapes coincide.
int compare_growth(const AsymptoticForm& f, const AsymptoticForm& g) {
    auto key = [](const AsymptoticForm& h) {
        // exponential tier: a*u^gamma with active gamma
        double scale = h.a != 0.0 ? exp_scale(h.frame, h.gamma) : 0.0;
        double coeff = h.a;
        return std::tuple<double, double, double, double>(scale, coeff, h.p, h.q);
    };
    auto [sf, af, pf, qf] = key(f);
    auto [sg, ag, pg, qg] = key(g);
    // Exponential comparison: a growing exp beats everything, a decaying
    // exp loses to everything; among exps the bigger scale wins when the
    // coefficients pull the same way.
    bool f_exp = f.a != 0.0, g_exp = g.a != 0.0;
    if (f_exp || g_exp) {
        double ef = f_exp ? (af > 0 ? sf : -sf) : 0.0;  // signed "speed away from poly"
        double eg = g_exp ? (ag > 0 ? sg : -sg) : 0.0;
        if (ef != eg) return ef > eg ? 1 : -1;
        // same signed speed tier
        if (f_exp && g_exp && sf == sg) {
            if (af != ag) return af > ag ? 1 : -1;
        } else if (f_exp != g_exp) {
            // one has an exp factor of exactly zero signed speed: impossible
            // (active gamma implies nonzero scale), keep comparing powers
        }
    }
    if (f.frame == Frame::ToInfinity) {
        if (pf != pg) return pf > pg ? 1 : -1;
    } else {
        if (pf != pg) return pf < pg ? 1 : -1;  // smaller power blows up at 0+
    }
    if (qf != qg) return qf > qg ? 1 : -1;
    return 0;
}

}  // namespace

AsymptoticForm add(const AsymptoticForm& f, const AsymptoticForm& g,
                   const std::function<bool()>& on_cancel) {
    if (f.frame != g.frame) throw FormError("add: mixed frames");
    if (f.is_zero()) return g;
    if (g.is_zero()) return f;
    int cmp = compare_growth(f, g);
    if (cmp > 0) return f;
    if (cmp < 0) return g;
    // same shape: constants add
    double C = f.C + g.C;
    Slack s = worse(f.slack, g.slack);
    if (std::abs(C) <= 1e-12 * std::max(std::abs(f.C), std::abs(g.C))) {
        // Leading terms cancel.  The sum is then governed by terms this
        // algebra does not carry, so the caller must certify that the
        // cancellation is exact (the true sum vanishes identically).
        if (on_cancel && on_cancel()) return AsymptoticForm::zero(f.frame);
        throw FormError("add: leading-order cancellation of " + f.str() + " and " + g.str());
    }
    return AsymptoticForm::make(f.frame, C, f.a, f.gamma, f.p, f.q, s);
}

ConvergenceVerdict decide_convergence(const AsymptoticForm& f) {
    if (f.is_zero()) return ConvergenceVerdict::Converges;
    if (f.a != 0.0) {
        // Active exponential decides regardless of slack.
        return f.a < 0.0 ? ConvergenceVerdict::Converges : ConvergenceVerdict::Diverges;
    }
    if (f.slack == Slack::SuperPower)
        throw FormError("convergence undecidable: power scale untrusted for " + f.str());
    bool at_inf = f.frame == Frame::ToInfinity;
    // int^inf u^p L^q du: converges iff p < -1, or p == -1 and q < -1.
    // int_0 u^p L^q du:   converges iff p > -1, or p == -1 and q < -1.
    if (f.p != -1.0) {
        bool conv = at_inf ? f.p < -1.0 : f.p > -1.0;
        return conv ? ConvergenceVerdict::Converges : ConvergenceVerdict::Diverges;
    }
    if (f.slack == Slack::SubPower)
        throw FormError("convergence undecidable at p=-1 with sub-power slack: " + f.str());
    return f.q < -1.0 ? ConvergenceVerdict::Converges : ConvergenceVerdict::Diverges;
}

AsymptoticForm integrate_tail(const AsymptoticForm& f) {
    if (f.is_zero()) return f;
    if (decide_convergence(f) != ConvergenceVerdict::Converges)
        throw FormError("integrate_tail on a divergent form: " + f.str());
    if (f.a != 0.0) {
        // Laplace leading term: tail ~ f(u) * u^{1-gamma} / (|a| |gamma|).
        return AsymptoticForm::make(f.frame, f.C / (std::abs(f.a) * std::abs(f.gamma)), f.a,
                                    f.gamma, f.p - f.gamma + 1.0, f.q, f.slack);
    }
    if (f.p != -1.0) {
        return AsymptoticForm::make(f.frame, f.C / std::abs(f.p + 1.0), 0.0, 0.0, f.p + 1.0, f.q,
                                    f.slack);
    }
    // p == -1, q < -1: tail ~ C/|q+1| * L^{q+1}
    return AsymptoticForm::make(f.frame, f.C / std::abs(f.q + 1.0), 0.0, 0.0, 0.0, f.q + 1.0,
                                f.slack);
}

Antiderivative antiderivative(const AsymptoticForm& f) {
    Antiderivative out;
    if (f.is_zero()) {
        out.finite_limit = true;
        return out;
    }
    if (decide_convergence(f) == ConvergenceVerdict::Converges) {
        out.finite_limit = true;
        return out;
    }
    out.finite_limit = false;
    if (f.a != 0.0) {
        // a > 0 here (a < 0 converges): F ~ f(u) u^{1-gamma} / (a |gamma|).
        out.growth = AsymptoticForm::make(f.frame, f.C / (f.a * std::abs(f.gamma)), f.a, f.gamma,
                                          f.p - f.gamma + 1.0, f.q, f.slack);
        return out;
    }
    if (f.slack == Slack::SuperPower) throw FormError("antiderivative: untrusted power scale");
    if (f.p == -1.0 && f.slack != Slack::Exact)
        throw FormError("antiderivative at p=-1 with slack");
    if (f.p != -1.0) {
        // Divergent power growth: u^{p+1} (p > -1 toward infinity, p < -1
        // toward a finite endpoint).
        out.growth = AsymptoticForm::make(f.frame, f.C / std::abs(f.p + 1.0), 0.0, 0.0, f.p + 1.0,
                                          f.q, f.slack);
        return out;
    }
    if (f.q == -1.0) throw FormError("antiderivative outside the algebra (log-log growth)");
    // p == -1, q > -1: F ~ C/(q+1) * L^{q+1}
    out.growth =
        AsymptoticForm::make(f.frame, f.C / (f.q + 1.0), 0.0, 0.0, 0.0, f.q + 1.0, f.slack);
    return out;
}

AsymptoticForm exp_of_antiderivative(const AsymptoticForm& integrand, double sign) {
    Frame fr = integrand.frame;
    if (integrand.is_zero()) return AsymptoticForm::make(fr, 1.0);
    Antiderivative F = antiderivative(integrand);
    if (F.finite_limit) {
        // exp of a finite limit: a positive constant whose value the
        // algebra does not track (decisions never consume it).
        return AsymptoticForm::make(fr, 1.0);
    }
    const AsymptoticForm& g = F.growth;
    if (g.a != 0.0) throw FormError("exp of exponentially growing antiderivative");
    double k = sign * g.C;
    if (g.p != 0.0) {
        if (g.q != 0.0) throw FormError("exp of mixed power-log antiderivative");
        // exp(k * u^m): representable when the factor is active in this frame.
        if (!exp_active(fr, g.p))
            throw FormError("exp antiderivative inactive in frame (internal)");
        return AsymptoticForm::make(fr, 1.0, k, g.p, 0.0, 0.0, g.slack);
    }
    // Pure log-power growth F ~ c * L^j.
    if (g.q == 1.0) {
        // exp(k L): L = log u toward infinity, -log u toward zero.
        double p = fr == Frame::ToInfinity ? k : -k;
        return AsymptoticForm::make(fr, 1.0, 0.0, 0.0, p, 0.0, g.slack);
    }
    if (g.q > 0.0 && g.q < 1.0) {
        // exp(k L^j), 0 < j < 1: a u^{o(1)} factor.
        return AsymptoticForm::make(fr, 1.0, 0.0, 0.0, 0.0, 0.0, Slack::SubPower);
    }
    throw FormError("exp of L^" + std::to_string(g.q) + " growth outside the algebra");
}

}  // namespace stricttest
