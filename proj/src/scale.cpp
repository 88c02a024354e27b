#include "stricttest/scale.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

namespace stricttest {

namespace {

// Orientation of the scale-density exponent: rho = exp(-int_c^x ...),
// which in the local endpoint variable reads exp(-F) toward the right
// endpoint and exp(+F) toward the left one.
double orientation(Endpoint e) { return e == Endpoint::Right ? -1.0 : 1.0; }

struct CoefficientForms {
    std::optional<AsymptoticForm> mu, sigma, b;
};

CoefficientForms coefficient_forms(const ProblemSpec& spec, Endpoint e) {
    const EndpointAsymptotics& ea = e == Endpoint::Left ? spec.asym_left : spec.asym_right;
    return {ea.mu, ea.sigma, ea.b};
}

}  // namespace

Frame ScaleBundle::frame(Endpoint e) const {
    double pt = endpoint(e);
    return std::isinf(pt) ? Frame::ToInfinity : Frame::ToZero;
}

// --- numeric endpoint machinery ----------------------------------------------
//
// All numeric endpoint work runs on the scale-free ratios
//   tau(y) = (int_y^e rho) / rho(y),   nu(z) = rho(z) |m(z)|,
// which satisfy ladder recurrences built from purely local pieces:
// signed exponent increments dI over each rung and rung masses of
// exp(+-(L - L(edge))).  Exponent differences never leave their rung,
// so nothing is lost to global cancellation, and saturation (exp of a
// huge increment flushing to 0 or inf) produces exactly the verdicts
// the mathematics dictates.

struct ScaleBundle::Impl {
    double l, r, c;
    CompiledExpr sigma_c;
    RealFn exponent_integrand;  // 2 mu / sigma^2 (+ 2 b / sigma for auxiliary)

    mutable std::once_flag exponent_once;
    mutable std::shared_ptr<CumulativeIntegral> exponent_lazy;

    const CumulativeIntegral& exponent_cum() const {
        std::call_once(exponent_once, [this] {
            exponent_lazy =
                std::make_shared<CumulativeIntegral>(exponent_integrand, c, l, r, 1e-11);
        });
        return *exponent_lazy;
    }

    mutable std::once_flag s_once[2];
    mutable std::shared_ptr<LogCumulative> s_cum[2];

    struct Grid {
        bool ok = false;
        bool tau_ok = false;
        std::vector<double> pts;  // ladder points from c toward the endpoint
        std::vector<double> dI;   // signed exponent increment over each rung
        std::vector<double> tau;  // tau at pts
        std::vector<double> nu;   // nu at pts
    };
    mutable std::once_flag grid_once[2];
    mutable Grid grids[2];

    double endpoint(Endpoint e) const { return e == Endpoint::Left ? l : r; }
    double log_density(double x) const { return -exponent_cum().value(x); }
    double sigma2_at(double x) const {
        double s = sigma_c(x);
        return s * s;
    }

    const LogCumulative& scale_cum(Endpoint e) const {
        int i = e == Endpoint::Left ? 0 : 1;
        std::call_once(s_once[i], [this, e, i] {
            s_cum[i] = std::make_shared<LogCumulative>(
                [this](double x) { return log_density(x); }, [](double) { return 1.0; }, c,
                endpoint(e), 1e-10);
        });
        return *s_cum[i];
    }

    // signed exponent increment int_a^b 2mu/sigma^2 (+ aux part)
    double dL(double a, double b) const {
        if (a == b) return 0.0;
        return gk_integrate(exponent_integrand, a, b, 1e-8);
    }

    // Bisect for the point w between `from` and `to` where |dL(anchor, w)|
    // first reaches `target`; the exponent mass beyond it is e^{-target}.
    double window_edge(double anchor, double from, double to, double target) const {
        double lo = from, hi = to;
        for (int it = 0; it < 40; ++it) {
            double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            if (std::abs(dL(anchor, mid)) < target)
                lo = mid;
            else
                hi = mid;
        }
        return hi;
    }

    // int over [a, b] of exp(-(L(z) - L(a))) dz, as a magnitude.  The
    // integration range is capped at the e^{-60} window of the exponent
    // so extreme rungs stay cheap.
    double rel_rho_mass(double a, double b) const {
        double D = dL(a, b);
        if (std::isnan(D)) throw EvaluationError("exponent increment NaN", a);
        if (D >= -60.0) {
            double b_eff = D > 60.0 ? window_edge(a, a, b, 60.0) : b;
            double lv = log_integrate([this, a](double z) { return -dL(a, z); },
                                      [](double) { return 1.0; }, a, b_eff, 1e-5);
            return lv > 690.0 ? kInf : std::exp(lv);
        }
        // density grows toward b: the mass sits against b, boosted e^{-D}
        double a_eff = window_edge(b, b, a, 60.0);
        double lv = log_integrate([this, b](double z) { return -dL(b, z); },
                                  [](double) { return 1.0; }, a_eff, b, 1e-5);
        double total = lv - D;
        return total > 690.0 ? kInf : std::exp(total);
    }

    // int over [a, b] of exp(L(y) - L(b)) / sigma^2 dy, as a magnitude.
    double rel_speed_mass(double a, double b) const {
        double D = dL(a, b);
        if (std::isnan(D)) throw EvaluationError("exponent increment NaN", a);
        auto inv_s2 = [this](double y) {
            double s2 = sigma2_at(y);
            return std::isnan(s2) ? s2 : 1.0 / s2;
        };
        if (D >= -60.0) {
            // exponent peaks at b (or is flat): cap the far side
            double a_eff = D > 60.0 ? window_edge(b, b, a, 60.0) : a;
            double lv = log_integrate([this, b](double y) { return -dL(y, b); }, inv_s2, a_eff, b,
                                      1e-5);
            return lv > 690.0 ? kInf : std::exp(lv);
        }
        // exponent peaks at a, boosted e^{-D} relative to b
        double b_eff = window_edge(a, a, b, 60.0);
        double lv = log_integrate([this, a](double y) { return -dL(y, a); }, inv_s2, a, b_eff,
                                  1e-5);
        double total = lv - D;
        return total > 690.0 ? kInf : std::exp(total);
    }

    const Grid& grid(Endpoint e) const {
        int i = e == Endpoint::Left ? 0 : 1;
        std::call_once(grid_once[i], [this, e, i] { build_grid(e, grids[i]); });
        return grids[i];
    }

    void build_grid(Endpoint e, Grid& g) const {
        g.pts = endpoint_ladder(c, endpoint(e), 72, 0.6);
        std::size_t n = g.pts.size();
        if (n < 12) return;
        std::vector<double> m_loc(n - 1), spd_loc(n - 1);
        g.dI.assign(n - 1, 0.0);
        try {
            const double eps = std::numeric_limits<double>::epsilon();
            std::size_t keep = n - 1;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                g.dI[k] = dL(g.pts[k], g.pts[k + 1]);
                m_loc[k] = rel_rho_mass(g.pts[k], g.pts[k + 1]);
                spd_loc[k] = rel_speed_mass(g.pts[k], g.pts[k + 1]);
                // Numerical horizon: once the Laplace window of the
                // exponent shrinks under the ulp of the abscissa, node
                // placement cannot resolve the mass any more.  Cut here;
                // classification works on the rungs in front.
                double scale_x = std::abs(g.pts[k]) + std::abs(g.pts[k + 1]);
                double wall = 64.0 * eps * scale_x;
                if ((g.dI[k] > 45.0 && m_loc[k] < wall) ||
                    (g.dI[k] < -45.0 && spd_loc[k] < wall)) {
                    keep = k + 1;
                    break;
                }
            }
            if (keep < n - 1) {
                n = keep + 1;
                g.pts.resize(n);
                g.dI.resize(n - 1);
                m_loc.resize(n - 1);
                spd_loc.resize(n - 1);
                if (n < 12) return;
            }
        } catch (const EvaluationError&) {
            return;
        }
        // tau backward: tau_k = m_loc_k + exp(-dI_k) tau_{k+1}; the seed
        // extrapolates the sliver beyond the deepest rung geometrically.
        g.tau.assign(n, 0.0);
        {
            double r_est = 1.0;
            if (m_loc[n - 2] > 0.0 && m_loc[n - 3] > 0.0 && std::isfinite(g.dI[n - 3]))
                r_est = (m_loc[n - 2] / m_loc[n - 3]) * std::exp(-g.dI[n - 3]);
            r_est = std::min(0.95, std::max(0.05, r_est));
            double deep_rel = m_loc[n - 2] * r_est / (1.0 - r_est);
            g.tau[n - 1] = deep_rel;
            bool sane = true;
            for (std::size_t k = n - 1; k-- > 0;) {
                double damp = std::exp(-g.dI[k]);
                double t = m_loc[k] + damp * g.tau[k + 1];
                if (std::isnan(t)) {
                    sane = false;
                    break;
                }
                g.tau[k] = t;
            }
            g.tau_ok = sane;
        }
        // nu forward: nu_{k+1} = spd_loc_k + exp(-dI_k) nu_k
        g.nu.assign(n, 0.0);
        try {
            g.nu[0] = rel_speed_mass(c, g.pts[0]);
        } catch (const EvaluationError&) {
            return;
        }
        for (std::size_t k = 0; k + 1 < n; ++k) {
            double damp = std::exp(-g.dI[k]);
            double v = spd_loc[k] + damp * g.nu[k];
            if (std::isnan(v)) v = kInf;  // inf * 0 style collision: treat as overflow
            g.nu[k + 1] = v;
        }
        g.ok = true;
    }

    // index of the rung containing y (pts[k] .. pts[k+1]; direction aware)
    std::size_t rung_of(const Grid& g, Endpoint e, double y) const {
        bool rightward = endpoint(e) > c;
        std::size_t k = 0;
        while (k + 1 < g.pts.size() &&
               (rightward ? g.pts[k + 1] <= y : g.pts[k + 1] >= y))
            ++k;
        return k;
    }

    double tau_at(Endpoint e, double y) const {
        const Grid& g = grid(e);
        if (!g.ok || !g.tau_ok) return std::nan("");
        bool rightward = endpoint(e) > c;
        if (rightward ? y <= g.pts.front() : y >= g.pts.front()) {
            // left of the ladder: extend with one local step to pts[0]
            double m = rel_rho_mass(y, g.pts.front());
            return m + std::exp(-dL(y, g.pts.front())) * g.tau.front();
        }
        std::size_t k = rung_of(g, e, y);
        if (k + 1 >= g.pts.size()) return g.tau.back();
        double m = rel_rho_mass(y, g.pts[k + 1]);
        return m + std::exp(-dL(y, g.pts[k + 1])) * g.tau[k + 1];
    }

    double nu_at(Endpoint e, double z) const {
        const Grid& g = grid(e);
        if (!g.ok) return std::nan("");
        bool rightward = endpoint(e) > c;
        if (rightward ? z <= g.pts.front() : z >= g.pts.front()) {
            return rel_speed_mass(c, z);
        }
        std::size_t k = rung_of(g, e, z);
        if (k + 1 >= g.pts.size()) k = g.pts.size() - 2;
        double loc = rel_speed_mass(g.pts[k], z);
        return loc + std::exp(-dL(g.pts[k], z)) * g.nu[k];
    }

    // 15-point rule nodes inside [a, b], ordered from a to b, with the
    // Kronrod weights.
    static void rung_nodes(double a, double b, double* xs, double* wk) {
        static const double t[15] = {
            -0.991455371120812639, -0.949107912342758525, -0.864864423359769073,
            -0.741531185599394440, -0.586087235467691130, -0.405845151377397167,
            -0.207784955007898468, 0.0,
            0.207784955007898468,  0.405845151377397167,  0.586087235467691130,
            0.741531185599394440,  0.864864423359769073,  0.949107912342758525,
            0.991455371120812639};
        static const double w[15] = {
            0.022935322010529225, 0.063092092629978553, 0.104790010322250184,
            0.140653259715525919, 0.169004726639267903, 0.190350578064785410,
            0.204432940075298892, 0.209482141084727828, 0.204432940075298892,
            0.190350578064785410, 0.169004726639267903, 0.140653259715525919,
            0.104790010322250184, 0.063092092629978553, 0.022935322010529225};
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int i = 0; i < 15; ++i) {
            xs[i] = mid + half * t[i];
            wk[i] = w[i] * std::abs(half);
        }
    }

    // Per-rung masses of tau(y) w(y) / sigma^2(y), nodal tau carried
    // backward through the rung.  Returns false on evaluation faults.
    bool tail_rung_masses(Endpoint e, const RealFn& w, std::vector<double>& out) const {
        const Grid& g = grid(e);
        if (!g.ok || !g.tau_ok) return false;
        std::size_t n = g.pts.size();
        out.assign(n - 1, 0.0);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            double xs[15], wk[15];
            rung_nodes(g.pts[k], g.pts[k + 1], xs, wk);
            double taun[15];
            double cur = g.tau[k + 1];
            double prev_pos = g.pts[k + 1];
            try {
                for (int i = 14; i >= 0; --i) {
                    double m = rel_rho_mass(xs[i], prev_pos);
                    double d = dL(xs[i], prev_pos);
                    cur = m + std::exp(-d) * cur;
                    taun[i] = cur;
                    prev_pos = xs[i];
                }
            } catch (const EvaluationError&) {
                return false;
            }
            double mass = 0.0;
            for (int i = 0; i < 15; ++i) {
                double wv = w(xs[i]);
                double s2 = sigma2_at(xs[i]);
                if (std::isnan(wv) || std::isnan(s2) || s2 <= 0.0) return false;
                if (wv <= 0.0) continue;
                mass += wk[i] * taun[i] * wv / s2;
            }
            out[k] = mass;
        }
        return true;
    }

    // Per-rung masses of nu(z), nodal nu carried forward through the rung.
    bool v_rung_masses(Endpoint e, std::vector<double>& out) const {
        const Grid& g = grid(e);
        if (!g.ok) return false;
        std::size_t n = g.pts.size();
        out.assign(n - 1, 0.0);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            double xs[15], wk[15];
            rung_nodes(g.pts[k], g.pts[k + 1], xs, wk);
            double nun[15];
            double cur = g.nu[k];
            double prev_pos = g.pts[k];
            try {
                for (int i = 0; i < 15; ++i) {
                    double m = rel_speed_mass(prev_pos, xs[i]);
                    double d = dL(prev_pos, xs[i]);
                    cur = m + std::exp(-d) * cur;
                    if (std::isnan(cur)) cur = kInf;  // inf * 0 collision
                    nun[i] = cur;
                    prev_pos = xs[i];
                }
            } catch (const EvaluationError&) {
                return false;
            }
            double mass = 0.0;
            for (int i = 0; i < 15; ++i) mass += wk[i] * nun[i];
            out[k] = mass;
        }
        return true;
    }
};

double ScaleBundle::scale(double x) const {
    if (x == c) return 0.0;
    Endpoint side = x > c ? Endpoint::Right : Endpoint::Left;
    double mag = std::exp(impl->scale_cum(side).log_value(x));
    return x > c ? mag : -mag;
}

TriState ScaleBundle::s_limit_finite(Endpoint e) const {
    const IntegralVerdict& v = s_limit(e);
    if (v.finite()) return TriState::Yes;
    if (v.divergent()) return TriState::No;
    return TriState::Unknown;
}

double ScaleBundle::exponent_value(double x) const { return impl->exponent_cum().value(x); }
double ScaleBundle::tau(Endpoint e, double y) const { return impl->tau_at(e, y); }
double ScaleBundle::nu(Endpoint e, double z) const { return impl->nu_at(e, z); }
bool ScaleBundle::tau_available(Endpoint e) const {
    return impl->grid(e).ok && impl->grid(e).tau_ok;
}
double ScaleBundle::sigma2(double x) const { return impl->sigma2_at(x); }
double ScaleBundle::sigma_value(double x) const { return impl->sigma_c(x); }

// --- density forms ------------------------------------------------------------

namespace {

// Certifies exact cancellation of the auxiliary exponent integrand
// 2 mu/sigma^2 + 2 b/sigma near the endpoint.
std::function<bool()> cancel_probe(const ProblemSpec& spec, Endpoint e) {
    CompiledExpr mu(spec.mu), sigma(spec.sigma), b(spec.b);
    double from = spec.c;
    double to = e == Endpoint::Left ? spec.l : spec.r;
    return [mu, sigma, b, from, to]() {
        for (double x : endpoint_ladder(from, to, 10, 0.45)) {
            double s = sigma(x);
            if (std::isnan(s) || s == 0.0) return false;
            double t1 = 2.0 * mu(x) / (s * s);
            double t2 = 2.0 * b(x) / s;
            if (std::isnan(t1) || std::isnan(t2)) return false;
            if (std::abs(t1 + t2) > 1e-9 * (std::abs(t1) + std::abs(t2))) return false;
        }
        return true;
    };
}

std::optional<AsymptoticForm> density_form(const ProblemSpec& spec, Which which, Endpoint e) {
    CoefficientForms cf = coefficient_forms(spec, e);
    if (!cf.mu || !cf.sigma) return std::nullopt;
    if (which == Which::Auxiliary && !cf.b) return std::nullopt;
    try {
        AsymptoticForm two = AsymptoticForm::make(cf.sigma->frame, 2.0);
        AsymptoticForm integrand = mul(two, mul(*cf.mu, inverse(squared(*cf.sigma))));
        if (which == Which::Auxiliary) {
            AsymptoticForm drift_part = mul(two, mul(*cf.b, inverse(*cf.sigma)));
            integrand = add(integrand, drift_part, cancel_probe(spec, e));
        }
        return exp_of_antiderivative(integrand, orientation(e));
    } catch (const FormError&) {
        return std::nullopt;
    }
}

IntegralVerdict combine_slimit(const std::optional<AsymptoticForm>& form,
                               const std::function<IntegralVerdict()>& numeric,
                               const ScaleOptions& opt) {
    std::optional<ConvergenceVerdict> analytic;
    if (form) {
        try {
            analytic = decide_convergence(*form);
        } catch (const FormError&) {
            analytic = std::nullopt;
        }
    }
    if (analytic) {
        // A finite verdict still wants the numeric value for reporting;
        // a cross-check runs in either case when enabled.
        bool want_numeric =
            opt.numeric_fallback && (opt.cross_check || *analytic == ConvergenceVerdict::Converges);
        IntegralVerdict num = want_numeric ? numeric() : IntegralVerdict::inconclusive_v();
        if (*analytic == ConvergenceVerdict::Converges) {
            if (num.divergent())
                return IntegralVerdict::inconclusive_v(
                    "conflict: analytic finite vs numeric divergent");
            double v = num.finite() ? num.value : std::nan("");
            double err = num.finite() ? num.abs_err : kInf;
            return IntegralVerdict::finite_v(v, err);
        }
        if (num.finite())
            return IntegralVerdict::inconclusive_v("conflict: analytic divergent vs numeric finite");
        return IntegralVerdict::divergent_v("scale density not integrable at endpoint");
    }
    if (opt.numeric_fallback) return numeric();
    return IntegralVerdict::inconclusive_v("no asymptotics and numeric fallback disabled");
}

}  // namespace

ScaleBundle build_scale(const ProblemSpec& spec, Which which, const ScaleOptions& opt) {
    ScaleBundle b;
    b.which = which;
    b.l = spec.l;
    b.r = spec.r;
    b.c = spec.c;

    auto impl = std::make_shared<ScaleBundle::Impl>();
    impl->l = spec.l;
    impl->r = spec.r;
    impl->c = spec.c;
    impl->sigma_c = CompiledExpr(spec.sigma);

    CompiledExpr mu_c(spec.mu), sigma_c(spec.sigma), b_c(spec.b);
    if (which == Which::Original) {
        impl->exponent_integrand = [mu_c, sigma_c](double x) {
            double s = sigma_c(x);
            return 2.0 * mu_c(x) / (s * s);
        };
    } else {
        impl->exponent_integrand = [mu_c, sigma_c, b_c](double x) {
            double s = sigma_c(x);
            return 2.0 * mu_c(x) / (s * s) + 2.0 * b_c(x) / s;
        };
    }
    b.impl = impl;

    b.form_l_ = density_form(spec, which, Endpoint::Left);
    b.form_r_ = density_form(spec, which, Endpoint::Right);
    if (spec.asym_left.sigma) b.sig2_l_ = squared(*spec.asym_left.sigma);
    if (spec.asym_right.sigma) b.sig2_r_ = squared(*spec.asym_right.sigma);

    auto numeric_probe = [&impl](Endpoint e) {
        return [impl, e]() {
            return probe_tail([impl](double x) { return std::exp(impl->log_density(x)); },
                              impl->c, impl->endpoint(e), Side::Right);
        };
    };
    b.s_l_ = combine_slimit(b.form_l_, numeric_probe(Endpoint::Left), opt);
    b.s_r_ = combine_slimit(b.form_r_, numeric_probe(Endpoint::Right), opt);
    return b;
}

EndpointWeight unit_weight(const ScaleBundle& b, Endpoint e) {
    EndpointWeight w;
    w.fn = [](double) { return 1.0; };
    w.form = AsymptoticForm::make(b.frame(e), 1.0);
    w.name = "1";
    return w;
}

EndpointWeight b_squared_weight(const ProblemSpec& spec, Endpoint e) {
    EndpointWeight w;
    CompiledExpr bc(spec.b);
    w.fn = [bc](double x) {
        double v = bc(x);
        return std::isnan(v) ? v : v * v;
    };
    const auto& ea = e == Endpoint::Left ? spec.asym_left : spec.asym_right;
    if (ea.b) w.form = squared(*ea.b);
    w.name = "b^2";
    return w;
}

// --- endpoint condition tests ---------------------------------------------------

namespace {

std::optional<TriState> analytic_tail_condition(const ScaleBundle& b, Endpoint e,
                                                const EndpointWeight& w, std::string* note) {
    const auto& rho = b.density_form(e);
    const auto& sig2 = b.sigma2_form(e);
    if (!rho || !sig2 || !w.form) return std::nullopt;
    ConvergenceVerdict s_conv;
    try {
        s_conv = decide_convergence(*rho);
    } catch (const FormError& fe) {
        if (note) *note = fe.what();
        return std::nullopt;
    }
    if (s_conv == ConvergenceVerdict::Diverges) {
        if (note) *note = "scale limit infinite; first clause fails";
        return TriState::No;
    }
    if (w.form->is_zero()) return TriState::Yes;  // zero weight integrates trivially
    try {
        AsymptoticForm tail = integrate_tail(*rho);
        AsymptoticForm integrand = mul(tail, mul(*w.form, inverse(mul(*rho, *sig2))));
        return decide_convergence(integrand) == ConvergenceVerdict::Converges ? TriState::Yes
                                                                              : TriState::No;
    } catch (const FormError& fe) {
        if (note) *note = fe.what();
        return std::nullopt;
    }
}

TriState numeric_tail_condition(const ScaleBundle& b, Endpoint e, const EndpointWeight& w,
                                const ScaleOptions& opt, std::string* note) {
    TriState first = b.s_limit_finite(e);
    if (first == TriState::No) {
        if (note) *note = "scale limit infinite; first clause fails (numeric)";
        return TriState::No;
    }
    if (first == TriState::Unknown) {
        if (note) *note = "scale limit inconclusive (numeric)";
        return TriState::Unknown;
    }
    std::vector<double> rungs;
    if (!b.impl->tail_rung_masses(e, w.fn, rungs)) {
        if (note) *note = "tail ratio ladder unavailable";
        return TriState::Unknown;
    }
    IntegralVerdict v = classify_mass_sequence(rungs, opt.quad);
    if (note) *note = std::string("numeric tail rungs: ") + v.tag_name() +
                      (v.report.empty() ? "" : " (" + v.report + ")");
    if (v.finite()) return TriState::Yes;
    if (v.divergent()) return TriState::No;
    return TriState::Unknown;
}

}  // namespace

RouteResult endpoint_tail_condition(const ScaleBundle& b, Endpoint e, const EndpointWeight& w,
                                    const ScaleOptions& opt, Evidence* ev) {
    std::string a_note, n_note;
    std::optional<TriState> analytic = analytic_tail_condition(b, e, w, &a_note);
    RouteResult rr;
    if (analytic && *analytic != TriState::Unknown) {
        rr.holds = *analytic;
        rr.note = "analytic";
        if (opt.cross_check && opt.numeric_fallback) {
            TriState num = numeric_tail_condition(b, e, w, opt, &n_note);
            if (num != TriState::Unknown && num != *analytic) {
                rr.holds = TriState::Unknown;
                rr.note = "conflict: analytic says " + std::string(to_string(*analytic)) +
                          ", quadrature says " + to_string(num);
            }
        }
    } else {
        if (opt.numeric_fallback) {
            rr.holds = numeric_tail_condition(b, e, w, opt, &n_note);
            rr.note = n_note;
        } else {
            rr.holds = TriState::Unknown;
            rr.note = a_note.empty() ? "no analytic route" : a_note;
        }
    }
    if (ev)
        ev->emplace_back("tail[" + w.name + "]@" + to_string(e) + "/" + to_string(b.which),
                         std::string(to_string(rr.holds)) + (rr.note.empty() ? "" : "; " + rr.note));
    return rr;
}

namespace {

// Analytic v-functional route: v(e) = int rho * m with m the speed-side
// antiderivative; exponential growth of m is folded through its Laplace
// ratio so no exponential cancellation is left to chance.
std::optional<ConvergenceVerdict> analytic_v_route(const ScaleBundle& b, Endpoint e,
                                                   std::string* note) {
    const auto& rho = b.density_form(e);
    const auto& sig2 = b.sigma2_form(e);
    if (!rho || !sig2) return std::nullopt;
    try {
        AsymptoticForm inner = inverse(mul(*rho, *sig2));
        Antiderivative ad = antiderivative(inner);
        AsymptoticForm v_int = AsymptoticForm::zero(rho->frame);
        if (ad.finite_limit) {
            v_int = *rho;  // m tends to a constant
        } else if (ad.growth.a != 0.0) {
            // m ~ inner / Phi' with Phi = a u^gamma (a > 0 on growth)
            AsymptoticForm phi_prime = AsymptoticForm::make(
                rho->frame, ad.growth.a * std::abs(ad.growth.gamma), 0.0, 0.0,
                ad.growth.gamma - 1.0, 0.0, ad.growth.slack);
            v_int = inverse(mul(*sig2, phi_prime));
        } else {
            v_int = mul(*rho, ad.growth);
        }
        return decide_convergence(v_int);
    } catch (const FormError& fe) {
        if (note) *note = fe.what();
        return std::nullopt;
    }
}

IntegralVerdict numeric_v_route(const ScaleBundle& b, Endpoint e, const ScaleOptions& opt,
                                std::string* note) {
    std::vector<double> rungs;
    if (!b.impl->v_rung_masses(e, rungs)) {
        if (note) *note = "v rung ladder unavailable";
        return IntegralVerdict::inconclusive_v("v rung ladder unavailable");
    }
    IntegralVerdict v = classify_mass_sequence(rungs, opt.quad);
    if (note)
        *note = std::string("numeric v rungs: ") + v.tag_name() +
                (v.report.empty() ? "" : " (" + v.report + ")");
    return v;
}

}  // namespace

FellerFunctional feller_limit_on(const ScaleBundle& b, Endpoint e, const ScaleOptions& opt) {
    FellerFunctional f;
    f.endpoint = e;

    // Route 1: the v-functional limit.
    std::string v_note;
    std::optional<ConvergenceVerdict> v_analytic = analytic_v_route(b, e, &v_note);
    TriState v_exits = TriState::Unknown;
    if (v_analytic) {
        v_exits = *v_analytic == ConvergenceVerdict::Converges ? TriState::Yes : TriState::No;
        f.v_limit = *v_analytic == ConvergenceVerdict::Converges
                        ? IntegralVerdict::finite_v(std::nan(""), kInf)
                        : IntegralVerdict::divergent_v("v-functional grows without bound");
        if (opt.cross_check && opt.numeric_fallback) {
            IntegralVerdict num = numeric_v_route(b, e, opt, &v_note);
            if (num.finite() && v_exits == TriState::No) {
                v_exits = TriState::Unknown;
                v_note = "conflict: analytic v divergent vs numeric finite";
            } else if (num.divergent() && v_exits == TriState::Yes) {
                v_exits = TriState::Unknown;
                v_note = "conflict: analytic v finite vs numeric divergent";
            } else if (num.finite()) {
                f.v_limit = num;
            }
        }
    } else if (opt.numeric_fallback) {
        IntegralVerdict num = numeric_v_route(b, e, opt, &v_note);
        f.v_limit = num;
        if (num.finite()) v_exits = TriState::Yes;
        if (num.divergent()) v_exits = TriState::No;
    }
    f.evidence.emplace_back("exit-v@" + std::string(to_string(e)) + "/" + to_string(b.which),
                            std::string(to_string(v_exits)) +
                                (v_note.empty() ? "" : "; " + v_note));

    // Route 2: the scale-form condition (s finite and tail integrable).
    RouteResult s_route = endpoint_tail_condition(b, e, unit_weight(b, e), opt, &f.evidence);

    f.v_route = v_exits;
    f.s_route = s_route.holds;
    // Both routes are equivalent; a conclusive disagreement is reported
    // as Unknown with the trace kept.
    if (v_exits == TriState::Unknown) {
        f.exits = s_route.holds;
    } else if (s_route.holds == TriState::Unknown) {
        f.exits = v_exits;
    } else if (v_exits == s_route.holds) {
        f.exits = v_exits;
    } else {
        f.exits = TriState::Unknown;
        f.evidence.emplace_back("exit@" + std::string(to_string(e)),
                                "conclusive disagreement between the v-route and the s-route");
    }
    return f;
}

FellerFunctional feller_limit(const ProblemSpec& spec, Which which, Endpoint e,
                              const ScaleOptions& opt) {
    ScaleBundle b = build_scale(spec, which, opt);
    return feller_limit_on(b, e, opt);
}

}  // namespace stricttest
