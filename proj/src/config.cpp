#include "stricttest/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace stricttest {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> statements(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n' || ch == ';') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        std::size_t h = s.find('#');
        if (h != std::string::npos) s = s.substr(0, h);
        s = trim(s);
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const std::string& s) { return s.empty(); }),
              out.end());
    return out;
}

double const_value(const std::string& text, const std::map<std::string, double>& params) {
    if (trim(text) == "-inf") return -std::numeric_limits<double>::infinity();
    if (trim(text) == "inf" || trim(text) == "+inf") return std::numeric_limits<double>::infinity();
    ExprPtr e = parse_expression(text, params);
    if (!e->is_constant()) throw ValidationError("expected a constant: " + text);
    return e->value;
}

struct RawAsym {
    int which;          // 0: first SDE, 1: second
    std::string side;   // left / right
    std::string coeff;  // mu / sigma / b
    std::map<std::string, std::string> fields;
};

}  // namespace

static ProblemSpec parse_with_overrides(const std::string& text,
                                        const std::map<std::string, double>* override_params) {
    ProblemSpec spec;
    bool have_interval = false, have_x0 = false, have_c = false;
    std::string mu_text, sigma_text, b_text, mu2_text, sigma2_text;
    std::vector<RawAsym> raw_asym;

    for (const std::string& st : statements(text)) {
        std::size_t eq = st.find('=');
        std::istringstream head(st.substr(0, eq == std::string::npos ? st.size() : eq));
        std::string key;
        head >> key;
        if (key == "param") {
            std::string name;
            head >> name;
            if (name.empty() || eq == std::string::npos)
                throw ValidationError("malformed param statement: " + st);
            double v = const_value(st.substr(eq + 1), spec.params);
            if (override_params) {
                auto it = override_params->find(name);
                if (it != override_params->end()) v = it->second;
            }
            spec.params[name] = v;
            continue;
        }
        if (key == "asym" || key == "asym2") {
            RawAsym ra;
            ra.which = key == "asym2" ? 1 : 0;
            head >> ra.side >> ra.coeff;
            if ((ra.side != "left" && ra.side != "right") ||
                (ra.coeff != "mu" && ra.coeff != "sigma" && ra.coeff != "b"))
                throw ValidationError("malformed asym statement: " + st);
            // fields C=.. a=.. gamma=.. p=.. q=..
            std::istringstream rest(st);
            std::string tok;
            rest >> tok >> tok >> tok;  // consume key, side, coeff
            std::string field;
            while (rest >> field) {
                std::size_t feq = field.find('=');
                std::string fname = field.substr(0, feq);
                std::string fval = feq == std::string::npos ? "" : field.substr(feq + 1);
                // allow spaces around '=' within a field
                if (fval.empty()) {
                    std::string nxt;
                    if (rest >> nxt) {
                        if (nxt == "=")
                            rest >> fval;
                        else if (nxt[0] == '=')
                            fval = nxt.substr(1);
                        else if (feq != std::string::npos)
                            fval = nxt;
                    }
                }
                if (fname != "C" && fname != "a" && fname != "gamma" && fname != "p" &&
                    fname != "q")
                    throw ValidationError("unknown asym field '" + fname + "' in: " + st);
                ra.fields[fname] = fval;
            }
            if (!ra.fields.count("C")) throw ValidationError("asym requires C=..: " + st);
            raw_asym.push_back(std::move(ra));
            continue;
        }
        if (eq == std::string::npos) throw ValidationError("malformed statement: " + st);
        std::string value = trim(st.substr(eq + 1));
        if (key == "interval" || key == "J") {
            std::string v = value;
            if (v.size() < 2 || v.front() != '(' || v.back() != ')')
                throw ValidationError("interval must look like (L, R): " + st);
            v = v.substr(1, v.size() - 2);
            std::size_t comma = v.find(',');
            if (comma == std::string::npos) throw ValidationError("interval needs a comma: " + st);
            spec.l = const_value(v.substr(0, comma), spec.params);
            spec.r = const_value(v.substr(comma + 1), spec.params);
            have_interval = true;
        } else if (key == "x0") {
            spec.x0 = const_value(value, spec.params);
            have_x0 = true;
        } else if (key == "c") {
            spec.c = const_value(value, spec.params);
            have_c = true;
        } else if (key == "mu") {
            mu_text = value;
        } else if (key == "sigma") {
            sigma_text = value;
        } else if (key == "b") {
            b_text = value;
        } else if (key == "mu2") {
            mu2_text = value;
        } else if (key == "sigma2") {
            sigma2_text = value;
        } else {
            throw ValidationError("unknown key '" + key + "'");
        }
    }

    if (!have_interval) throw ValidationError("missing required key: interval");
    if (!have_x0) throw ValidationError("missing required key: x0");
    if (sigma_text.empty()) throw ValidationError("missing required key: sigma");
    if (!(spec.l < spec.r)) throw ValidationError("interval must satisfy L < R");
    if (!(spec.x0 > spec.l && spec.x0 < spec.r))
        throw ValidationError("x0 must lie strictly inside the interval");
    if (!have_c) spec.c = spec.x0;
    if (!(spec.c > spec.l && spec.c < spec.r))
        throw ValidationError("reference point c must lie strictly inside the interval");

    spec.mu = mu_text.empty() ? Expr::constant(0.0) : parse_expression(mu_text, spec.params);
    spec.sigma = parse_expression(sigma_text, spec.params);
    spec.b = b_text.empty() ? Expr::constant(0.0) : parse_expression(b_text, spec.params);
    if (!mu2_text.empty() || !sigma2_text.empty()) {
        if (mu2_text.empty() || sigma2_text.empty())
            throw ValidationError("a second SDE needs both mu2 and sigma2");
        spec.mu2 = parse_expression(mu2_text, spec.params);
        spec.sigma2 = parse_expression(sigma2_text, spec.params);
    }

    for (const RawAsym& ra : raw_asym) {
        bool left = ra.side == "left";
        Frame fr = left ? spec.frame_left() : spec.frame_right();
        auto fv = [&](const char* name, double dflt) {
            auto it = ra.fields.find(name);
            if (it == ra.fields.end()) return dflt;
            return const_value(it->second, spec.params);
        };
        double C = fv("C", 0.0);
        AsymptoticForm form = AsymptoticForm::make(fr, C, fv("a", 0.0), fv("gamma", 0.0),
                                                   fv("p", 0.0), fv("q", 0.0));
        if (C != 0.0 && fv("a", 0.0) != 0.0 && fv("gamma", 0.0) <= 0.0)
            throw ValidationError("asym with a != 0 requires gamma > 0");
        EndpointAsymptotics& ea = left ? spec.asym_left : spec.asym_right;
        if (ra.which == 0) {
            if (ra.coeff == "mu") ea.mu = form;
            if (ra.coeff == "sigma") ea.sigma = form;
            if (ra.coeff == "b") ea.b = form;
        } else {
            if (ra.coeff == "b") throw ValidationError("the second SDE has no b coefficient");
            if (ra.coeff == "mu") ea.mu2 = form;
            if (ra.coeff == "sigma") ea.sigma2 = form;
        }
    }
    // An omitted b is identically zero, with zero endpoint behaviour.
    if (b_text.empty()) {
        spec.asym_left.b = AsymptoticForm::zero(spec.frame_left());
        spec.asym_right.b = AsymptoticForm::zero(spec.frame_right());
    }
    // Constant coefficients imply their own endpoint behaviour.
    {
        Frame fl = spec.frame_left(), fr = spec.frame_right();
        auto auto_const = [&](const ExprPtr& e, std::optional<AsymptoticForm>& al,
                              std::optional<AsymptoticForm>& ar) {
            if (!e || !e->is_constant()) return;
            if (!al) al = AsymptoticForm::make(fl, e->value);
            if (!ar) ar = AsymptoticForm::make(fr, e->value);
        };
        auto_const(spec.mu, spec.asym_left.mu, spec.asym_right.mu);
        auto_const(spec.sigma, spec.asym_left.sigma, spec.asym_right.sigma);
        auto_const(spec.b, spec.asym_left.b, spec.asym_right.b);
        auto_const(spec.mu2, spec.asym_left.mu2, spec.asym_right.mu2);
        auto_const(spec.sigma2, spec.asym_left.sigma2, spec.asym_right.sigma2);
    }

    // sigma asymptotics must have a nonzero leading constant
    for (const auto* ea : {&spec.asym_left, &spec.asym_right}) {
        if (ea->sigma && ea->sigma->is_zero())
            throw ValidationError("sigma asymptotic must have C != 0");
        if (ea->sigma2 && ea->sigma2->is_zero())
            throw ValidationError("sigma2 asymptotic must have C != 0");
    }

    // Engelbert-Schmidt probe validation: 1/sigma^2, mu/sigma^2, b^2/sigma^2
    // stay finite across the probe grid (integrable interior singularities
    // fall between the Chebyshev nodes and are fine).
    CompiledExpr mu_c(spec.mu), sigma_c(spec.sigma), b_c(spec.b);
    auto diagnose = [&spec](double x) -> std::string {
        try {
            spec.sigma->eval(x);
            spec.mu->eval(x);
            spec.b->eval(x);
        } catch (const EvalError& e) {
            return e.what();
        }
        return "non-finite coefficient near x=" + std::to_string(x);
    };
    double prev_sigma = 0.0;
    bool have_prev = false;
    for (double x : probe_grid(spec)) {
        double s = sigma_c(x);
        double m = mu_c(x), bb = b_c(x);
        if (std::isnan(s) || std::isnan(m) || std::isnan(bb))
            throw ValidationError("coefficient fault on probe grid: " + diagnose(x));
        if (s == 0.0)
            throw ValidationError("sigma vanishes on the probe grid at x=" + std::to_string(x));
        // a sign change of a continuous sigma means an interior zero
        if (have_prev && s * prev_sigma < 0.0)
            throw ValidationError("sigma changes sign near x=" + std::to_string(x) +
                                  " (interior zero)");
        prev_sigma = s;
        have_prev = true;
    }
    if (spec.has_pair()) {
        CompiledExpr mu2_c(spec.mu2), sigma2_c(spec.sigma2);
        for (double x : probe_grid(spec)) {
            double s = sigma2_c(x);
            double m = mu2_c(x);
            if (std::isnan(s) || std::isnan(m) || s == 0.0)
                throw ValidationError("second SDE fails the probe grid at x=" + std::to_string(x));
        }
    }
    return spec;
}

ProblemSpec parse_problem(const std::string& text) { return parse_with_overrides(text, nullptr); }

ProblemSpec rebind_params(const std::string& text,
                          const std::map<std::string, double>& override) {
    ProblemSpec probe = parse_with_overrides(text, &override);
    for (const auto& [k, v] : override) {
        (void)v;
        if (!probe.params.count(k))
            throw ValidationError("unknown parameter in sweep: " + k);
    }
    return probe;
}

std::vector<double> probe_grid(const ProblemSpec& spec, int points_per_level, int levels) {
    double tl = std::isinf(spec.l) ? -M_PI_2 : std::atan(spec.l);
    double tr = std::isinf(spec.r) ? M_PI_2 : std::atan(spec.r);
    std::vector<double> out;
    out.reserve((std::size_t)points_per_level * levels);
    for (int k = 0; k < levels; ++k) {
        double margin = (tr - tl) * 0.05 * std::pow(0.5, k);
        double a = tl + margin, b = tr - margin;
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int j = 0; j < points_per_level; ++j) {
            double t = mid + half * std::cos(M_PI * (j + 0.5) / points_per_level);
            out.push_back(std::tan(t));
        }
    }
    return out;
}

bool is_b_zero_ae(const ProblemSpec& spec) {
    if (spec.asym_left.b && !spec.asym_left.b->is_zero()) return false;
    if (spec.asym_right.b && !spec.asym_right.b->is_zero()) return false;
    CompiledExpr b_c(spec.b);
    for (double x : probe_grid(spec)) {
        double v = b_c(x);
        if (std::isnan(v) || std::abs(v) > 1e-13) return false;
    }
    return true;
}

std::string print_problem(const ProblemSpec& spec) {
    std::ostringstream os;
    os.precision(17);
    auto bound = [](double v) {
        if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
        std::ostringstream b;
        b.precision(17);
        b << v;
        return b.str();
    };
    os << "interval = (" << bound(spec.l) << ", " << bound(spec.r) << ")\n";
    os << "x0 = " << spec.x0 << "\n";
    os << "c = " << spec.c << "\n";
    os << "mu = " << spec.mu->print() << "\n";
    os << "sigma = " << spec.sigma->print() << "\n";
    os << "b = " << spec.b->print() << "\n";
    if (spec.has_pair()) {
        os << "mu2 = " << spec.mu2->print() << "\n";
        os << "sigma2 = " << spec.sigma2->print() << "\n";
    }
    auto emit_asym = [&os](const char* side, const char* coeff, const std::optional<AsymptoticForm>& f,
                           bool second) {
        if (!f) return;
        os << (second ? "asym2 " : "asym ") << side << " " << coeff << " C=" << f->C;
        if (f->a != 0.0) os << " a=" << f->a << " gamma=" << f->gamma;
        if (f->p != 0.0) os << " p=" << f->p;
        if (f->q != 0.0) os << " q=" << f->q;
        os << "\n";
    };
    emit_asym("left", "mu", spec.asym_left.mu, false);
    emit_asym("left", "sigma", spec.asym_left.sigma, false);
    emit_asym("left", "b", spec.asym_left.b, false);
    emit_asym("right", "mu", spec.asym_right.mu, false);
    emit_asym("right", "sigma", spec.asym_right.sigma, false);
    emit_asym("right", "b", spec.asym_right.b, false);
    emit_asym("left", "mu", spec.asym_left.mu2, true);
    emit_asym("left", "sigma", spec.asym_left.sigma2, true);
    emit_asym("right", "mu", spec.asym_right.mu2, true);
    emit_asym("right", "sigma", spec.asym_right.sigma2, true);
    return os.str();
}

}  // namespace stricttest
