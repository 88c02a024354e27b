#include "stricttest/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace stricttest {

ExprPtr Expr::constant(double v) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Constant;
    e->value = v;
    return e;
}

ExprPtr Expr::variable() {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Variable;
    return e;
}

ExprPtr Expr::make(ExprKind k, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

ExprPtr Expr::pow(ExprPtr base, double exponent) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Pow;
    e->lhs = std::move(base);
    e->value = exponent;
    return e;
}

static bool is_integer(double v) { return std::floor(v) == v && std::abs(v) < 1e15; }

double Expr::eval_impl(double x) const {
    switch (kind) {
        case ExprKind::Constant: return value;
        case ExprKind::Variable: return x;
        case ExprKind::Add: return lhs->eval_impl(x) + rhs->eval_impl(x);
        case ExprKind::Sub: return lhs->eval_impl(x) - rhs->eval_impl(x);
        case ExprKind::Mul: return lhs->eval_impl(x) * rhs->eval_impl(x);
        case ExprKind::Div: {
            double d = rhs->eval_impl(x);
            if (d == 0.0) throw EvalError("division by zero", print(), x);
            return lhs->eval_impl(x) / d;
        }
        case ExprKind::Pow: {
            double b = lhs->eval_impl(x);
            if (b == 0.0 && value < 0.0) throw EvalError("zero base with negative exponent", print(), x);
            if (b < 0.0 && !is_integer(value))
                throw EvalError("fractional power of negative base (write abs(...)^k)", print(), x);
            return std::pow(b, value);
        }
        case ExprKind::Neg: return -lhs->eval_impl(x);
        case ExprKind::Abs: return std::abs(lhs->eval_impl(x));
        case ExprKind::Exp: return std::exp(lhs->eval_impl(x));
        case ExprKind::Log: {
            double v = lhs->eval_impl(x);
            if (v <= 0.0) throw EvalError("log of nonpositive value", print(), x);
            return std::log(v);
        }
    }
    throw EvalError("corrupt expression node", "?", x);
}

double Expr::eval(double x) const { return eval_impl(x); }

std::string Expr::print() const {
    std::ostringstream os;
    switch (kind) {
        case ExprKind::Constant: {
            os.precision(17);
            os << value;
            return os.str();
        }
        case ExprKind::Variable: return "x";
        case ExprKind::Add: return "(" + lhs->print() + " + " + rhs->print() + ")";
        case ExprKind::Sub: return "(" + lhs->print() + " - " + rhs->print() + ")";
        case ExprKind::Mul: return "(" + lhs->print() + " * " + rhs->print() + ")";
        case ExprKind::Div: return "(" + lhs->print() + " / " + rhs->print() + ")";
        case ExprKind::Pow: {
            os.precision(17);
            os << lhs->print() << "^(" << value << ")";
            return os.str();
        }
        case ExprKind::Neg: return "(-" + lhs->print() + ")";
        case ExprKind::Abs: return "abs(" + lhs->print() + ")";
        case ExprKind::Exp: return "exp(" + lhs->print() + ")";
        case ExprKind::Log: return "log(" + lhs->print() + ")";
    }
    return "?";
}

bool Expr::equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    if (a->kind == ExprKind::Constant || a->kind == ExprKind::Pow) {
        if (a->value != b->value) return false;
    }
    if ((a->lhs == nullptr) != (b->lhs == nullptr)) return false;
    if ((a->rhs == nullptr) != (b->rhs == nullptr)) return false;
    if (a->lhs && !equal(a->lhs, b->lhs)) return false;
    if (a->rhs && !equal(a->rhs, b->rhs)) return false;
    return true;
}

ExprPtr Expr::fold(const ExprPtr& e) {
    if (!e) return e;
    if (e->kind == ExprKind::Constant || e->kind == ExprKind::Variable) return e;
    ExprPtr l = fold(e->lhs);
    ExprPtr r = e->rhs ? fold(e->rhs) : nullptr;
    bool const_args = l->is_constant() && (!r || r->is_constant());
    ExprPtr out;
    if (e->kind == ExprKind::Pow)
        out = Expr::pow(l, e->value);
    else
        out = Expr::make(e->kind, l, r);
    if (const_args) {
        try {
            return Expr::constant(out->eval(0.0));
        } catch (const EvalError&) {
            return out;  // fault stays in the tree so eval reports it in context
        }
    }
    return out;
}

// --- compiled form -------------------------------------------------------

CompiledExpr::CompiledExpr(const ExprPtr& e) {
    emit(e, 0);
}

void CompiledExpr::emit(const ExprPtr& e, std::size_t depth) {
    stack_need_ = std::max(stack_need_, depth + 2);
    switch (e->kind) {
        case ExprKind::Constant:
            prog_.push_back({Op::PushConst, e->value, 0});
            return;
        case ExprKind::Variable:
            prog_.push_back({Op::PushX, 0, 0});
            return;
        case ExprKind::Add:
        case ExprKind::Sub:
        case ExprKind::Mul:
        case ExprKind::Div:
            emit(e->lhs, depth);
            emit(e->rhs, depth + 1);
            prog_.push_back({e->kind == ExprKind::Add   ? Op::Add
                             : e->kind == ExprKind::Sub ? Op::Sub
                             : e->kind == ExprKind::Mul ? Op::Mul
                                                        : Op::Div,
                             0, 0});
            return;
        case ExprKind::Pow:
            emit(e->lhs, depth);
            if (is_integer(e->value) && std::abs(e->value) <= 16)
                prog_.push_back({Op::PowInt, 0, (int)e->value});
            else
                prog_.push_back({Op::PowReal, e->value, 0});
            return;
        case ExprKind::Neg:
            emit(e->lhs, depth);
            prog_.push_back({Op::Neg, 0, 0});
            return;
        case ExprKind::Abs:
            emit(e->lhs, depth);
            prog_.push_back({Op::Abs, 0, 0});
            return;
        case ExprKind::Exp:
            emit(e->lhs, depth);
            prog_.push_back({Op::Exp, 0, 0});
            return;
        case ExprKind::Log:
            emit(e->lhs, depth);
            prog_.push_back({Op::Log, 0, 0});
            return;
    }
}

double CompiledExpr::operator()(double x) const {
    double stack[64];
    std::size_t sp = 0;
    for (const Instr& in : prog_) {
        switch (in.op) {
            case Op::PushConst: stack[sp++] = in.c; break;
            case Op::PushX: stack[sp++] = x; break;
            case Op::Add: --sp; stack[sp - 1] += stack[sp]; break;
            case Op::Sub: --sp; stack[sp - 1] -= stack[sp]; break;
            case Op::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
            case Op::Div: --sp; stack[sp - 1] /= stack[sp]; break;
            case Op::PowReal: {
                double b = stack[sp - 1];
                if (b < 0.0) {
                    stack[sp - 1] = std::numeric_limits<double>::quiet_NaN();
                } else {
                    stack[sp - 1] = std::pow(b, in.c);
                }
                break;
            }
            case Op::PowInt: {
                double b = stack[sp - 1];
                int k = in.k;
                double r = 1.0;
                double base = k < 0 ? 1.0 / b : b;
                for (int i = std::abs(k); i > 0; --i) r *= base;
                stack[sp - 1] = r;
                break;
            }
            case Op::Neg: stack[sp - 1] = -stack[sp - 1]; break;
            case Op::Abs: stack[sp - 1] = std::abs(stack[sp - 1]); break;
            case Op::Exp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
            case Op::Log:
                stack[sp - 1] = stack[sp - 1] > 0.0 ? std::log(stack[sp - 1])
                                                    : std::numeric_limits<double>::quiet_NaN();
                break;
        }
    }
    return stack[0];
}

// --- parser --------------------------------------------------------------

namespace {

class Parser {
public:
    Parser(const std::string& s, const std::map<std::string, double>& params)
        : s_(s), params_(params) {}

    ExprPtr run() {
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos_ != s_.size()) throw ParseError("trailing input", pos_);
        return Expr::fold(e);
    }

private:
    const std::string& s_;
    const std::map<std::string, double>& params_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_])) ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    ExprPtr parse_sum() {
        ExprPtr e = parse_term();
        for (;;) {
            if (accept('+'))
                e = Expr::make(ExprKind::Add, e, parse_term());
            else if (accept('-'))
                e = Expr::make(ExprKind::Sub, e, parse_term());
            else
                return e;
        }
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_unary();
        for (;;) {
            if (accept('*'))
                e = Expr::make(ExprKind::Mul, e, parse_unary());
            else if (accept('/'))
                e = Expr::make(ExprKind::Div, e, parse_unary());
            else
                return e;
        }
    }

    ExprPtr parse_unary() {
        if (accept('-')) return Expr::make(ExprKind::Neg, parse_unary());
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_atom();
        if (accept('^')) {
            // Right-associative; the exponent must fold to a constant.
            ExprPtr ex = parse_unary();
            ex = Expr::fold(ex);
            if (!ex->is_constant())
                throw ParseError("power exponent must be a constant expression", pos_);
            return Expr::pow(base, ex->value);
        }
        return base;
    }

    ExprPtr parse_atom() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = parse_sum();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit((unsigned char)c) || c == '.') return parse_number();
        if (std::isalpha((unsigned char)c) || c == '_') return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    ExprPtr parse_number() {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isdigit((unsigned char)s_[pos_]) || s_[pos_] == '.' || s_[pos_] == 'e' ||
                s_[pos_] == 'E' ||
                ((s_[pos_] == '+' || s_[pos_] == '-') && pos_ > start &&
                 (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E'))))
            ++pos_;
        try {
            return Expr::constant(std::stod(s_.substr(start, pos_ - start)));
        } catch (const std::exception&) {
            throw ParseError("malformed number", start);
        }
    }

    ExprPtr parse_ident() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum((unsigned char)s_[pos_]) || s_[pos_] == '_'))
            ++pos_;
        std::string name = s_.substr(start, pos_ - start);
        if (name == "abs" || name == "exp" || name == "log") {
            if (!accept('(')) throw ParseError("expected '(' after " + name, pos_);
            ExprPtr arg = parse_sum();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            ExprKind k = name == "abs" ? ExprKind::Abs : name == "exp" ? ExprKind::Exp : ExprKind::Log;
            return Expr::make(k, arg);
        }
        if (name == "x") return Expr::variable();
        if (name == "inf") return Expr::constant(std::numeric_limits<double>::infinity());
        auto it = params_.find(name);
        if (it == params_.end()) throw ParseError("unknown identifier '" + name + "'", start);
        return Expr::constant(it->second);
    }
};

}  // namespace

ExprPtr parse_expression(const std::string& text, const std::map<std::string, double>& params) {
    return Parser(text, params).run();
}

}  // namespace stricttest
