#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace stricttest {

// Expression trees for SDE coefficients: constants, the variable x,
// +, -, *, /, powers with constant real exponent, abs, exp, log.
// Powers of possibly-negative arguments must be written abs(x)^k or
// carry an integer exponent; the evaluator rejects anything that would
// leave the reals.

enum class ExprKind {
    Constant,
    Variable,
    Add,
    Sub,
    Mul,
    Div,
    Pow,  // rhs is the folded constant exponent
    Neg,
    Abs,
    Exp,
    Log,
};

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct EvalError : std::runtime_error {
    EvalError(const std::string& msg, const std::string& subtree, double at)
        : std::runtime_error(msg + " in `" + subtree + "` at x=" + std::to_string(at)),
          subtree(subtree),
          at(at) {}
    std::string subtree;
    double at;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (column " + std::to_string(pos + 1) + ")"), pos(pos) {}
    std::size_t pos;
};

class Expr {
public:
    ExprKind kind;
    double value = 0.0;  // Constant payload; Pow exponent
    ExprPtr lhs, rhs;

    static ExprPtr constant(double v);
    static ExprPtr variable();
    static ExprPtr make(ExprKind k, ExprPtr a, ExprPtr b = nullptr);
    static ExprPtr pow(ExprPtr base, double exponent);

    // Tree-walking evaluation with domain diagnostics (log of a
    // nonpositive value, division by zero, fractional power of a
    // negative base).
    double eval(double x) const;

    std::string print() const;

    bool is_constant() const { return kind == ExprKind::Constant; }

    // Structural equality after constant folding.
    static bool equal(const ExprPtr& a, const ExprPtr& b);

    // Constant-fold subtrees that do not mention x.
    static ExprPtr fold(const ExprPtr& e);

private:
    double eval_impl(double x) const;
};

// Flat postfix program for hot loops (Monte-Carlo stepping, quadrature
// inner nodes). Domain faults surface as NaN instead of exceptions.
class CompiledExpr {
public:
    CompiledExpr() = default;
    explicit CompiledExpr(const ExprPtr& e);

    double operator()(double x) const;

private:
    enum class Op : std::uint8_t {
        PushConst,
        PushX,
        Add,
        Sub,
        Mul,
        Div,
        PowReal,
        PowInt,
        Neg,
        Abs,
        Exp,
        Log,
    };
    struct Instr {
        Op op;
        double c = 0.0;
        int k = 0;
    };
    std::vector<Instr> prog_;
    std::size_t stack_need_ = 0;
    void emit(const ExprPtr& e, std::size_t depth);
};

// Parses a single expression. `params` supplies named constants; the
// variable is always `x`. Exponents of `^` must fold to constants.
ExprPtr parse_expression(const std::string& text, const std::map<std::string, double>& params);

}  // namespace stricttest
