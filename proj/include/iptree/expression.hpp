#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "iptree/gamble.hpp"

namespace iptree {

/// Abstract syntax of the gamble expression language.
///
///   expr   := term (('+' | '-') term)*
///   term   := factor ('*' factor)*
///   factor := number | '-' factor | 'ind' '(' bool ')'
///           | ('min' | 'max') '(' expr ',' expr ')'
///           | 'sum' '(' ident '=' int '..' int ',' expr ')' | '(' expr ')'
///   bool   := conj ('||' conj)*
///   conj   := unary ('&&' unary)*
///   unary  := '!' unary | '(' bool ')' | 'X' '[' index ']' ('==' | '!=') label
///   index  := int | ident (('+' | '-') int)?
namespace ast {

struct Expr;
struct Cond;
using ExprPtr = std::shared_ptr<const Expr>;
using CondPtr = std::shared_ptr<const Cond>;

/// 1-based time index, either a literal or a bound variable plus an offset.
struct Index {
    std::optional<std::string> variable;
    long offset = 0;
};

struct Number {
    double value;
};
struct Negate {
    ExprPtr operand;
};
struct Binary {
    char op;  // '+', '-', '*'
    ExprPtr lhs;
    ExprPtr rhs;
};
struct Extremum {
    bool is_max;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct Indicator {
    CondPtr condition;
};
struct Sum {
    std::string variable;
    long from;
    long to;
    ExprPtr body;
};

struct StateTest {
    Index index;
    StateIndex state;
    bool equal;  // '==' or '!='
};
struct Not {
    CondPtr operand;
};
struct Junction {
    bool is_and;
    CondPtr lhs;
    CondPtr rhs;
};

struct Expr {
    std::variant<Number, Negate, Binary, Extremum, Indicator, Sum> node;
};
struct Cond {
    std::variant<StateTest, Not, Junction> node;
};

}  // namespace ast

/// A parsed gamble expression bound to a state space.
class GambleExpr {
public:
    GambleExpr(ast::ExprPtr root, StateSpace space);

    const ast::Expr& root() const noexcept { return *root_; }
    const StateSpace& space() const noexcept { return space_; }
    /// Largest time index referenced (0 for constants).
    std::size_t depth() const noexcept { return depth_; }

    /// Evaluates on a path of at least depth() states.
    double evaluate(std::span<const StateIndex> path) const;

private:
    ast::ExprPtr root_;
    StateSpace space_;
    std::size_t depth_;
};

/// Throws SyntaxError (with 1-based line and column) on malformed input,
/// unknown state labels, unbound variables, and indices <= 0.
GambleExpr parse_gamble(std::string_view source, const StateSpace& space);

/// Tabulates the expression over all strings of length `depth` (default: the inferred depth).
FinitaryGamble compile(const GambleExpr& expr, std::optional<std::size_t> depth = std::nullopt,
                       std::size_t cap = FinitaryGamble::kDefaultCellCap);

/// Source text that parses back to an alpha-equivalent expression.
std::string to_source(const GambleExpr& expr);

/// Structural equality up to renaming of summation variables.
bool alpha_equivalent(const GambleExpr& a, const GambleExpr& b);

}  // namespace iptree
