#include "iptree/expression.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>

namespace iptree {

namespace {

using namespace ast;

enum class Tok { Number, Ident, String, Symbol, End };

struct Token {
    Tok kind;
    std::string text;
    double number = 0.0;
    std::size_t line;
    std::size_t column;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            const std::size_t line = line_;
            const std::size_t col = col_;
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, "", 0.0, line, col});
                return out;
            }
            const char c = src_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c)) ||
                (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
                out.push_back(number(line, col));
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                const std::size_t start = pos_;
                while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) advance();
                out.push_back({Tok::Ident, std::string(src_.substr(start, pos_ - start)), 0.0, line, col});
            } else if (c == '"') {
                advance();
                std::string text;
                while (pos_ < src_.size() && src_[pos_] != '"') {
                    text += src_[pos_];
                    advance();
                }
                if (pos_ >= src_.size()) throw SyntaxError("unterminated string", line, col);
                advance();
                out.push_back({Tok::String, text, 0.0, line, col});
            } else {
                static constexpr std::array<std::string_view, 5> two{"==", "!=", "&&", "||", ".."};
                std::string sym;
                for (auto t : two) {
                    if (src_.substr(pos_, 2) == t) sym = t;
                }
                if (sym.empty()) {
                    if (std::string_view("+-*()[],=!").find(c) == std::string_view::npos) {
                        throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
                    }
                    sym = std::string(1, c);
                }
                for (std::size_t i = 0; i < sym.size(); ++i) advance();
                out.push_back({Tok::Symbol, sym, 0.0, line, col});
            }
        }
    }

private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
    }

    Token number(std::size_t line, std::size_t col) {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        };
        digits();
        if (pos_ + 1 < src_.size() && src_[pos_] == '.' && src_[pos_ + 1] != '.') {
            advance();
            digits();
        } else if (pos_ + 1 == src_.size() && src_[pos_] == '.') {
            advance();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            const std::size_t save = pos_;
            const std::size_t save_col = col_;
            advance();
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                digits();
            } else {
                pos_ = save;
                col_ = save_col;
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
            throw SyntaxError("malformed number '" + text + "'", line, col);
        }
        return {Tok::Number, text, value, line, col};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

class Parser {
public:
    Parser(std::vector<Token> tokens, const StateSpace& space) : toks_(std::move(tokens)), space_(space) {}

    ExprPtr parse() {
        ExprPtr e = expr();
        if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "' after expression");
        return e;
    }

private:
    const Token& peek() const { return toks_[i_]; }
    const Token& take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }
    bool is_symbol(std::string_view s) const { return peek().kind == Tok::Symbol && peek().text == s; }
    bool is_ident(std::string_view s) const { return peek().kind == Tok::Ident && peek().text == s; }
    bool accept(std::string_view s) {
        if (!is_symbol(s)) return false;
        take();
        return true;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, peek().line, peek().column); }
    void expect(std::string_view s) {
        if (!accept(s)) {
            fail("expected '" + std::string(s) + "' but found " + (peek().kind == Tok::End ? "end of input" : "'" + peek().text + "'"));
        }
    }

    static ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }
    static CondPtr make(Cond c) { return std::make_shared<const Cond>(std::move(c)); }

    ExprPtr expr() {
        ExprPtr lhs = term();
        while (is_symbol("+") || is_symbol("-")) {
            const char op = take().text[0];
            lhs = make(Expr{Binary{op, lhs, term()}});
        }
        return lhs;
    }

    ExprPtr term() {
        ExprPtr lhs = factor();
        while (accept("*")) lhs = make(Expr{Binary{'*', lhs, factor()}});
        return lhs;
    }

    long integer() {
        const Token& t = peek();
        if (t.kind != Tok::Number || t.text.find_first_not_of("0123456789") != std::string::npos) fail("expected an integer");
        take();
        return static_cast<long>(t.number);
    }

    ExprPtr factor() {
        const Token& t = peek();
        if (t.kind == Tok::Number) {
            take();
            return make(Expr{Number{t.number}});
        }
        if (accept("-")) return make(Expr{Negate{factor()}});
        if (accept("(")) {
            ExprPtr e = expr();
            expect(")");
            return e;
        }
        if (is_ident("ind")) {
            take();
            expect("(");
            CondPtr c = disjunction();
            expect(")");
            return make(Expr{Indicator{c}});
        }
        if (is_ident("min") || is_ident("max")) {
            const bool is_max = take().text == "max";
            expect("(");
            ExprPtr a = expr();
            expect(",");
            ExprPtr b = expr();
            expect(")");
            return make(Expr{Extremum{is_max, a, b}});
        }
        if (is_ident("sum")) {
            take();
            expect("(");
            if (peek().kind != Tok::Ident) fail("expected a summation variable");
            std::string var = take().text;
            if (var == "X") fail("'X' cannot be used as a summation variable");
            expect("=");
            const long from = integer();
            expect("..");
            const long to = integer();
            expect(",");
            bound_.push_back(var);
            ExprPtr body = expr();
            bound_.pop_back();
            expect(")");
            return make(Expr{Sum{var, from, to, body}});
        }
        fail(t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
    }

    CondPtr disjunction() {
        CondPtr lhs = conjunction();
        while (accept("||")) lhs = make(Cond{Junction{false, lhs, conjunction()}});
        return lhs;
    }

    CondPtr conjunction() {
        CondPtr lhs = unary();
        while (accept("&&")) lhs = make(Cond{Junction{true, lhs, unary()}});
        return lhs;
    }

    CondPtr unary() {
        if (accept("!")) return make(Cond{Not{unary()}});
        if (accept("(")) {
            CondPtr c = disjunction();
            expect(")");
            return c;
        }
        if (!is_ident("X")) fail("expected a state test 'X[i] == label'");
        take();
        expect("[");
        Index index = time_index();
        expect("]");
        bool equal = true;
        if (accept("!=")) {
            equal = false;
        } else {
            expect("==");
        }
        const Token& label = peek();
        if (label.kind == Tok::End || label.kind == Tok::Symbol) fail("expected a state label");
        auto state = space_.find(label.text);
        if (!state) fail("unknown state label '" + label.text + "'");
        take();
        return make(Cond{StateTest{index, *state, equal}});
    }

    Index time_index() {
        const Token& t = peek();
        if (t.kind == Tok::Number) {
            const long v = integer();
            if (v <= 0) throw SyntaxError("time indices start at 1", t.line, t.column);
            return Index{std::nullopt, v};
        }
        if (t.kind != Tok::Ident) fail("expected a time index");
        if (std::find(bound_.begin(), bound_.end(), t.text) == bound_.end()) fail("unbound variable '" + t.text + "'");
        take();
        Index index{t.text, 0};
        if (is_symbol("+") || is_symbol("-")) {
            const bool minus = take().text == "-";
            const long v = integer();
            index.offset = minus ? -v : v;
        }
        return index;
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    const StateSpace& space_;
    std::vector<std::string> bound_;
};

using Env = std::vector<std::pair<std::string, long>>;

long resolve(const Index& index, const Env& env) {
    if (!index.variable) return index.offset;
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
        if (it->first == *index.variable) return it->second + index.offset;
    }
    throw InvalidInput("unbound variable '" + *index.variable + "'");
}

// Smallest and largest time index referenced, over all bindings of summation variables.
struct Range {
    long lo = std::numeric_limits<long>::max();
    long hi = 0;
};

void index_range(const Expr& e, Env& env, Range& r);

void index_range(const Cond& c, Env& env, Range& r) {
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, StateTest>) {
                const long i = resolve(n.index, env);
                r.lo = std::min(r.lo, i);
                r.hi = std::max(r.hi, i);
            } else if constexpr (std::is_same_v<N, Not>) {
                index_range(*n.operand, env, r);
            } else {
                index_range(*n.lhs, env, r);
                index_range(*n.rhs, env, r);
            }
        },
        c.node);
}

void index_range(const Expr& e, Env& env, Range& r) {
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Negate>) {
                index_range(*n.operand, env, r);
            } else if constexpr (std::is_same_v<N, Binary> || std::is_same_v<N, Extremum>) {
                index_range(*n.lhs, env, r);
                index_range(*n.rhs, env, r);
            } else if constexpr (std::is_same_v<N, Indicator>) {
                index_range(*n.condition, env, r);
            } else if constexpr (std::is_same_v<N, Sum>) {
                // Indices are affine in the variable, so the endpoints bound them.
                for (long v : {n.from, n.to}) {
                    if (n.from > n.to) break;
                    env.emplace_back(n.variable, v);
                    index_range(*n.body, env, r);
                    env.pop_back();
                }
            }
        },
        e.node);
}

bool test(const Cond& c, std::span<const StateIndex> path, Env& env);

double eval(const Expr& e, std::span<const StateIndex> path, Env& env) {
    return std::visit(
        [&](const auto& n) -> double {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Number>) {
                return n.value;
            } else if constexpr (std::is_same_v<N, Negate>) {
                return -eval(*n.operand, path, env);
            } else if constexpr (std::is_same_v<N, Binary>) {
                const double a = eval(*n.lhs, path, env);
                const double b = eval(*n.rhs, path, env);
                return n.op == '+' ? a + b : n.op == '-' ? a - b : a * b;
            } else if constexpr (std::is_same_v<N, Extremum>) {
                const double a = eval(*n.lhs, path, env);
                const double b = eval(*n.rhs, path, env);
                return n.is_max ? std::max(a, b) : std::min(a, b);
            } else if constexpr (std::is_same_v<N, Indicator>) {
                return test(*n.condition, path, env) ? 1.0 : 0.0;
            } else {
                double total = 0.0;
                for (long v = n.from; v <= n.to; ++v) {
                    env.emplace_back(n.variable, v);
                    total += eval(*n.body, path, env);
                    env.pop_back();
                }
                return total;
            }
        },
        e.node);
}

bool test(const Cond& c, std::span<const StateIndex> path, Env& env) {
    return std::visit(
        [&](const auto& n) -> bool {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, StateTest>) {
                const long i = resolve(n.index, env);
                if (i < 1 || static_cast<std::size_t>(i) > path.size()) throw InvalidInput("time index outside the path");
                return (path[static_cast<std::size_t>(i - 1)] == n.state) == n.equal;
            } else if constexpr (std::is_same_v<N, Not>) {
                return !test(*n.operand, path, env);
            } else {
                const bool a = test(*n.lhs, path, env);
                return n.is_and ? (a && test(*n.rhs, path, env)) : (a || test(*n.rhs, path, env));
            }
        },
        c.node);
}

std::string number_text(double v) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

std::string label_text(const std::string& label) {
    const bool plain = std::all_of(label.begin(), label.end(),
                                   [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
    const bool starts_ok = !label.empty() && !std::isdigit(static_cast<unsigned char>(label[0]));
    const bool integer = !label.empty() && std::all_of(label.begin(), label.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    if ((plain && starts_ok) || integer) return label;
    return "\"" + label + "\"";
}

std::string print(const Cond& c, const StateSpace& space);

std::string print(const Expr& e, const StateSpace& space) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Number>) {
                return n.value < 0 ? "(-" + number_text(-n.value) + ")" : number_text(n.value);
            } else if constexpr (std::is_same_v<N, Negate>) {
                return "-" + print(*n.operand, space);
            } else if constexpr (std::is_same_v<N, Binary>) {
                return "(" + print(*n.lhs, space) + " " + n.op + " " + print(*n.rhs, space) + ")";
            } else if constexpr (std::is_same_v<N, Extremum>) {
                return std::string(n.is_max ? "max(" : "min(") + print(*n.lhs, space) + ", " + print(*n.rhs, space) + ")";
            } else if constexpr (std::is_same_v<N, Indicator>) {
                return "ind(" + print(*n.condition, space) + ")";
            } else {
                return "sum(" + n.variable + "=" + std::to_string(n.from) + ".." + std::to_string(n.to) + ", " +
                       print(*n.body, space) + ")";
            }
        },
        e.node);
}

std::string print(const Cond& c, const StateSpace& space) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, StateTest>) {
                std::string idx;
                if (n.index.variable) {
                    idx = *n.index.variable;
                    if (n.index.offset > 0) idx += "+" + std::to_string(n.index.offset);
                    if (n.index.offset < 0) idx += "-" + std::to_string(-n.index.offset);
                } else {
                    idx = std::to_string(n.index.offset);
                }
                return "X[" + idx + "] " + (n.equal ? "==" : "!=") + " " + label_text(space.label(n.state));
            } else if constexpr (std::is_same_v<N, Not>) {
                return "!" + print(*n.operand, space);
            } else {
                return "(" + print(*n.lhs, space) + (n.is_and ? " && " : " || ") + print(*n.rhs, space) + ")";
            }
        },
        c.node);
}

using Renaming = std::vector<std::pair<std::string, std::string>>;

bool same_index(const Index& a, const Index& b, const Renaming& names) {
    if (a.offset != b.offset || a.variable.has_value() != b.variable.has_value()) return false;
    if (!a.variable) return true;
    for (auto it = names.rbegin(); it != names.rend(); ++it) {
        if (it->first == *a.variable || it->second == *b.variable) return it->first == *a.variable && it->second == *b.variable;
    }
    return *a.variable == *b.variable;
}

bool alpha(const Cond& a, const Cond& b, Renaming& names);

bool alpha(const Expr& a, const Expr& b, Renaming& names) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& n) -> bool {
            using N = std::decay_t<decltype(n)>;
            const auto& m = std::get<N>(b.node);
            if constexpr (std::is_same_v<N, Number>) {
                return n.value == m.value;
            } else if constexpr (std::is_same_v<N, Negate>) {
                return alpha(*n.operand, *m.operand, names);
            } else if constexpr (std::is_same_v<N, Binary>) {
                return n.op == m.op && alpha(*n.lhs, *m.lhs, names) && alpha(*n.rhs, *m.rhs, names);
            } else if constexpr (std::is_same_v<N, Extremum>) {
                return n.is_max == m.is_max && alpha(*n.lhs, *m.lhs, names) && alpha(*n.rhs, *m.rhs, names);
            } else if constexpr (std::is_same_v<N, Indicator>) {
                return alpha(*n.condition, *m.condition, names);
            } else {
                if (n.from != m.from || n.to != m.to) return false;
                names.emplace_back(n.variable, m.variable);
                const bool ok = alpha(*n.body, *m.body, names);
                names.pop_back();
                return ok;
            }
        },
        a.node);
}

bool alpha(const Cond& a, const Cond& b, Renaming& names) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& n) -> bool {
            using N = std::decay_t<decltype(n)>;
            const auto& m = std::get<N>(b.node);
            if constexpr (std::is_same_v<N, StateTest>) {
                return n.state == m.state && n.equal == m.equal && same_index(n.index, m.index, names);
            } else if constexpr (std::is_same_v<N, Not>) {
                return alpha(*n.operand, *m.operand, names);
            } else {
                return n.is_and == m.is_and && alpha(*n.lhs, *m.lhs, names) && alpha(*n.rhs, *m.rhs, names);
            }
        },
        a.node);
}

}  // namespace

GambleExpr::GambleExpr(ast::ExprPtr root, StateSpace space) : root_(std::move(root)), space_(std::move(space)) {
    if (!root_) throw InvalidInput("empty expression");
    Env env;
    Range r;
    index_range(*root_, env, r);
    if (r.hi > 0 && r.lo < 1) throw InvalidInput("time indices start at 1, found " + std::to_string(r.lo));
    depth_ = static_cast<std::size_t>(r.hi);
}

double GambleExpr::evaluate(std::span<const StateIndex> path) const {
    if (path.size() < depth_) throw InvalidInput("path shorter than the expression's depth");
    Env env;
    return eval(*root_, path, env);
}

GambleExpr parse_gamble(std::string_view source, const StateSpace& space) {
    Parser parser(Lexer(source).run(), space);
    ExprPtr root = parser.parse();
    try {
        return GambleExpr(std::move(root), space);
    } catch (const InvalidInput& e) {
        throw SyntaxError(e.what(), 1, 1);
    }
}

FinitaryGamble compile(const GambleExpr& expr, std::optional<std::size_t> depth, std::size_t cap) {
    const std::size_t n = depth.value_or(expr.depth());
    if (n < expr.depth()) {
        throw InvalidInput("requested depth " + std::to_string(n) + " is below the expression's depth " +
                           std::to_string(expr.depth()));
    }
    return FinitaryGamble::tabulate(
        expr.space().size(), n, [&](std::span<const StateIndex> path) { return expr.evaluate(path); }, cap);
}

std::string to_source(const GambleExpr& expr) { return print(expr.root(), expr.space()); }

bool alpha_equivalent(const GambleExpr& a, const GambleExpr& b) {
    Renaming names;
    return alpha(a.root(), b.root(), names);
}

}  // namespace iptree
