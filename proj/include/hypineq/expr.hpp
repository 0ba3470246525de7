#pragma once

/**
 * @file expr.hpp
 * @brief A tiny arithmetic language for coefficients, weight exponents and
 *        admissibility predicates.
 *
 * Grammar (whitespace ignored):
 *
 *     predicate := sum (cmp sum)*          cmp: < <= > >= (also the Unicode forms)
 *     sum       := product (('+' | '-') product)*
 *     product   := unary (('*' | '/') unary)*
 *     unary     := ('-' | '+') unary | power
 *     power     := primary ('^' unary)?    right associative, -2^2 = -(2^2)
 *     primary   := number | symbol | 'abs' '(' sum ')' | '(' sum ')'
 *
 * Chained comparisons a < b < c mean (a < b) and (b < c). A predicate
 * evaluates to 1 or 0.
 */

#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hypineq/errors.hpp"

namespace hypineq::expr {

/// Symbol table used for evaluation.
using Env = std::map<std::string, double, std::less<>>;

enum class Op { Number, Symbol, Neg, Add, Sub, Mul, Div, Pow, Abs, Less, LessEq, Greater, GreaterEq };

struct Node {
    Op op = Op::Number;
    double number = 0.0;
    std::string symbol;
    std::vector<std::shared_ptr<const Node>> args;
};
using NodePtr = std::shared_ptr<const Node>;

/// Symbols accepted by default: the parameter names plus Sn.
inline const std::set<std::string, std::less<>>& parameter_symbols() {
    static const std::set<std::string, std::less<>> symbols{"n", "alpha", "p", "C", "q", "s", "R", "c", "Sn"};
    return symbols;
}

namespace detail {

class Parser {
public:
    Parser(std::string_view text, const std::set<std::string, std::less<>>& symbols)
        : text_(text), symbols_(symbols) {}

    NodePtr parse() {
        auto node = predicate();
        skip_ws();
        if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return node;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, 1, pos_ + 1); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(std::string_view token) {
        skip_ws();
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    static NodePtr make(Op op, std::vector<NodePtr> args) {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->args = std::move(args);
        return n;
    }

    bool comparison(Op& op) {
        if (eat("<=") || eat("\xE2\x89\xA4")) return op = Op::LessEq, true;
        if (eat(">=") || eat("\xE2\x89\xA5")) return op = Op::GreaterEq, true;
        if (eat("<")) return op = Op::Less, true;
        if (eat(">")) return op = Op::Greater, true;
        return false;
    }

    NodePtr predicate() {
        auto lhs = sum();
        Op op;
        if (!comparison(op)) return lhs;
        // a < b < c becomes the product of the 0/1 links (a < b) and (b < c).
        std::vector<NodePtr> chain{lhs};
        std::vector<Op> ops;
        do {
            ops.push_back(op);
            chain.push_back(sum());
        } while (comparison(op));
        NodePtr result;
        for (std::size_t i = 0; i < ops.size(); ++i) {
            auto link = make(ops[i], {chain[i], chain[i + 1]});
            result = result ? make(Op::Mul, {result, link}) : link;
        }
        return result;
    }

    NodePtr sum() {
        auto node = product();
        for (;;) {
            if (eat("+")) {
                node = make(Op::Add, {node, product()});
            } else if (eat("-") || eat("\xE2\x88\x92")) {
                node = make(Op::Sub, {node, product()});
            } else {
                return node;
            }
        }
    }

    NodePtr product() {
        auto node = unary();
        for (;;) {
            if (eat("*")) {
                node = make(Op::Mul, {node, unary()});
            } else if (eat("/")) {
                node = make(Op::Div, {node, unary()});
            } else {
                return node;
            }
        }
    }

    NodePtr unary() {
        if (eat("-") || eat("\xE2\x88\x92")) return make(Op::Neg, {unary()});
        if (eat("+")) return unary();
        return power();
    }

    NodePtr power() {
        auto base = primary();
        if (eat("^")) return make(Op::Pow, {base, unary()});
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char ch = text_[pos_];
        if (ch == '(') {
            ++pos_;
            auto inner = sum();
            if (!eat(")")) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string name(text_.substr(start, pos_ - start));
            if (name == "abs") {
                if (!eat("(")) fail("expected '(' after abs");
                auto inner = sum();
                if (!eat(")")) fail("expected ')'");
                return make(Op::Abs, {inner});
            }
            if (!symbols_.contains(name)) {
                pos_ = start;
                fail("unknown symbol '" + name + "'");
            }
            auto n = std::make_shared<Node>();
            n->op = Op::Symbol;
            n->symbol = name;
            return n;
        }
        fail("unexpected '" + std::string(1, ch) + "'");
    }

    NodePtr number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
            if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
                pos_ = look;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        const std::string lit(text_.substr(start, pos_ - start));
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(lit, &used);
        } catch (const std::exception&) {
            pos_ = start;
            fail("malformed number '" + lit + "'");
        }
        if (used != lit.size()) {
            pos_ = start;
            fail("malformed number '" + lit + "'");
        }
        auto n = std::make_shared<Node>();
        n->op = Op::Number;
        n->number = v;
        return n;
    }

    std::string_view text_;
    const std::set<std::string, std::less<>>& symbols_;
    std::size_t pos_ = 0;
};

/// Raised when a referenced symbol has no value in the environment.
class MissingSymbol : public Error {
public:
    explicit MissingSymbol(std::string name)
        : Error("parameter '" + name + "' is required but was not supplied"), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

inline double eval(const Node& node, const Env& env) {
    auto arg = [&](std::size_t i) { return eval(*node.args[i], env); };
    switch (node.op) {
    case Op::Number: return node.number;
    case Op::Symbol: {
        const auto it = env.find(node.symbol);
        if (it == env.end()) throw MissingSymbol(node.symbol);
        return it->second;
    }
    case Op::Neg: return -arg(0);
    case Op::Add: return arg(0) + arg(1);
    case Op::Sub: return arg(0) - arg(1);
    case Op::Mul: return arg(0) * arg(1);
    case Op::Div: return arg(0) / arg(1);
    case Op::Pow: return std::pow(arg(0), arg(1));
    case Op::Abs: return std::abs(arg(0));
    case Op::Less: return arg(0) < arg(1) ? 1.0 : 0.0;
    case Op::LessEq: return arg(0) <= arg(1) ? 1.0 : 0.0;
    case Op::Greater: return arg(0) > arg(1) ? 1.0 : 0.0;
    case Op::GreaterEq: return arg(0) >= arg(1) ? 1.0 : 0.0;
    }
    return 0.0;
}

inline void collect(const Node& node, std::set<std::string>& out) {
    if (node.op == Op::Symbol) out.insert(node.symbol);
    for (const auto& a : node.args) collect(*a, out);
}

inline bool is_comparison(Op op) {
    return op == Op::Less || op == Op::LessEq || op == Op::Greater || op == Op::GreaterEq;
}

inline bool is_predicate(const Node& node) {
    if (is_comparison(node.op)) return true;
    return node.op == Op::Mul && is_predicate(*node.args[0]) && is_predicate(*node.args[1]);
}

}  // namespace detail

using detail::MissingSymbol;

/// A parsed expression that remembers its source text.
class Expression {
public:
    Expression() : text_("0"), root_(std::make_shared<Node>()) {}

    static Expression parse(std::string_view text,
                            const std::set<std::string, std::less<>>& symbols = parameter_symbols()) {
        Expression e;
        e.text_ = std::string(text);
        e.root_ = detail::Parser(text, symbols).parse();
        return e;
    }

    double evaluate(const Env& env) const { return detail::eval(*root_, env); }

    /// True for comparison expressions (chains included).
    bool is_predicate() const { return detail::is_predicate(*root_); }

    std::set<std::string> symbols() const {
        std::set<std::string> out;
        detail::collect(*root_, out);
        return out;
    }

    const std::string& text() const noexcept { return text_; }
    const Node& root() const noexcept { return *root_; }

    bool operator==(const Expression& other) const { return text_ == other.text_; }

private:
    std::string text_;
    NodePtr root_;
};

/// Multivariate polynomial in canonical form: monomial (symbol -> power) -> coefficient.
using Monomial = std::map<std::string, int>;
using Polynomial = std::map<Monomial, double>;

namespace detail {

inline Polynomial poly_constant(double v) {
    Polynomial p;
    if (v != 0.0) p[{}] = v;
    return p;
}

inline Polynomial poly_add(Polynomial a, const Polynomial& b, double sign) {
    for (const auto& [m, c] : b) {
        a[m] += sign * c;
        if (a[m] == 0.0) a.erase(m);
    }
    return a;
}

inline Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
    Polynomial out;
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b) {
            Monomial m = ma;
            for (const auto& [s, k] : mb) m[s] += k;
            out[m] += ca * cb;
        }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0.0; });
    return out;
}

inline bool poly_is_constant(const Polynomial& p, double& value) {
    if (p.empty()) return value = 0.0, true;
    if (p.size() == 1 && p.begin()->first.empty()) return value = p.begin()->second, true;
    return false;
}

inline Polynomial to_poly(const Node& node) {
    auto arg = [&](std::size_t i) { return to_poly(*node.args[i]); };
    switch (node.op) {
    case Op::Number: return poly_constant(node.number);
    case Op::Symbol: return Polynomial{{Monomial{{node.symbol, 1}}, 1.0}};
    case Op::Neg: return poly_add({}, arg(0), -1.0);
    case Op::Add: return poly_add(arg(0), arg(1), 1.0);
    case Op::Sub: return poly_add(arg(0), arg(1), -1.0);
    case Op::Mul: return poly_mul(arg(0), arg(1));
    case Op::Div: {
        double d = 0.0;
        if (!poly_is_constant(arg(1), d) || d == 0.0) throw SpecError("division by a non-constant is not polynomial");
        return poly_mul(arg(0), poly_constant(1.0 / d));
    }
    case Op::Pow: {
        double k = 0.0;
        if (!poly_is_constant(arg(1), k) || k < 0.0 || k != std::floor(k))
            throw SpecError("non-integer or symbolic exponent is not polynomial");
        Polynomial result = poly_constant(1.0);
        const Polynomial base = arg(0);
        for (int i = 0; i < static_cast<int>(k); ++i) result = poly_mul(result, base);
        return result;
    }
    default: throw SpecError("expression is not polynomial");
    }
}

}  // namespace detail

/// Canonical polynomial form; throws SpecError for non-polynomial input.
inline Polynomial to_polynomial(const Expression& e) { return detail::to_poly(e.root()); }

/// Symbolic identity of two polynomial expressions (coefficients compared to rel_tol).
inline bool polynomially_equivalent(const Expression& a, const Expression& b, double rel_tol = 1e-12) {
    const Polynomial diff = detail::poly_add(to_polynomial(a), to_polynomial(b), -1.0);
    double scale = 1.0;
    for (const auto& [m, c] : to_polynomial(a)) scale = std::max(scale, std::abs(c));
    for (const auto& [m, c] : diff)
        if (std::abs(c) > rel_tol * scale) return false;
    return true;
}

}  // namespace hypineq::expr
