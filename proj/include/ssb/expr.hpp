#ifndef SSB_EXPR_HPP
#define SSB_EXPR_HPP

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ssb/dual.hpp"
#include "ssb/errors.hpp"
#include "ssb/linalg.hpp"

namespace ssb {

/// Small arithmetic expression over named variables, evaluable on double or
/// on any forward-mode jet type.
///
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*
///   unary  := ('+' | '-') unary | power
///   power  := atom ('^' unary)?
///   atom   := number | variable | func '(' expr ')' | '(' expr ')'
///   func   := exp | log | sin | cos | tan | sqrt | tanh
class Expr {
public:
    Expr() = default;

    static Expr parse(std::string_view text, std::vector<std::string> variables) {
        Expr e;
        e.text_ = std::string(text);
        e.vars_ = std::move(variables);
        Parser p{text, 0, e.vars_};
        e.root_ = p.parse_expr();
        p.skip();
        if (p.pos != text.size()) p.fail("unexpected trailing input");
        return e;
    }

    /// Variables x0..x{m-1}.
    static Expr parse_base(std::string_view text, int m) { return parse(text, numbered("x", m)); }

    /// Variables x0..x{m-1}, u0..u{k-1} in that order.
    static Expr parse_total(std::string_view text, int m, int k) {
        auto v = numbered("x", m);
        for (auto& s : numbered("u", k)) v.push_back(s);
        return parse(text, std::move(v));
    }

    static std::vector<std::string> numbered(const std::string& prefix, int n) {
        std::vector<std::string> out;
        for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
        return out;
    }

    const std::string& text() const { return text_; }
    std::size_t arity() const { return vars_.size(); }

    template <class T>
    T operator()(const VecT<T>& vars) const {
        if (!root_) throw config_error("empty expression");
        if (static_cast<std::size_t>(vars.size()) != vars_.size())
            throw config_error("expression '" + text_ + "' expects " + std::to_string(vars_.size()) + " variables");
        return eval<T>(*root_, vars);
    }

private:
    enum class Op { num, var, add, sub, mul, div, pow, neg, exp, log, sin, cos, tan, sqrt, tanh };

    struct Node {
        Op op;
        double value = 0.0;
        int var = -1;
        std::shared_ptr<const Node> a, b;
    };
    using NodePtr = std::shared_ptr<const Node>;

    static NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    struct Parser {
        std::string_view s;
        std::size_t pos;
        const std::vector<std::string>& vars;

        [[noreturn]] void fail(const std::string& what) const {
            throw config_error("expression parse error at position " + std::to_string(pos) + " in '" +
                               std::string(s) + "': " + what);
        }
        void skip() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        bool accept(char c) {
            skip();
            if (pos < s.size() && s[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }

        NodePtr parse_expr() {
            NodePtr lhs = parse_term();
            for (;;) {
                if (accept('+')) {
                    lhs = make(Op::add, lhs, parse_term());
                } else if (accept('-')) {
                    lhs = make(Op::sub, lhs, parse_term());
                } else {
                    return lhs;
                }
            }
        }
        NodePtr parse_term() {
            NodePtr lhs = parse_unary();
            for (;;) {
                if (accept('*')) {
                    lhs = make(Op::mul, lhs, parse_unary());
                } else if (accept('/')) {
                    lhs = make(Op::div, lhs, parse_unary());
                } else {
                    return lhs;
                }
            }
        }
        NodePtr parse_unary() {
            if (accept('-')) return make(Op::neg, parse_unary());
            if (accept('+')) return parse_unary();
            return parse_power();
        }
        NodePtr parse_power() {
            NodePtr base = parse_atom();
            if (accept('^')) return make(Op::pow, base, parse_unary());
            return base;
        }
        NodePtr parse_atom() {
            skip();
            if (pos >= s.size()) fail("unexpected end of input");
            const char c = s[pos];
            if (c == '(') {
                ++pos;
                NodePtr inner = parse_expr();
                if (!accept(')')) fail("expected ')'");
                return inner;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                const std::string rest(s.substr(pos));
                char* end = nullptr;
                const double v = std::strtod(rest.c_str(), &end);
                if (end == rest.c_str()) fail("bad number");
                pos += static_cast<std::size_t>(end - rest.c_str());
                auto n = std::make_shared<Node>();
                n->op = Op::num;
                n->value = v;
                return n;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                const std::size_t start = pos;
                while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
                const std::string name(s.substr(start, pos - start));
                for (std::size_t i = 0; i < vars.size(); ++i)
                    if (vars[i] == name) {
                        auto n = std::make_shared<Node>();
                        n->op = Op::var;
                        n->var = static_cast<int>(i);
                        return n;
                    }
                if (name == "pi") {
                    auto n = std::make_shared<Node>();
                    n->op = Op::num;
                    n->value = 3.14159265358979323846;
                    return n;
                }
                Op f;
                if (name == "exp") f = Op::exp;
                else if (name == "log") f = Op::log;
                else if (name == "sin") f = Op::sin;
                else if (name == "cos") f = Op::cos;
                else if (name == "tan") f = Op::tan;
                else if (name == "sqrt") f = Op::sqrt;
                else if (name == "tanh") f = Op::tanh;
                else fail("unknown identifier '" + name + "'");
                if (!accept('(')) fail("expected '(' after " + name);
                NodePtr arg = parse_expr();
                if (!accept(')')) fail("expected ')'");
                return make(f, arg);
            }
            fail(std::string("unexpected character '") + c + "'");
        }
    };

    template <class T>
    static T eval(const Node& n, const VecT<T>& v) {
        using std::cos;
        using std::exp;
        using std::log;
        using std::pow;
        using std::sin;
        using std::sqrt;
        using std::tanh;
        switch (n.op) {
            case Op::num: return T(n.value);
            case Op::var: return v(n.var);
            case Op::add: return eval<T>(*n.a, v) + eval<T>(*n.b, v);
            case Op::sub: return eval<T>(*n.a, v) - eval<T>(*n.b, v);
            case Op::mul: return eval<T>(*n.a, v) * eval<T>(*n.b, v);
            case Op::div: return eval<T>(*n.a, v) / eval<T>(*n.b, v);
            case Op::neg: return -eval<T>(*n.a, v);
            case Op::pow:
                if (n.b->op == Op::num) return pow(eval<T>(*n.a, v), n.b->value);
                return exp(eval<T>(*n.b, v) * log(eval<T>(*n.a, v)));
            case Op::exp: return exp(eval<T>(*n.a, v));
            case Op::log: return log(eval<T>(*n.a, v));
            case Op::sin: return sin(eval<T>(*n.a, v));
            case Op::cos: return cos(eval<T>(*n.a, v));
            case Op::tan: return sin(eval<T>(*n.a, v)) / cos(eval<T>(*n.a, v));
            case Op::sqrt: return sqrt(eval<T>(*n.a, v));
            case Op::tanh: return tanh(eval<T>(*n.a, v));
        }
        return T(0.0);
    }

    std::string text_;
    std::vector<std::string> vars_;
    NodePtr root_;
};

} // namespace ssb

#endif // SSB_EXPR_HPP
