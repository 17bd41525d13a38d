#include "helixlab/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>

#include "helixlab/errors.hpp"

namespace helixlab {

namespace {

using Kind = Expr::Kind;
using FnKind = Expr::FnKind;

const char* fn_name(FnKind f) {
    switch (f) {
        case FnKind::Sin: return "sin";
        case FnKind::Cos: return "cos";
        case FnKind::Sinh: return "sinh";
        case FnKind::Cosh: return "cosh";
        case FnKind::Tan: return "tan";
        case FnKind::Tanh: return "tanh";
        case FnKind::Exp: return "exp";
        case FnKind::Log: return "log";
        case FnKind::Sqrt: return "sqrt";
        case FnKind::Abs: return "abs";
    }
    return "?";
}

std::optional<FnKind> fn_by_name(std::string_view s) {
    static const std::map<std::string_view, FnKind> table = {
        {"sin", FnKind::Sin},   {"cos", FnKind::Cos},   {"sinh", FnKind::Sinh},
        {"cosh", FnKind::Cosh}, {"tan", FnKind::Tan},   {"tanh", FnKind::Tanh},
        {"exp", FnKind::Exp},   {"log", FnKind::Log},   {"sqrt", FnKind::Sqrt},
        {"abs", FnKind::Abs},
    };
    auto it = table.find(s);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

double apply_fn(FnKind f, double v) {
    switch (f) {
        case FnKind::Sin: return std::sin(v);
        case FnKind::Cos: return std::cos(v);
        case FnKind::Sinh: return std::sinh(v);
        case FnKind::Cosh: return std::cosh(v);
        case FnKind::Tan: return std::tan(v);
        case FnKind::Tanh: return std::tanh(v);
        case FnKind::Exp: return std::exp(v);
        case FnKind::Log:
            if (v <= 0.0) throw DomainError("log of non-positive value");
            return std::log(v);
        case FnKind::Sqrt:
            if (v < 0.0) throw DomainError("sqrt of negative value");
            return std::sqrt(v);
        case FnKind::Abs: return std::fabs(v);
    }
    return 0.0;
}

bool fn_total(FnKind f) { return f != FnKind::Log && f != FnKind::Sqrt; }

}  // namespace

Expr Expr::constant(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->value = v;
    return Expr(n);
}

Expr Expr::variable() {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    return Expr(n);
}

namespace {

bool const_value(const Expr& e, double* out) { return e.is_constant(out); }

}  // namespace

Expr Expr::add(const Expr& a, const Expr& b) {
    double ca, cb;
    const bool ka = const_value(a, &ca), kb = const_value(b, &cb);
    if (ka && kb) return constant(ca + cb);
    if (ka && ca == 0.0) return b;
    if (kb && cb == 0.0) return a;
    auto n = std::make_shared<Node>();
    n->kind = Kind::Add;
    n->a = a.node();
    n->b = b.node();
    return Expr(n);
}

Expr Expr::sub(const Expr& a, const Expr& b) {
    double ca, cb;
    const bool ka = const_value(a, &ca), kb = const_value(b, &cb);
    if (ka && kb) return constant(ca - cb);
    if (kb && cb == 0.0) return a;
    if (ka && ca == 0.0) return neg(b);
    auto n = std::make_shared<Node>();
    n->kind = Kind::Sub;
    n->a = a.node();
    n->b = b.node();
    return Expr(n);
}

Expr Expr::mul(const Expr& a, const Expr& b) {
    double ca, cb;
    const bool ka = const_value(a, &ca), kb = const_value(b, &cb);
    if (ka && kb) return constant(ca * cb);
    if ((ka && ca == 0.0) || (kb && cb == 0.0)) return constant(0.0);
    if (ka && ca == 1.0) return b;
    if (kb && cb == 1.0) return a;
    auto n = std::make_shared<Node>();
    n->kind = Kind::Mul;
    n->a = a.node();
    n->b = b.node();
    return Expr(n);
}

Expr Expr::div(const Expr& a, const Expr& b) {
    double ca, cb;
    const bool ka = const_value(a, &ca), kb = const_value(b, &cb);
    if (kb && cb != 0.0) {
        if (ka) return constant(ca / cb);
        if (cb == 1.0) return a;
    }
    if (ka && ca == 0.0 && !(kb && cb == 0.0)) return constant(0.0);
    auto n = std::make_shared<Node>();
    n->kind = Kind::Div;
    n->a = a.node();
    n->b = b.node();
    return Expr(n);
}

Expr Expr::pow(const Expr& base, double exponent) {
    if (exponent == 0.0) return constant(1.0);
    if (exponent == 1.0) return base;
    double cb;
    if (const_value(base, &cb)) {
        const double v = std::pow(cb, exponent);
        if (std::isfinite(v)) return constant(v);
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Pow;
    n->a = base.node();
    n->value = exponent;
    return Expr(n);
}

Expr Expr::neg(const Expr& a) {
    double ca;
    if (const_value(a, &ca)) return constant(-ca);
    if (a.node()->kind == Kind::Neg) return Expr(a.node()->a);
    auto n = std::make_shared<Node>();
    n->kind = Kind::Neg;
    n->a = a.node();
    return Expr(n);
}

Expr Expr::fn(FnKind f, const Expr& arg) {
    double ca;
    // Fold only total functions; log/sqrt of a constant may be a domain
    // error that has to surface at evaluation time.
    if (const_value(arg, &ca) && fn_total(f)) return constant(apply_fn(f, ca));
    auto n = std::make_shared<Node>();
    n->kind = Kind::Fn;
    n->fn = f;
    n->a = arg.node();
    return Expr(n);
}

double Expr::eval(double t) const {
    const Node* n = node_.get();
    switch (n->kind) {
        case Kind::Constant: return n->value;
        case Kind::Variable: return t;
        case Kind::Neg: return -Expr(n->a).eval(t);
        case Kind::Add: return Expr(n->a).eval(t) + Expr(n->b).eval(t);
        case Kind::Sub: return Expr(n->a).eval(t) - Expr(n->b).eval(t);
        case Kind::Mul: return Expr(n->a).eval(t) * Expr(n->b).eval(t);
        case Kind::Div: {
            const double num = Expr(n->a).eval(t);
            const double den = Expr(n->b).eval(t);
            if (den == 0.0) throw DomainError("division by zero");
            return num / den;
        }
        case Kind::Pow: {
            const double base = Expr(n->a).eval(t);
            const double v = std::pow(base, n->value);
            if (!std::isfinite(v))
                throw DomainError("power left the real domain");
            return v;
        }
        case Kind::Fn: return apply_fn(n->fn, Expr(n->a).eval(t));
    }
    return 0.0;
}

Expr Expr::derivative() const {
    const Node* n = node_.get();
    const Expr a = n->a ? Expr(n->a) : Expr();
    const Expr b = n->b ? Expr(n->b) : Expr();
    switch (n->kind) {
        case Kind::Constant: return constant(0.0);
        case Kind::Variable: return constant(1.0);
        case Kind::Neg: return neg(a.derivative());
        case Kind::Add: return add(a.derivative(), b.derivative());
        case Kind::Sub: return sub(a.derivative(), b.derivative());
        case Kind::Mul:
            return add(mul(a.derivative(), b), mul(a, b.derivative()));
        case Kind::Div:
            return div(sub(mul(a.derivative(), b), mul(a, b.derivative())),
                       mul(b, b));
        case Kind::Pow:
            // d(u^p) = p u^(p-1) u'
            return mul(mul(constant(n->value), pow(a, n->value - 1.0)),
                       a.derivative());
        case Kind::Fn: {
            const Expr da = a.derivative();
            switch (n->fn) {
                case FnKind::Sin: return mul(fn(FnKind::Cos, a), da);
                case FnKind::Cos: return neg(mul(fn(FnKind::Sin, a), da));
                case FnKind::Sinh: return mul(fn(FnKind::Cosh, a), da);
                case FnKind::Cosh: return mul(fn(FnKind::Sinh, a), da);
                case FnKind::Tan: {
                    const Expr t = fn(FnKind::Tan, a);
                    return mul(add(constant(1.0), mul(t, t)), da);
                }
                case FnKind::Tanh: {
                    const Expr t = fn(FnKind::Tanh, a);
                    return mul(sub(constant(1.0), mul(t, t)), da);
                }
                case FnKind::Exp: return mul(fn(FnKind::Exp, a), da);
                case FnKind::Log: return div(da, a);
                case FnKind::Sqrt:
                    return div(da, mul(constant(2.0), fn(FnKind::Sqrt, a)));
                case FnKind::Abs:
                    // d|u| = u' * u / |u|; undefined at u = 0, where
                    // evaluation reports division by zero.
                    return div(mul(da, a), fn(FnKind::Abs, a));
            }
            return Expr();
        }
    }
    return Expr();
}

bool Expr::is_constant(double* out) const {
    const Node* n = node_.get();
    switch (n->kind) {
        case Kind::Constant:
            if (out) *out = n->value;
            return true;
        default:
            return false;
    }
}

namespace {

void print_node(const Expr::Node* n, std::string_view param, std::string& out) {
    switch (n->kind) {
        case Kind::Constant: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n->value);
            out += buf;
            break;
        }
        case Kind::Variable: out += param; break;
        case Kind::Neg:
            out += "(-";
            print_node(n->a.get(), param, out);
            out += ')';
            break;
        case Kind::Add:
        case Kind::Sub:
        case Kind::Mul:
        case Kind::Div: {
            const char op = n->kind == Kind::Add   ? '+'
                            : n->kind == Kind::Sub ? '-'
                            : n->kind == Kind::Mul ? '*'
                                                   : '/';
            out += '(';
            print_node(n->a.get(), param, out);
            out += op;
            print_node(n->b.get(), param, out);
            out += ')';
            break;
        }
        case Kind::Pow: {
            out += '(';
            print_node(n->a.get(), param, out);
            out += '^';
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n->value);
            // keep negative exponents reparseable: (x^-2) parses via unary minus
            out += buf;
            out += ')';
            break;
        }
        case Kind::Fn:
            out += fn_name(n->fn);
            out += '(';
            print_node(n->a.get(), param, out);
            out += ')';
            break;
    }
}

}  // namespace

std::string Expr::to_string(std::string_view param) const {
    std::string out;
    print_node(node_.get(), param, out);
    return out;
}

bool Expr::same_structure(const Expr& other) const {
    struct Cmp {
        static bool eq(const Node* a, const Node* b) {
            if (a == b) return true;
            if (!a || !b) return false;
            if (a->kind != b->kind) return false;
            if (a->kind == Kind::Constant || a->kind == Kind::Pow)
                if (a->value != b->value) return false;
            if (a->kind == Kind::Fn && a->fn != b->fn) return false;
            return eq(a->a.get(), b->a.get()) && eq(a->b.get(), b->b.get());
        }
    };
    return Cmp::eq(node_.get(), other.node_.get());
}

// ---------------------------------------------------------------------------
// Parser: recursive descent, byte offsets, standard precedence
//   ^  >  unary -  >  * /  >  + -
// with left associativity for binary + - * / and a constant-only exponent.
// ---------------------------------------------------------------------------

namespace {

struct Parser {
    std::string_view text;
    std::string_view param;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) {
        skip_ws();
        throw SyntaxError(msg, pos, std::move(expected));
    }

    Expr parse_full() {
        Expr e = parse_sum();
        if (!at_end()) fail("unexpected trailing input", {"end of input", "operator"});
        return e;
    }

    Expr parse_sum() {
        Expr e = parse_term();
        for (;;) {
            const char c = peek();
            if (c == '+' || c == '-') {
                ++pos;
                Expr rhs = parse_term();
                e = c == '+' ? Expr::add(e, rhs) : Expr::sub(e, rhs);
            } else {
                return e;
            }
        }
    }

    Expr parse_term() {
        Expr e = parse_unary();
        for (;;) {
            const char c = peek();
            if (c == '*' || c == '/') {
                ++pos;
                Expr rhs = parse_unary();
                e = c == '*' ? Expr::mul(e, rhs) : Expr::div(e, rhs);
            } else {
                return e;
            }
        }
    }

    Expr parse_unary() {
        const char c = peek();
        if (c == '-') {
            ++pos;
            return Expr::neg(parse_unary());
        }
        if (c == '+') {
            ++pos;
            return parse_unary();
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (peek() == '^') {
            ++pos;
            skip_ws();
            const std::size_t exp_off = pos;
            Expr exp = parse_unary();  // right-assoc; allows 2^-3 and 2^3^2
            double v;
            if (!exp.is_constant(&v))
                throw SyntaxError("exponent must be a constant", exp_off,
                                  {"constant expression"});
            return Expr::pow(base, v);
        }
        return base;
    }

    Expr parse_atom() {
        skip_ws();
        if (pos >= text.size())
            fail("unexpected end of input", {"number", "identifier", "'('"});
        const char c = text[pos];
        if (c == '(') {
            ++pos;
            Expr e = parse_sum();
            if (peek() != ')') fail("expected ')'", {"')'"});
            ++pos;
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail("unexpected character", {"number", "identifier", "'('"});
    }

    Expr parse_number() {
        const char* begin = text.data() + pos;
        const char* end = text.data() + text.size();
        double v = 0.0;
        auto res = std::from_chars(begin, end, v);
        if (res.ec != std::errc() || res.ptr == begin)
            fail("malformed number", {"number"});
        pos = static_cast<std::size_t>(res.ptr - text.data());
        return Expr::constant(v);
    }

    Expr parse_ident() {
        const std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        const std::string_view name = text.substr(start, pos - start);
        if (name == param) return Expr::variable();
        if (name == "pi") return Expr::constant(std::numbers::pi);
        if (name == "e") return Expr::constant(std::numbers::e);
        if (auto f = fn_by_name(name)) {
            if (peek() != '(') fail("expected '(' after function name", {"'('"});
            ++pos;
            Expr arg = parse_sum();
            if (peek() != ')') fail("expected ')'", {"')'"});
            ++pos;
            return Expr::fn(*f, arg);
        }
        throw UnknownIdentifier(std::string(name), start);
    }
};

}  // namespace

Expr parse_expr(std::string_view text, std::string_view param) {
    if (text.empty()) throw SyntaxError("empty expression", 0, {"expression"});
    Parser p{text, param};
    return p.parse_full();
}

std::vector<double> eval_with_derivatives(const Expr& e, double t, int order) {
    if (order < 0 || order > 3)
        throw DomainError("derivative order must be in [0, 3]");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(order) + 1);
    Expr cur = e;
    out.push_back(cur.eval(t));
    for (int k = 0; k < order; ++k) {
        cur = cur.derivative();
        out.push_back(cur.eval(t));
    }
    return out;
}

}  // namespace helixlab
