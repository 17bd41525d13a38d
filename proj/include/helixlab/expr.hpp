#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace helixlab {

/// Immutable expression tree over one parameter. Supports exact evaluation
/// and repeated symbolic differentiation (chain/product/quotient rules with
/// light constant folding); `^` exponents are restricted to constant
/// subtrees so every derivative stays closed-form.
class Expr {
public:
    enum class Kind { Constant, Variable, Neg, Add, Sub, Mul, Div, Pow, Fn };
    enum class FnKind { Sin, Cos, Sinh, Cosh, Tan, Tanh, Exp, Log, Sqrt, Abs };

    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    struct Node {
        Kind kind;
        double value = 0.0;  // Constant
        FnKind fn = FnKind::Sin;
        NodePtr a, b;
    };

    Expr() = default;

    static Expr constant(double v);
    static Expr variable();
    static Expr add(const Expr& a, const Expr& b);
    static Expr sub(const Expr& a, const Expr& b);
    static Expr mul(const Expr& a, const Expr& b);
    static Expr div(const Expr& a, const Expr& b);
    static Expr pow(const Expr& base, double exponent);
    static Expr neg(const Expr& a);
    static Expr fn(FnKind f, const Expr& arg);

    bool valid() const { return node_ != nullptr; }

    /// Throws DomainError on log/sqrt of a negative value or division by zero.
    double eval(double t) const;

    Expr derivative() const;

    /// Fully parenthesized form; reparses (with the same parameter name)
    /// to a structurally equal tree.
    std::string to_string(std::string_view param = "t") const;

    bool same_structure(const Expr& other) const;

    /// True when the tree contains no Variable node; *out receives the value.
    bool is_constant(double* out = nullptr) const;

    const NodePtr& node() const { return node_; }

private:
    explicit Expr(NodePtr n) : node_(std::move(n)) {}
    NodePtr node_;
};

/// Parse an expression over the single parameter `param` (functions
/// sin, cos, sinh, cosh, tan, tanh, exp, log, sqrt, abs; constants pi, e).
/// Throws SyntaxError (with byte offset and expected-token set) or
/// UnknownIdentifier.
Expr parse_expr(std::string_view text, std::string_view param = "t");

/// Value followed by derivatives up to `order` (0..3), all exact via
/// symbolic differentiation.
std::vector<double> eval_with_derivatives(const Expr& e, double t, int order);

}  // namespace helixlab
