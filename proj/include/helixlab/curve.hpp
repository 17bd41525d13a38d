#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "helixlab/expr.hpp"
#include "helixlab/minkowski.hpp"

namespace helixlab {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double length() const { return hi - lo; }
};

/// Analytic curve alpha(t) = (x(t), y(t), z(t)) on a closed interval.
struct CurveSpec {
    Expr x, y, z;
    std::string param = "t";
    Interval domain;
    int samples = 1001;

    Vec3 eval(double t) const { return {x.eval(t), y.eval(t), z.eval(t)}; }
};

/// Scalar function f(s) on a closed interval (`.fn` document).
struct ScalarFnSpec {
    Expr f;
    std::string param = "s";
    Interval domain;
    int samples = 1001;
};

/// Parse the line-oriented `key = value` curve document: keys `param`,
/// `x`, `y`, `z`, `domain = [a, b]`, optional `samples`; `#` starts a
/// comment. Throws MissingField / SyntaxError.
CurveSpec parse_curve_document(std::string_view text);

/// Same format with keys `param`, `f`, `domain`, `samples`.
ScalarFnSpec parse_fn_document(std::string_view text);

CurveSpec load_curve_file(const std::string& path);
ScalarFnSpec load_fn_file(const std::string& path);

/// Scalar field over arc length: either an expression (evaluable anywhere,
/// exact derivative) or a uniform sample table (node lookup with a
/// high-order local-polynomial fallback between nodes).
class ScalarField {
public:
    static ScalarField from_expr(Expr f);
    static ScalarField from_constant(double v);
    static ScalarField from_table(double s0, double ds, std::vector<double> values);

    double operator()(double s) const;

    /// True for expression-backed fields, where derivative() is exact.
    bool analytic() const { return static_cast<bool>(expr_); }
    double derivative(double s) const;

    bool is_table() const { return !table_.empty(); }
    double table_start() const { return s0_; }
    double table_step() const { return ds_; }
    const std::vector<double>& table_values() const { return table_; }

private:
    std::optional<Expr> expr_;
    std::optional<Expr> dexpr_;
    double s0_ = 0.0, ds_ = 0.0;
    std::vector<double> table_;
};

/// Curve with components replaced by their images under a linear map,
/// built symbolically so derivatives stay exact.
CurveSpec apply_linear_map(const Mat3& L, const CurveSpec& curve);

}  // namespace helixlab
