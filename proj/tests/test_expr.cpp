#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "helixlab/curve.hpp"
#include "helixlab/errors.hpp"
#include "helixlab/expr.hpp"

using namespace helixlab;

namespace {

// test-side oracle: classical 5-point central difference, independent of
// the library's differentiation path
double fd5(const std::function<double(double)>& f, double t, double h) {
    return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h);
}

}  // namespace

TEST_CASE("parser golden suite") {
    struct Ok {
        const char* input;
        const char* param;
        const char* printed;
    };
    // byte-exact pretty-printed forms
    const Ok ok_cases[] = {
        {"2*s^2 + cosh(s)", "s", "((2*(s^2))+cosh(s))"},
        {"sqrt(2)*t", "t", "(sqrt(2)*t)"},
        {"1+2*3", "t", "7"},
        {"2^-2", "t", "0.25"},
        {"-t^2", "t", "(-(t^2))"},
        {"1/0", "t", "(1/0)"},
        {"pi", "t", "3.1415926535897931"},
        {"abs(-t)", "t", "abs((-t))"},
        {"t*-1", "t", "(t*-1)"},
        {"log(e)", "t", "log(2.7182818284590451)"},
        {"tanh(0.5)+sinh(0.5)", "t", "0.98321246275375707"},
        {"2 ^ 3 ^ 2", "t", "512"},
        {"cos(t)^2+sin(t)^2", "t", "((cos(t)^2)+(sin(t)^2))"},
        {"s/sqrt(s^2-1)", "s", "(s/sqrt(((s^2)-1)))"},
        {"+t", "t", "t"},
    };
    for (const Ok& c : ok_cases) {
        CAPTURE(c.input);
        CHECK(parse_expr(c.input, c.param).to_string(c.param) == c.printed);
    }

    struct Err {
        const char* input;
        std::size_t offset;
        bool unknown_ident;
    };
    const Err err_cases[] = {
        {"sin(", 4, false},    // unexpected end of input
        {"x+1", 0, true},      // unknown identifier
        {"t t", 2, false},     // trailing input
        {"(t", 2, false},      // missing ')'
        {"t^t", 2, false},     // non-constant exponent
    };
    for (const Err& c : err_cases) {
        CAPTURE(c.input);
        if (c.unknown_ident) {
            try {
                parse_expr(c.input, "t");
                FAIL("expected UnknownIdentifier");
            } catch (const UnknownIdentifier& e) {
                CHECK(e.offset() == c.offset);
            }
        } else {
            try {
                parse_expr(c.input, "t");
                FAIL("expected SyntaxError");
            } catch (const SyntaxError& e) {
                CHECK(e.offset() == c.offset);
                CHECK_FALSE(e.expected().empty());
            }
        }
    }
    CHECK_THROWS_AS(parse_expr("", "t"), SyntaxError);
}

TEST_CASE("evaluation of fixed expressions") {
    CHECK(parse_expr("2*s^2 + cosh(s)", "s").eval(0.0) == doctest::Approx(1.0));
    CHECK(parse_expr("sqrt(2)*t", "t").eval(3.0) ==
          doctest::Approx(4.242640687119285).epsilon(1e-12));
    CHECK_THROWS_AS(parse_expr("1/0", "t").eval(0.0), DomainError);
    CHECK_THROWS_AS(parse_expr("log(t)", "t").eval(-1.0), DomainError);
    CHECK_THROWS_AS(parse_expr("sqrt(t)", "t").eval(-1.0), DomainError);
}

TEST_CASE("eval_with_derivatives on worked examples") {
    {
        const auto v = eval_with_derivatives(parse_expr("cosh(s)", "s"), 0.0, 2);
        REQUIRE(v.size() == 3);
        CHECK(v[0] == doctest::Approx(1.0));
        CHECK(v[1] == doctest::Approx(0.0));
        CHECK(v[2] == doctest::Approx(1.0));
    }
    {
        const auto v = eval_with_derivatives(parse_expr("s^3", "s"), 1.0, 1);
        CHECK(v[0] == doctest::Approx(1.0));
        CHECK(v[1] == doctest::Approx(3.0));
    }
    {
        const Expr e = parse_expr("s/sqrt(s^2-1)", "s");
        const auto v = eval_with_derivatives(e, 2.0, 1);
        CHECK(v[0] == doctest::Approx(1.1547005383792517).epsilon(1e-12));
        CHECK(v[1] == doctest::Approx(-0.19245008972987526).epsilon(1e-12));
        // independent oracle: central differences, h = 1e-5
        const double fd = fd5([&](double t) { return e.eval(t); }, 2.0, 1e-5);
        CHECK(std::fabs(v[1] - fd) / std::fabs(fd) < 1e-7);
    }
    CHECK_THROWS_AS(eval_with_derivatives(parse_expr("s", "s"), 0.0, 4), DomainError);
}

// ---------------------------------------------------------------------------
// random expression generator for the property tests
// ---------------------------------------------------------------------------

namespace {

Expr random_expr(std::mt19937& rng, int depth) {
    std::uniform_real_distribution<double> cv(-2.0, 2.0);
    std::uniform_int_distribution<int> kind(0, 9);
    if (depth == 0) {
        return kind(rng) < 4 ? Expr::constant(cv(rng)) : Expr::variable();
    }
    switch (kind(rng)) {
        case 0: return Expr::constant(cv(rng));
        case 1: return Expr::variable();
        case 2: return Expr::add(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 3: return Expr::sub(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 4: return Expr::mul(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 5: return Expr::div(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 6: {
            std::uniform_int_distribution<int> p(-3, 3);
            int e = p(rng);
            if (e == 0) e = 2;
            return Expr::pow(random_expr(rng, depth - 1), static_cast<double>(e));
        }
        default: {
            std::uniform_int_distribution<int> f(0, 9);
            return Expr::fn(static_cast<Expr::FnKind>(f(rng)), random_expr(rng, depth - 1));
        }
    }
}

bool safe_at(const Expr& e, const Expr& de, double t) {
    try {
        for (double dt : {-2e-4, -1e-4, 0.0, 1e-4, 2e-4}) {
            const double v = e.eval(t + dt);
            if (!std::isfinite(v) || std::fabs(v) > 1e6) return false;
        }
        const double d = de.eval(t);
        if (!std::isfinite(d) || std::fabs(d) > 1e6) return false;
    } catch (const DomainError&) {
        return false;
    }
    return true;
}

}  // namespace

TEST_CASE("symbolic derivative matches finite differences on random expressions") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> pt(-2.5, 2.5);
    std::uniform_int_distribution<int> dd(1, 6);
    int tested = 0;
    int guard = 0;
    while (tested < 100 && ++guard < 5000) {
        const Expr e = random_expr(rng, dd(rng));
        const Expr de = e.derivative();
        double c;
        if (e.is_constant(&c)) continue;  // nothing to compare
        const double t = pt(rng);
        if (!safe_at(e, de, t)) continue;
        const double sym = de.eval(t);
        const double fd = fd5([&](double u) { return e.eval(u); }, t, 1e-4);
        const double scale = std::max(1.0, std::fabs(sym));
        if (std::fabs(sym - fd) / scale >= 1e-6) {
            CAPTURE(e.to_string());
            CAPTURE(t);
            CHECK(std::fabs(sym - fd) / scale < 1e-6);
        }
        ++tested;
    }
    CHECK(tested == 100);
}

TEST_CASE("round trip: print then reparse gives a structurally equal tree") {
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> dd(1, 6);
    for (int k = 0; k < 100; ++k) {
        const Expr e = random_expr(rng, dd(rng));
        const std::string printed = e.to_string("t");
        const Expr back = parse_expr(printed, "t");
        CAPTURE(printed);
        CHECK(e.same_structure(back));
    }
}

TEST_CASE("differentiation is linear") {
    std::mt19937 rng(314);
    std::uniform_real_distribution<double> cv(-2.0, 2.0), pt(-2.0, 2.0);
    std::uniform_int_distribution<int> dd(1, 5);
    int tested = 0, guard = 0;
    while (tested < 60 && ++guard < 3000) {
        const Expr f = random_expr(rng, dd(rng));
        const Expr g = random_expr(rng, dd(rng));
        const double a = cv(rng), b = cv(rng);
        const Expr combo =
            Expr::add(Expr::mul(Expr::constant(a), f), Expr::mul(Expr::constant(b), g));
        const Expr d_combo = combo.derivative();
        const Expr df = f.derivative(), dg = g.derivative();
        const double t = pt(rng);
        try {
            const double lhs = d_combo.eval(t);
            const double rhs = a * df.eval(t) + b * dg.eval(t);
            if (!std::isfinite(lhs) || std::fabs(lhs) > 1e8) continue;
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
            ++tested;
        } catch (const DomainError&) {
            continue;
        }
    }
    CHECK(tested == 60);
}

// ---------------------------------------------------------------------------
// curve documents
// ---------------------------------------------------------------------------

TEST_CASE("curve document parsing") {
    const char* doc =
        "param = t\n"
        "x = cos(t)\n"
        "y = sin(t)\n"
        "z = sqrt(2)*t\n"
        "domain = [0, 6.283]\n";
    const CurveSpec c = parse_curve_document(doc);
    CHECK(c.param == "t");
    CHECK(c.samples == 1001);  // default
    CHECK(c.domain.lo == doctest::Approx(0.0));
    CHECK(c.domain.hi == doctest::Approx(6.283));
    CHECK(c.eval(0.0).x == doctest::Approx(1.0));

    const char* commented =
        "# a helix\n"
        "param = t\n"
        "x = cos(t)  # first component\n"
        "\n"
        "y = sin(t)\n"
        "z = sqrt(2)*t\n"
        "# trailing comment\n"
        "domain = [0, 6.283]\n";
    const CurveSpec c2 = parse_curve_document(commented);
    CHECK(c.x.same_structure(c2.x));
    CHECK(c.y.same_structure(c2.y));
    CHECK(c.z.same_structure(c2.z));
    CHECK(c2.domain.hi == doctest::Approx(6.283));
    CHECK(c2.samples == c.samples);

    try {
        parse_curve_document("param = t\nx = t\ny = t\ndomain = [0, 1]\n");
        FAIL("expected MissingField");
    } catch (const MissingField& e) {
        CHECK(e.field() == "z");
    }
    CHECK_THROWS_AS(parse_curve_document("x = sin(\ny = t\nz = t\ndomain = [0,1]\n"),
                    SyntaxError);
    CHECK_THROWS_AS(
        parse_curve_document("x = t\ny = t\nz = t\ndomain = [0, 1]\nsamples = 4\n"),
        SyntaxError);  // samples below the minimum
    CHECK_THROWS_AS(parse_curve_document("x = t\ny = t\nz = t\ndomain = [2, 1]\n"),
                    SyntaxError);  // reversed domain
}

TEST_CASE("fn document parsing") {
    const ScalarFnSpec f =
        parse_fn_document("f = 1/(s+2)^2\ndomain = [0, 1]\nsamples = 64\n");
    CHECK(f.param == "s");
    CHECK(f.samples == 64);
    CHECK(f.f.eval(0.0) == doctest::Approx(0.25));
}

TEST_CASE("scalar fields") {
    const ScalarField c = ScalarField::from_expr(parse_expr("s^2", "s"));
    CHECK(c(3.0) == doctest::Approx(9.0));
    CHECK(c.analytic());
    CHECK(c.derivative(3.0) == doctest::Approx(6.0));

    std::vector<double> vals;
    for (int i = 0; i <= 100; ++i) vals.push_back(std::sin(0.01 * i));
    const ScalarField tab = ScalarField::from_table(0.0, 0.01, vals);
    CHECK_FALSE(tab.analytic());
    CHECK(tab(0.5) == doctest::Approx(std::sin(0.5)));
    // off-node: local polynomial interpolation stays extremely accurate
    CHECK(tab(0.505) == doctest::Approx(std::sin(0.505)).epsilon(1e-12));
    CHECK_THROWS_AS(tab(2.0), EvalError);
    CHECK_THROWS_AS(tab.derivative(0.5), EvalError);
}

TEST_CASE("linear maps act on curve components") {
    CurveSpec c;
    c.x = parse_expr("cos(t)", "t");
    c.y = parse_expr("sin(t)", "t");
    c.z = parse_expr("sqrt(2)*t", "t");
    c.domain = {0.0, 1.0};
    const Mat3 L = lorentz_boost_xz(0.6);
    const CurveSpec b = apply_linear_map(L, c);
    for (double t : {0.0, 0.3, 0.9}) {
        const Vec3 expect = L.apply(c.eval(t));
        const Vec3 got = b.eval(t);
        CHECK(got.x == doctest::Approx(expect.x).epsilon(1e-14));
        CHECK(got.y == doctest::Approx(expect.y).epsilon(1e-14));
        CHECK(got.z == doctest::Approx(expect.z).epsilon(1e-14));
    }
}
