#include "helixlab/curve.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "helixlab/errors.hpp"

namespace helixlab {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

struct Document {
    std::map<std::string, std::string, std::less<>> entries;

    const std::string* find(std::string_view key) const {
        auto it = entries.find(key);
        return it == entries.end() ? nullptr : &it->second;
    }

    const std::string& require(std::string_view key) const {
        const std::string* v = find(key);
        if (!v) throw MissingField(std::string(key));
        return *v;
    }
};

Document parse_document(std::string_view text, const std::vector<std::string_view>& known_keys) {
    Document doc;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        ++line_no;
        const std::size_t line_start = pos;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw SyntaxError("expected 'key = value' on line " + std::to_string(line_no),
                              line_start, {"'='"});
        const std::string key{trim(line.substr(0, eq))};
        const std::string value{trim(line.substr(eq + 1))};
        bool known = false;
        for (auto k : known_keys) known = known || k == key;
        if (!known)
            throw SyntaxError("unknown key '" + key + "' on line " + std::to_string(line_no),
                              line_start, {"param", "x", "y", "z", "f", "domain", "samples"});
        if (doc.entries.count(key))
            throw SyntaxError("duplicate key '" + key + "' on line " + std::to_string(line_no),
                              line_start, {});
        doc.entries.emplace(key, value);
    }
    return doc;
}

double parse_const_expr(const std::string& text) {
    // allow things like 2*pi in domain bounds
    Expr e = parse_expr(text, "\x01");
    double v;
    if (!e.is_constant(&v)) v = e.eval(0.0);
    if (!std::isfinite(v)) throw DomainError("non-finite constant in document");
    return v;
}

Interval parse_domain(const std::string& text) {
    std::string_view s = trim(text);
    if (s.empty() || s.front() != '[' || s.back() != ']')
        throw SyntaxError("domain must have the form [a, b]", 0, {"'['"});
    s = s.substr(1, s.size() - 2);
    const std::size_t comma = s.find(',');
    if (comma == std::string_view::npos)
        throw SyntaxError("domain must have the form [a, b]", 0, {"','"});
    Interval iv;
    iv.lo = parse_const_expr(std::string(trim(s.substr(0, comma))));
    iv.hi = parse_const_expr(std::string(trim(s.substr(comma + 1))));
    if (!(iv.lo < iv.hi))
        throw SyntaxError("domain endpoints must satisfy a < b", 0, {});
    return iv;
}

int parse_samples(const Document& doc, int fallback) {
    const std::string* v = doc.find("samples");
    if (!v) return fallback;
    int n = 0;
    auto res = std::from_chars(v->data(), v->data() + v->size(), n);
    if (res.ec != std::errc() || res.ptr != v->data() + v->size())
        throw SyntaxError("samples must be an integer", 0, {"integer"});
    if (n < 16) throw SyntaxError("samples must be at least 16", 0, {});
    return n;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

CurveSpec parse_curve_document(std::string_view text) {
    const Document doc = parse_document(text, {"param", "x", "y", "z", "domain", "samples"});
    CurveSpec c;
    if (const std::string* p = doc.find("param")) c.param = *p;
    c.x = parse_expr(doc.require("x"), c.param);
    c.y = parse_expr(doc.require("y"), c.param);
    c.z = parse_expr(doc.require("z"), c.param);
    c.domain = parse_domain(doc.require("domain"));
    c.samples = parse_samples(doc, 1001);
    return c;
}

ScalarFnSpec parse_fn_document(std::string_view text) {
    const Document doc = parse_document(text, {"param", "f", "domain", "samples"});
    ScalarFnSpec f;
    if (const std::string* p = doc.find("param")) f.param = *p;
    f.f = parse_expr(doc.require("f"), f.param);
    f.domain = parse_domain(doc.require("domain"));
    f.samples = parse_samples(doc, 1001);
    return f;
}

CurveSpec load_curve_file(const std::string& path) {
    return parse_curve_document(read_file(path));
}

ScalarFnSpec load_fn_file(const std::string& path) {
    return parse_fn_document(read_file(path));
}

// ---------------------------------------------------------------------------
// ScalarField
// ---------------------------------------------------------------------------

ScalarField ScalarField::from_expr(Expr f) {
    ScalarField sf;
    sf.expr_ = f;
    sf.dexpr_ = f.derivative();
    return sf;
}

ScalarField ScalarField::from_constant(double v) {
    return from_expr(Expr::constant(v));
}

ScalarField ScalarField::from_table(double s0, double ds, std::vector<double> values) {
    if (values.size() < 8) throw EvalError("scalar table needs at least 8 nodes");
    if (!(ds > 0.0)) throw EvalError("scalar table step must be positive");
    ScalarField sf;
    sf.s0_ = s0;
    sf.ds_ = ds;
    sf.table_ = std::move(values);
    return sf;
}

double ScalarField::operator()(double s) const {
    if (expr_) return expr_->eval(s);
    const double u = (s - s0_) / ds_;
    const long idx = std::lround(u);
    const long n = static_cast<long>(table_.size());
    if (idx >= 0 && idx < n && std::fabs(u - static_cast<double>(idx)) < 1e-9)
        return table_[static_cast<std::size_t>(idx)];
    // Off-node query (e.g. after the integrator halves its step): 6-point
    // local Lagrange interpolation, error O(ds^6).
    if (u < -1e-9 || u > static_cast<double>(n - 1) + 1e-9)
        throw EvalError("scalar table queried outside its range");
    long base = static_cast<long>(std::floor(u)) - 2;
    base = std::max(0L, std::min(base, n - 6));
    double acc = 0.0;
    for (long i = 0; i < 6; ++i) {
        double w = 1.0;
        for (long j = 0; j < 6; ++j) {
            if (i == j) continue;
            w *= (u - static_cast<double>(base + j)) / static_cast<double>(i - j);
        }
        acc += w * table_[static_cast<std::size_t>(base + i)];
    }
    return acc;
}

double ScalarField::derivative(double s) const {
    if (!dexpr_) throw EvalError("derivative requested from a sampled scalar field");
    return dexpr_->eval(s);
}

CurveSpec apply_linear_map(const Mat3& L, const CurveSpec& curve) {
    auto row = [&](int i) {
        Expr acc = Expr::constant(0.0);
        const Expr comps[3] = {curve.x, curve.y, curve.z};
        for (int j = 0; j < 3; ++j)
            acc = Expr::add(acc, Expr::mul(Expr::constant(L(i, j)), comps[j]));
        return acc;
    };
    CurveSpec out = curve;
    out.x = row(0);
    out.y = row(1);
    out.z = row(2);
    return out;
}

}  // namespace helixlab
