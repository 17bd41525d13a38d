#include "helixlab/frenet.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "helixlab/errors.hpp"
#include "helixlab/fd.hpp"
#include "helixlab/numfmt.hpp"

namespace helixlab {

namespace {

constexpr double kNullClassTol = 1e-9;   // relative tolerance for lightlike classification
constexpr double kGramGate = 1e-6;       // frame gram acceptance
constexpr double kDegenerateRel = 1e-12; // "vanishes" threshold, relative

}  // namespace

const char* to_string(CurveClass c) {
    switch (c) {
        case CurveClass::Timelike: return "Timelike";
        case CurveClass::SpacelikeSpacelikeN: return "SpacelikeSpacelikeN";
        case CurveClass::SpacelikeTimelikeN: return "SpacelikeTimelikeN";
        case CurveClass::SpacelikeNullN: return "SpacelikeNullN";
        case CurveClass::Lightlike: return "Lightlike";
    }
    return "?";
}

std::optional<CurveClass> curve_class_from_string(std::string_view s) {
    if (s == "timelike" || s == "Timelike") return CurveClass::Timelike;
    if (s == "spacelike-spacelike" || s == "SpacelikeSpacelikeN")
        return CurveClass::SpacelikeSpacelikeN;
    if (s == "spacelike-timelike" || s == "SpacelikeTimelikeN")
        return CurveClass::SpacelikeTimelikeN;
    if (s == "spacelike-null" || s == "SpacelikeNullN") return CurveClass::SpacelikeNullN;
    if (s == "lightlike" || s == "Lightlike") return CurveClass::Lightlike;
    return std::nullopt;
}

std::vector<std::string> curve_class_names() {
    return {"timelike", "spacelike-spacelike", "spacelike-timelike", "spacelike-null",
            "lightlike"};
}

const char* to_string(ApparatusSource s) {
    switch (s) {
        case ApparatusSource::Analytic: return "analytic";
        case ApparatusSource::Sampled: return "sampled";
        case ApparatusSource::Synthesized: return "synthesized";
    }
    return "?";
}

Mat3 expected_gram(CurveClass c) {
    Mat3 g;
    switch (c) {
        case CurveClass::Timelike:
            g(0, 0) = -1.0; g(1, 1) = 1.0; g(2, 2) = 1.0;
            break;
        case CurveClass::SpacelikeSpacelikeN:
            g(0, 0) = 1.0; g(1, 1) = 1.0; g(2, 2) = -1.0;
            break;
        case CurveClass::SpacelikeTimelikeN:
            g(0, 0) = 1.0; g(1, 1) = -1.0; g(2, 2) = 1.0;
            break;
        case CurveClass::SpacelikeNullN:
            g(0, 0) = 1.0; g(1, 2) = 1.0; g(2, 1) = 1.0;
            break;
        case CurveClass::Lightlike:
            g(1, 1) = 1.0; g(0, 2) = 1.0; g(2, 0) = 1.0;
            break;
    }
    return g;
}

bool class_defines_kappa(CurveClass c) {
    return c != CurveClass::SpacelikeNullN && c != CurveClass::Lightlike;
}

void frenet_matrix_action(CurveClass cls, double kappa, double tau, const Vec3& T,
                          const Vec3& N, const Vec3& B, Vec3& dT, Vec3& dN, Vec3& dB) {
    switch (cls) {
        case CurveClass::Timelike:
            dT = kappa * N;
            dN = kappa * T + tau * B;
            dB = -tau * N;
            break;
        case CurveClass::SpacelikeSpacelikeN:
            dT = kappa * N;
            dN = -1.0 * kappa * T + tau * B;
            dB = tau * N;
            break;
        case CurveClass::SpacelikeTimelikeN:
            dT = kappa * N;
            dN = kappa * T + tau * B;
            dB = tau * N;
            break;
        case CurveClass::SpacelikeNullN:
            dT = N;
            dN = tau * N;
            dB = -1.0 * T - tau * B;
            break;
        case CurveClass::Lightlike:
            dT = N;
            dN = tau * T - B;
            dB = -tau * N;
            break;
    }
}

double FrenetApparatus::step() const {
    if (samples.size() < 2) return 0.0;
    return (samples.back().s - samples.front().s) /
           static_cast<double>(samples.size() - 1);
}

FrenetApparatus FrenetApparatus::slice(std::size_t first, std::size_t last) const {
    FrenetApparatus out;
    out.cls = cls;
    out.source = source;
    out.kappa_field = kappa_field;
    out.tau_field = tau_field;
    out.samples.assign(samples.begin() + static_cast<std::ptrdiff_t>(first),
                       samples.begin() + static_cast<std::ptrdiff_t>(last + 1));
    return out;
}

void validate_apparatus_grid(const FrenetApparatus& a) {
    if (a.samples.size() < 16)
        throw Error("apparatus needs at least 16 samples");
    const double h = a.step();
    if (!(h > 0.0)) throw Error("apparatus grid must be strictly increasing");
    for (std::size_t i = 1; i < a.samples.size(); ++i) {
        const double d = a.samples[i].s - a.samples[i - 1].s;
        if (std::fabs(d - h) > 1e-12 * std::max(1.0, std::fabs(h) + std::fabs(a.samples[i].s)))
            throw Error("apparatus grid is not uniform");
    }
}

// ---------------------------------------------------------------------------
// Derivative bundles
// ---------------------------------------------------------------------------

namespace {

/// Symbolic derivatives of the curve components up to a requested order.
struct CurveDerivs {
    std::vector<Expr> x, y, z;

    CurveDerivs(const CurveSpec& c, int order) {
        x.push_back(c.x);
        y.push_back(c.y);
        z.push_back(c.z);
        for (int k = 0; k < order; ++k) {
            x.push_back(x.back().derivative());
            y.push_back(y.back().derivative());
            z.push_back(z.back().derivative());
        }
    }

    Vec3 eval(int k, double t) const {
        return {x[static_cast<std::size_t>(k)].eval(t),
                y[static_cast<std::size_t>(k)].eval(t),
                z[static_cast<std::size_t>(k)].eval(t)};
    }
};

struct ClassifyPoint {
    CausalClass tangent;
    CausalClass normal;     // meaningful for spacelike tangents
    bool normal_zero;
};

ClassifyPoint classify_point(const Vec3& d1, const Vec3& d2) {
    ClassifyPoint p{};
    p.tangent = causal_class(d1, kNullClassTol);
    p.normal = CausalClass::Spacelike;
    p.normal_zero = false;
    if (p.tangent == CausalClass::Spacelike) {
        const double q11 = minkowski_inner(d1, d1);
        const Vec3 perp = d2 - (minkowski_inner(d2, d1) / q11) * d1;
        const double scale = 1.0 + euclidean_norm2(d2);
        if (euclidean_norm2(perp) <= 1e-20 * scale * scale)
            p.normal_zero = true;
        else
            p.normal = causal_class(perp, kNullClassTol);
    }
    return p;
}

CurveClass classify_from_points(const std::vector<double>& t,
                                const std::vector<ClassifyPoint>& pts) {
    const std::size_t n = pts.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (pts[i].tangent != pts[i - 1].tangent)
            throw MixedCausalType(
                std::string("causal class of the tangent changes from ") +
                    to_string(pts[i - 1].tangent) + " to " + to_string(pts[i].tangent) +
                    " between t=" + format_double(t[i - 1]) + " and t=" + format_double(t[i]),
                t[i - 1], t[i]);
    }
    const CausalClass tangent = pts[0].tangent;
    if (tangent == CausalClass::Timelike) return CurveClass::Timelike;
    if (tangent == CausalClass::Lightlike) return CurveClass::Lightlike;

    // spacelike: sub-classify by the normal component of the acceleration
    std::size_t zero_run = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (pts[i].normal_zero) {
            if (++zero_run >= 2)
                throw DegenerateCurve("acceleration has no normal component near t=" +
                                      format_double(t[i]));
        } else {
            zero_run = 0;
        }
    }
    std::optional<CausalClass> normal;
    std::size_t prev = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (pts[i].normal_zero) continue;
        if (normal && pts[i].normal != *normal)
            throw MixedCausalType(
                std::string("causal class of the normal changes from ") +
                    to_string(*normal) + " to " + to_string(pts[i].normal) +
                    " between t=" + format_double(t[prev]) + " and t=" + format_double(t[i]),
                t[prev], t[i]);
        normal = pts[i].normal;
        prev = i;
    }
    if (!normal) throw DegenerateCurve("acceleration vanishes along the whole curve");
    switch (*normal) {
        case CausalClass::Spacelike: return CurveClass::SpacelikeSpacelikeN;
        case CausalClass::Timelike: return CurveClass::SpacelikeTimelikeN;
        case CausalClass::Lightlike: return CurveClass::SpacelikeNullN;
    }
    return CurveClass::SpacelikeSpacelikeN;
}

}  // namespace

CurveClass classify_curve(const CurveSpec& curve, int grid) {
    if (grid < 2) throw Error("classification grid needs at least 2 points");
    const CurveDerivs d(curve, 2);
    const double h = curve.domain.length() / static_cast<double>(grid - 1);
    std::vector<double> ts(static_cast<std::size_t>(grid));
    std::vector<ClassifyPoint> pts(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i) {
        const double t = curve.domain.lo + h * static_cast<double>(i);
        const Vec3 d1 = d.eval(1, t);
        const Vec3 d2 = d.eval(2, t);
        if (!is_finite(d1) || !is_finite(d2))
            throw DomainError("curve derivatives are not finite at t=" + format_double(t));
        if (euclidean_norm2(d1) == 0.0)
            throw DegenerateCurve("curve is not regular at t=" + format_double(t));
        ts[static_cast<std::size_t>(i)] = t;
        pts[static_cast<std::size_t>(i)] = classify_point(d1, d2);
    }
    return classify_from_points(ts, pts);
}

// ---------------------------------------------------------------------------
// Reparametrization
// ---------------------------------------------------------------------------

namespace {

// 5-point Gauss-Legendre on [a, b]
double gauss5(double a, double b, const std::function<double(double)>& f) {
    static const double xs[5] = {0.0, 0.5384693101056831, -0.5384693101056831,
                                 0.9061798459386640, -0.9061798459386640};
    static const double ws[5] = {0.5688888888888889, 0.4786286704993665,
                                 0.4786286704993665, 0.2369268850561891,
                                 0.2369268850561891};
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) acc += ws[i] * f(mid + half * xs[i]);
    return acc * half;
}

}  // namespace

ReparamMap::ReparamMap(std::vector<double> t_nodes, std::vector<double> s_nodes,
                       std::function<double(double)> speed)
    : t_nodes_(std::move(t_nodes)), s_nodes_(std::move(s_nodes)), speed_(std::move(speed)) {}

double ReparamMap::s_of_t(double t) const {
    const auto it = std::upper_bound(t_nodes_.begin(), t_nodes_.end(), t);
    std::size_t i = it == t_nodes_.begin() ? 0 : static_cast<std::size_t>(it - t_nodes_.begin()) - 1;
    i = std::min(i, t_nodes_.size() - 2);
    return s_nodes_[i] + gauss5(t_nodes_[i], t, speed_);
}

double ReparamMap::t_of_s(double s) const {
    s = std::clamp(s, s_nodes_.front(), s_nodes_.back());
    const auto it = std::upper_bound(s_nodes_.begin(), s_nodes_.end(), s);
    std::size_t i = it == s_nodes_.begin() ? 0 : static_cast<std::size_t>(it - s_nodes_.begin()) - 1;
    i = std::min(i, s_nodes_.size() - 2);
    const double ds = s_nodes_[i + 1] - s_nodes_[i];
    double t = t_nodes_[i] +
               (t_nodes_[i + 1] - t_nodes_[i]) * (ds > 0.0 ? (s - s_nodes_[i]) / ds : 0.0);
    for (int k = 0; k < 8; ++k) {
        const double r = s_nodes_[i] + gauss5(t_nodes_[i], t, speed_) - s;
        const double v = speed_(t);
        if (!(v > 0.0)) break;
        const double dt = r / v;
        t -= dt;
        t = std::clamp(t, t_nodes_.front(), t_nodes_.back());
        if (std::fabs(dt) < 1e-15 * (1.0 + std::fabs(t))) break;
    }
    return t;
}

ReparamMap reparametrize(const CurveSpec& curve, CurveClass cls, int grid) {
    if (grid < 2) throw Error("reparametrization grid needs at least 2 points");
    auto derivs = std::make_shared<CurveDerivs>(curve, 2);
    const bool lightlike = cls == CurveClass::Lightlike;
    std::function<double(double)> speed = [derivs, lightlike](double t) {
        if (lightlike) {
            // <a'', a''>^(1/4): valid because a' is null, so <a', a''> = 0
            const Vec3 d2 = derivs->eval(2, t);
            const double q2 = minkowski_inner(d2, d2);
            if (!(q2 > 0.0))
                throw DegenerateCurve("pseudo arc-length integrand vanishes at t=" +
                                      format_double(t));
            return std::pow(q2, 0.25);
        }
        const Vec3 d1 = derivs->eval(1, t);
        return minkowski_norm(d1);
    };

    const double h = curve.domain.length() / static_cast<double>(grid - 1);
    std::vector<double> t_nodes(static_cast<std::size_t>(grid));
    std::vector<double> s_nodes(static_cast<std::size_t>(grid));
    std::size_t small_run = 0;
    for (int i = 0; i < grid; ++i)
        t_nodes[static_cast<std::size_t>(i)] = curve.domain.lo + h * static_cast<double>(i);
    s_nodes[0] = 0.0;
    for (int i = 0; i + 1 < grid; ++i) {
        const double a = t_nodes[static_cast<std::size_t>(i)];
        const double b = t_nodes[static_cast<std::size_t>(i + 1)];
        const double va = speed(a), vm = speed(0.5 * (a + b)), vb = speed(b);
        if (va <= kDegenerateRel) {
            if (++small_run >= 2)
                throw DegenerateCurve("speed vanishes on a subinterval near t=" +
                                      format_double(a));
        } else {
            small_run = 0;
        }
        // composite Simpson with midpoint
        s_nodes[static_cast<std::size_t>(i + 1)] =
            s_nodes[static_cast<std::size_t>(i)] + (b - a) / 6.0 * (va + 4.0 * vm + vb);
    }
    return ReparamMap(std::move(t_nodes), std::move(s_nodes), std::move(speed));
}

// ---------------------------------------------------------------------------
// Frame construction
// ---------------------------------------------------------------------------

namespace {

/// Unique B with <P,B> = 0, <Q,B> = 1, <B,B> = 0, where the joint
/// orthogonal complement of P and Q is spanned by `hdir` (a null vector
/// with <Q, hdir> = 0), so the quadratic condition degenerates to a
/// linear one.
Vec3 null_partner(const Vec3& P, const Vec3& Q, const Vec3& hdir) {
    const Vec3 r1{P.x, P.y, -P.z};
    const Vec3 r2{Q.x, Q.y, -Q.z};
    // Euclidean cross products on the metric-lowered rows
    const Vec3 d{r1.y * r2.z - r1.z * r2.y, r1.z * r2.x - r1.x * r2.z,
                 r1.x * r2.y - r1.y * r2.x};
    const Vec3 u{r1.y * d.z - r1.z * d.y, r1.z * d.x - r1.x * d.z,
                 r1.x * d.y - r1.y * d.x};
    const double dd = d.x * d.x + d.y * d.y + d.z * d.z;
    if (dd == 0.0) throw DegenerateCurve("frame directions are linearly dependent");
    const Vec3 b0 = (-1.0 / dd) * u;
    const double lambda = -0.5 * minkowski_inner(b0, b0);
    return b0 + lambda * hdir;
}

/// Frame, curvature and torsion from unit-parameter derivatives
/// a_s, a_ss, a_sss. kappa_scale_out receives ||a_ss|| for degeneracy
/// bookkeeping in the calling loop.
FrameSample build_frame(CurveClass cls, double s, const Vec3& as, const Vec3& ass,
                        const Vec3& asss) {
    FrameSample f;
    f.s = s;
    switch (cls) {
        case CurveClass::Timelike:
        case CurveClass::SpacelikeSpacelikeN:
        case CurveClass::SpacelikeTimelikeN: {
            f.T = as;
            f.kappa = minkowski_norm(ass);
            if (!(f.kappa > 0.0))
                throw DegenerateCurve("curvature vanishes at s=" + format_double(s));
            f.N = ass / f.kappa;
            const Vec3 braw = lorentz_cross(f.T, f.N);
            // Orientation convention: B = T x N for timelike curves (the
            // system closes with this sign); the canonical spacelike frames
            // satisfy B = N x T instead.
            const double flip = cls == CurveClass::Timelike ? 1.0 : -1.0;
            f.B = flip * braw;
            const double sgn = cls == CurveClass::SpacelikeSpacelikeN ? -1.0 : 1.0;
            f.tau = sgn * minkowski_inner(asss, f.B) / f.kappa;
            break;
        }
        case CurveClass::SpacelikeNullN: {
            f.T = as;
            f.N = ass;
            f.B = null_partner(f.T, f.N, f.N);
            f.kappa = 1.0;
            f.tau = minkowski_inner(asss, f.B);
            break;
        }
        case CurveClass::Lightlike: {
            f.T = as;
            f.N = ass;
            f.B = null_partner(f.N, f.T, f.T);
            f.kappa = 1.0;
            f.tau = minkowski_inner(asss, f.B);
            break;
        }
    }
    return f;
}

void check_torsion_nonvanishing(const FrenetApparatus& a) {
    double scale = 0.0;
    for (const FrameSample& f : a.samples) scale = std::max(scale, std::fabs(f.tau));
    std::size_t run = 0;
    for (const FrameSample& f : a.samples) {
        if (std::fabs(f.tau) <= kDegenerateRel * (1.0 + scale)) {
            if (++run >= 3)
                throw DegenerateCurve("torsion vanishes on a subinterval near s=" +
                                      format_double(f.s));
        } else {
            run = 0;
        }
    }
}

void check_gram(const FrenetApparatus& a) {
    // Gram entries are quadratic in the frame components, and frames of the
    // hyperbolic classes grow exponentially along the curve, so the gate is
    // relative to the largest squared frame magnitude.
    double scale = 1.0;
    for (const FrameSample& f : a.samples) {
        scale = std::max(scale, euclidean_norm2(f.T));
        scale = std::max(scale, euclidean_norm2(f.N));
        scale = std::max(scale, euclidean_norm2(f.B));
    }
    const double dev = max_gram_deviation(a);
    if (dev > kGramGate * scale)
        throw FrameClosureError(
            "frame violates its class Gram matrix: deviation " + format_double(dev) +
            " exceeds " + format_double(kGramGate * scale));
}

}  // namespace

FrenetApparatus frenet_apparatus(const CurveSpec& curve, CurveClass cls) {
    const int order = cls == CurveClass::Lightlike ? 4 : 3;
    const CurveDerivs d(curve, order);
    const ReparamMap rm = reparametrize(curve, cls, curve.samples);
    const double L = rm.length();
    const int n = curve.samples;
    const double h = L / static_cast<double>(n - 1);
    const bool lightlike = cls == CurveClass::Lightlike;

    FrenetApparatus app;
    app.cls = cls;
    app.source = ApparatusSource::Analytic;
    app.samples.reserve(static_cast<std::size_t>(n));

    for (int j = 0; j < n; ++j) {
        const double s = h * static_cast<double>(j);
        const double t = rm.t_of_s(s);
        const Vec3 d1 = d.eval(1, t);
        const Vec3 d2 = d.eval(2, t);
        const Vec3 d3 = d.eval(3, t);

        double v, vt, vtt;
        if (lightlike) {
            const Vec3 d4 = d.eval(4, t);
            const double q2 = minkowski_inner(d2, d2);
            if (!(q2 > 0.0))
                throw DegenerateCurve("lightlike acceleration degenerates at t=" +
                                      format_double(t));
            v = std::pow(q2, 0.25);
            const double q2t = 2.0 * minkowski_inner(d3, d2);
            const double q2tt = 2.0 * (minkowski_inner(d4, d2) + minkowski_inner(d3, d3));
            vt = q2t / (4.0 * v * v * v);
            vtt = (q2tt - 12.0 * v * v * vt * vt) / (4.0 * v * v * v);
        } else {
            const double q = minkowski_inner(d1, d1);
            const double eps = q >= 0.0 ? 1.0 : -1.0;
            v = std::sqrt(std::fabs(q));
            if (!(v > 0.0))
                throw DegenerateCurve("curve is not regular at t=" + format_double(t));
            vt = eps * minkowski_inner(d2, d1) / v;
            vtt = (eps * (minkowski_inner(d3, d1) + minkowski_inner(d2, d2)) - vt * vt) / v;
        }
        const double ts = 1.0 / v;
        const double tss = -vt / (v * v * v);
        const double tsss = 3.0 * vt * vt / std::pow(v, 5) - vtt / std::pow(v, 4);

        const Vec3 as = ts * d1;
        const Vec3 ass = (ts * ts) * d2 + tss * d1;
        const Vec3 asss = (ts * ts * ts) * d3 + (3.0 * ts * tss) * d2 + tsss * d1;

        app.samples.push_back(build_frame(cls, s, as, ass, asss));
    }

    validate_apparatus_grid(app);
    check_gram(app);
    check_torsion_nonvanishing(app);
    return app;
}

// ---------------------------------------------------------------------------
// Sampled curves
// ---------------------------------------------------------------------------

namespace {

std::vector<double> parse_csv_row(const std::string& line, std::size_t expect,
                                  std::size_t line_no) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) comma = line.size();
        const char* b = line.data() + pos;
        const char* e = line.data() + comma;
        while (b < e && std::isspace(static_cast<unsigned char>(*b))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(e[-1]))) --e;
        double v = 0.0;
        auto res = std::from_chars(b, e, v);
        if (res.ec != std::errc() || res.ptr != e || !std::isfinite(v))
            throw IOError("csv: bad number on line " + std::to_string(line_no));
        out.push_back(v);
        if (comma == line.size()) break;
        pos = comma + 1;
    }
    if (out.size() != expect)
        throw IOError("csv: expected " + std::to_string(expect) + " columns on line " +
                      std::to_string(line_no));
    return out;
}

}  // namespace

SampledCurve read_curve_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IOError("csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string header = line;
    header.erase(std::remove_if(header.begin(), header.end(),
                                [](unsigned char c) { return std::isspace(c); }),
                 header.end());
    if (header != "t,x,y,z" && header != "s,x,y,z")
        throw IOError("csv: expected header 't,x,y,z' or 's,x,y,z', got '" + line + "'");
    SampledCurve c;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<double> row = parse_csv_row(line, 4, line_no);
        c.t.push_back(row[0]);
        c.p.push_back({row[1], row[2], row[3]});
    }
    if (c.t.size() < 16) throw IOError("csv: need at least 16 rows");
    const double h = (c.t.back() - c.t.front()) / static_cast<double>(c.t.size() - 1);
    if (!(h > 0.0)) throw IOError("csv: parameter column must be increasing");
    for (std::size_t i = 1; i < c.t.size(); ++i) {
        if (std::fabs(c.t[i] - c.t[i - 1] - h) > 1e-9 * std::max(1.0, std::fabs(c.t[i])))
            throw IOError("csv: parameter grid must be uniform");
    }
    return c;
}

SampledCurve load_curve_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot open '" + path + "'");
    return read_curve_csv(in);
}

namespace {

struct SampledDerivs {
    std::vector<Vec3> d1, d2, d3;
};

SampledDerivs fd_derivatives(const std::vector<Vec3>& p, double h) {
    const std::size_t n = p.size();
    std::vector<double> cx(n), cy(n), cz(n);
    for (std::size_t i = 0; i < n; ++i) {
        cx[i] = p[i].x;
        cy[i] = p[i].y;
        cz[i] = p[i].z;
    }
    SampledDerivs d;
    for (int order = 1; order <= 3; ++order) {
        const std::vector<double> dx = fd_derive_auto(cx, h, order);
        const std::vector<double> dy = fd_derive_auto(cy, h, order);
        const std::vector<double> dz = fd_derive_auto(cz, h, order);
        std::vector<Vec3>& dst = order == 1 ? d.d1 : order == 2 ? d.d2 : d.d3;
        dst.resize(n);
        for (std::size_t i = 0; i < n; ++i) dst[i] = {dx[i], dy[i], dz[i]};
    }
    return d;
}

/// Quintic Hermite interpolation of position using value, first and second
/// derivative at the two bracketing nodes (C2, error O(h^6)).
Vec3 quintic_hermite(const Vec3& p0, const Vec3& m0, const Vec3& a0, const Vec3& p1,
                     const Vec3& m1, const Vec3& a1, double h, double u) {
    const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
    const double H0 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
    const double H1 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
    const double H2 = 0.5 * u2 - 1.5 * u3 + 1.5 * u4 - 0.5 * u5;
    const double H3 = 0.5 * u3 - u4 + 0.5 * u5;
    const double H4 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
    const double H5 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
    return H5 * p1 + H0 * p0 + (h * H1) * m0 + (h * h * H2) * a0 + (h * h * H3) * a1 +
           (h * H4) * m1;
}

}  // namespace

FrenetApparatus frenet_from_samples(const SampledCurve& c) {
    const std::size_t n = c.t.size();
    const double ht = (c.t.back() - c.t.front()) / static_cast<double>(n - 1);
    SampledDerivs d = fd_derivatives(c.p, ht);

    std::vector<ClassifyPoint> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = classify_point(d.d1[i], d.d2[i]);
    const CurveClass cls = classify_from_points(c.t, pts);
    const bool lightlike = cls == CurveClass::Lightlike;

    std::vector<double> speed(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (lightlike) {
            const double q2 = minkowski_inner(d.d2[i], d.d2[i]);
            if (!(q2 > 0.0))
                throw DegenerateCurve("lightlike acceleration degenerates at t=" +
                                      format_double(c.t[i]));
            speed[i] = std::pow(q2, 0.25);
        } else {
            speed[i] = minkowski_norm(d.d1[i]);
            if (!(speed[i] > 0.0))
                throw DegenerateCurve("curve is not regular at t=" + format_double(c.t[i]));
        }
    }

    double unit_dev = 0.0;
    for (double v : speed) unit_dev = std::max(unit_dev, std::fabs(v - 1.0));

    std::vector<Vec3> pos = c.p;
    double hs = ht;
    if (unit_dev > 1e-6) {
        // resample onto a uniform grid in (pseudo) arc length
        const std::vector<double> s = cumulative_integral(speed, ht);
        const double L = s.back();
        hs = L / static_cast<double>(n - 1);
        pos.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double sj = hs * static_cast<double>(j);
            const auto it = std::upper_bound(s.begin(), s.end(), sj);
            std::size_t i = it == s.begin() ? 0 : static_cast<std::size_t>(it - s.begin()) - 1;
            i = std::min(i, n - 2);
            // Newton on the cubic Hermite model of s(t)
            double u = (s[i + 1] > s[i]) ? (sj - s[i]) / (s[i + 1] - s[i]) : 0.0;
            for (int k = 0; k < 6; ++k) {
                const double u2 = u * u, u3 = u2 * u;
                const double sv = (2.0 * u3 - 3.0 * u2 + 1.0) * s[i] +
                                  (u3 - 2.0 * u2 + u) * ht * speed[i] +
                                  (-2.0 * u3 + 3.0 * u2) * s[i + 1] +
                                  (u3 - u2) * ht * speed[i + 1];
                const double dv = (6.0 * u2 - 6.0 * u) * s[i] +
                                  (3.0 * u2 - 4.0 * u + 1.0) * ht * speed[i] +
                                  (-6.0 * u2 + 6.0 * u) * s[i + 1] +
                                  (3.0 * u2 - 2.0 * u) * ht * speed[i + 1];
                if (dv == 0.0) break;
                u -= (sv - sj) / dv;
                u = std::clamp(u, 0.0, 1.0);
            }
            pos[j] = quintic_hermite(c.p[i], d.d1[i], d.d2[i], c.p[i + 1], d.d1[i + 1],
                                     d.d2[i + 1], ht, u);
        }
        d = fd_derivatives(pos, hs);
    }

    FrenetApparatus app;
    app.cls = cls;
    app.source = ApparatusSource::Sampled;
    app.samples.reserve(n);
    for (std::size_t j = 0; j < n; ++j)
        app.samples.push_back(
            build_frame(cls, hs * static_cast<double>(j), d.d1[j], d.d2[j], d.d3[j]));

    validate_apparatus_grid(app);
    check_gram(app);
    check_torsion_nonvanishing(app);
    return app;
}

void write_apparatus_csv(const FrenetApparatus& a, std::ostream& out) {
    out << "s,Tx,Ty,Tz,Nx,Ny,Nz,Bx,By,Bz,kappa,tau\n";
    for (const FrameSample& f : a.samples) {
        out << format_double(f.s) << ',' << format_double(f.T.x) << ','
            << format_double(f.T.y) << ',' << format_double(f.T.z) << ','
            << format_double(f.N.x) << ',' << format_double(f.N.y) << ','
            << format_double(f.N.z) << ',' << format_double(f.B.x) << ','
            << format_double(f.B.y) << ',' << format_double(f.B.z) << ','
            << format_double(f.kappa) << ',' << format_double(f.tau) << '\n';
    }
}

double max_gram_deviation(const FrenetApparatus& a) {
    const Mat3 expect = expected_gram(a.cls);
    double dev = 0.0;
    for (const FrameSample& f : a.samples)
        dev = std::max(dev, max_abs_diff(frame_gram(f.T, f.N, f.B), expect));
    return dev;
}

double frenet_closure_residual(const FrenetApparatus& a) {
    const std::size_t n = a.samples.size();
    if (n < 9) throw Error("closure residual needs at least 9 samples");
    const double h = a.step();

    std::vector<double> comp(n);
    std::vector<std::vector<double>> der(9);
    for (int v = 0; v < 9; ++v) {
        for (std::size_t i = 0; i < n; ++i) {
            const FrameSample& f = a.samples[i];
            const Vec3& vec = v < 3 ? f.T : v < 6 ? f.N : f.B;
            comp[i] = v % 3 == 0 ? vec.x : v % 3 == 1 ? vec.y : vec.z;
        }
        der[static_cast<std::size_t>(v)] = fd_derive(comp, h, 1);
    }

    double worst = 0.0;
    for (std::size_t i = 3; i + 3 < n; ++i) {
        const FrameSample& f = a.samples[i];
        Vec3 dT, dN, dB;
        frenet_matrix_action(a.cls, f.kappa, f.tau, f.T, f.N, f.B, dT, dN, dB);
        const Vec3 fdT{der[0][i], der[1][i], der[2][i]};
        const Vec3 fdN{der[3][i], der[4][i], der[5][i]};
        const Vec3 fdB{der[6][i], der[7][i], der[8][i]};
        const Vec3 pr[3] = {dT, dN, dB};
        const Vec3 fd[3] = {fdT, fdN, fdB};
        for (int k = 0; k < 3; ++k) {
            const double scale = 1.0 + euclidean_norm(pr[k]);
            worst = std::max(worst, euclidean_norm(fd[k] - pr[k]) / scale);
        }
    }
    return worst;
}

}  // namespace helixlab
