#include "helixlab/slant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "helixlab/errors.hpp"
#include "helixlab/fd.hpp"
#include "helixlab/numfmt.hpp"

namespace helixlab {

namespace {

constexpr double kMaskRel = 1e-9;  // discriminant mask, relative to kappa^2+tau^2

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    double stdev() const { return std::sqrt(variance); }
};

Moments moments(const std::vector<double>& v) {
    Moments m;
    if (v.empty()) return m;
    m.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - m.mean) * (x - m.mean);
    m.variance = acc / static_cast<double>(v.size());
    return m;
}

}  // namespace

const char* to_string(SigmaBranch b) {
    switch (b) {
        case SigmaBranch::TauMinusKappa: return "TauMinusKappa";
        case SigmaBranch::KappaMinusTau: return "KappaMinusTau";
        case SigmaBranch::TauPlusKappa: return "TauPlusKappa";
        case SigmaBranch::Euclidean: return "Euclidean";
    }
    return "?";
}

const char* to_string(AxisConstruction c) {
    switch (c) {
        case AxisConstruction::SigmaBranchFormula: return "SigmaBranchFormula";
        case AxisConstruction::TangentPlusBinormal: return "TangentPlusBinormal";
        case AxisConstruction::ScaledNormal: return "ScaledNormal";
        case AxisConstruction::TorsionFit: return "TorsionFit";
        case AxisConstruction::BruteForce: return "BruteForce";
    }
    return "?";
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Slant: return "Slant";
        case Verdict::NotSlant: return "NotSlant";
        case Verdict::SlantOnSubintervals: return "SlantOnSubintervals";
        case Verdict::DegenerateAlwaysSlant: return "DegenerateAlwaysSlant";
    }
    return "?";
}

std::size_t SigmaProfile::valid_count() const {
    std::size_t n = 0;
    for (char v : valid) n += v != 0;
    return n;
}

// ---------------------------------------------------------------------------
// sigma profiles
// ---------------------------------------------------------------------------

namespace {

/// (tau/kappa) and its s-derivative along the apparatus: exact when both
/// fields are expression-backed, 4th-order differences otherwise.
void ratio_and_derivative(const FrenetApparatus& a, std::vector<double>& w,
                          std::vector<double>& dw) {
    const std::size_t n = a.size();
    w.resize(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = a.samples[i].tau / a.samples[i].kappa;
    const bool analytic = a.kappa_field && a.tau_field && a.kappa_field->analytic() &&
                          a.tau_field->analytic();
    if (analytic) {
        dw.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double s = a.samples[i].s;
            const double k = (*a.kappa_field)(s);
            const double t = (*a.tau_field)(s);
            const double dk = a.kappa_field->derivative(s);
            const double dt = a.tau_field->derivative(s);
            dw[i] = (dt * k - t * dk) / (k * k);
        }
    } else {
        dw = fd_derive_auto(w, a.step(), 1);
    }
}

double branch_discriminant(SigmaBranch b, double kappa, double tau) {
    switch (b) {
        case SigmaBranch::TauMinusKappa: return tau * tau - kappa * kappa;
        case SigmaBranch::KappaMinusTau: return kappa * kappa - tau * tau;
        case SigmaBranch::TauPlusKappa:
        case SigmaBranch::Euclidean: return tau * tau + kappa * kappa;
    }
    return 0.0;
}

double discriminant_scale(const FrenetApparatus& a) {
    double scale = 0.0;
    for (const FrameSample& f : a.samples)
        scale = std::max(scale, f.kappa * f.kappa + f.tau * f.tau);
    return scale;
}

SigmaProfile profile_for_branch(const FrenetApparatus& a, SigmaBranch branch,
                                const std::vector<double>& dw) {
    SigmaProfile p;
    p.branch = branch;
    const std::size_t n = a.size();
    p.s.resize(n);
    p.sigma.assign(n, 0.0);
    p.valid.assign(n, 0);
    const double eps = kMaskRel * discriminant_scale(a);
    for (std::size_t i = 0; i < n; ++i) {
        const FrameSample& f = a.samples[i];
        p.s[i] = f.s;
        const double disc = branch_discriminant(branch, f.kappa, f.tau);
        if (disc > eps) {
            p.sigma[i] = f.kappa * f.kappa * dw[i] / std::pow(disc, 1.5);
            p.valid[i] = 1;
        }
    }
    return p;
}

}  // namespace

std::vector<SigmaProfile> sigma_profile(const FrenetApparatus& a) {
    std::vector<SigmaProfile> out;
    if (!class_defines_kappa(a.cls)) return out;  // null classes: no sigma theory
    std::vector<double> w, dw;
    ratio_and_derivative(a, w, dw);
    if (a.cls == CurveClass::SpacelikeTimelikeN) {
        out.push_back(profile_for_branch(a, SigmaBranch::TauPlusKappa, dw));
    } else {
        out.push_back(profile_for_branch(a, SigmaBranch::TauMinusKappa, dw));
        out.push_back(profile_for_branch(a, SigmaBranch::KappaMinusTau, dw));
    }
    return out;
}

SigmaProfile euclidean_sigma_profile(const FrenetApparatus& a) {
    std::vector<double> w, dw;
    ratio_and_derivative(a, w, dw);
    return profile_for_branch(a, SigmaBranch::Euclidean, dw);
}

ConstancyResult detect_constant(const std::vector<double>& values,
                                const std::vector<char>& mask, double tol) {
    std::vector<double> v;
    v.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        if (mask.empty() || mask[i]) v.push_back(values[i]);
    if (v.size() < 8)
        throw TooFewPoints("constancy test needs at least 8 valid points, got " +
                           std::to_string(v.size()));
    const Moments m = moments(v);
    ConstancyResult r;
    r.estimate = m.mean;
    r.normalized_stdev = m.stdev() / (1.0 + std::fabs(m.mean));
    r.is_constant = r.normalized_stdev <= tol;
    return r;
}

// ---------------------------------------------------------------------------
// axis reconstruction
// ---------------------------------------------------------------------------

namespace {

struct FrameCoeffs {
    double a1, an, a3;  // coefficients of T, N, B
};

/// Coefficient functions of the branch axis formula at one sample.
FrameCoeffs branch_coeffs(CurveClass cls, SigmaBranch branch, double c, double kappa,
                          double tau, double disc) {
    const double root = std::sqrt(disc);
    FrameCoeffs fc{0.0, c, 0.0};
    switch (cls) {
        case CurveClass::Timelike:
            if (branch == SigmaBranch::TauMinusKappa) {
                fc.a1 = tau / root;
                fc.a3 = kappa / root;
            } else {
                fc.a1 = -tau / root;
                fc.a3 = -kappa / root;
            }
            break;
        case CurveClass::SpacelikeSpacelikeN:
            if (branch == SigmaBranch::TauMinusKappa) {
                fc.a1 = -tau / root;
                fc.a3 = kappa / root;
            } else {
                fc.a1 = tau / root;
                fc.a3 = -kappa / root;
            }
            break;
        case CurveClass::SpacelikeTimelikeN:
            fc.a1 = tau / root;
            fc.an = -c;  // <N,N> = -1, so the N-coefficient is -<N,U>
            fc.a3 = -kappa / root;
            break;
        default: break;
    }
    return fc;
}

Vec3 combine(const FrameSample& f, const FrameCoeffs& fc) {
    return fc.a1 * f.T + fc.an * f.N + fc.a3 * f.B;
}

AxisCandidate finish_axis(const FrenetApparatus& a, Vec3 U, double c_value,
                          AxisConstruction construction,
                          const std::vector<Vec3>& along) {
    AxisCandidate ax;
    ax.U = U;
    ax.c_value = c_value;
    ax.construction = construction;
    double drift = 0.0;
    for (const Vec3& v : along) drift = std::max(drift, euclidean_norm(v - U));
    ax.drift = drift;
    std::vector<double> ndot(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        ndot[i] = minkowski_inner(a.samples[i].N, U);
    ax.n_variance = moments(ndot).variance;
    return ax;
}

}  // namespace

namespace {

/// tau^2 = kappa^2 on the whole domain: U = T +- B is constant.
AxisCandidate degenerate_axis(const FrenetApparatus& a) {
    const FrameSample& f0 = a.samples.front();
    const double w0 = f0.tau / f0.kappa;
    const double sign =
        (a.cls == CurveClass::Timelike ? 1.0 : -1.0) * (w0 >= 0.0 ? 1.0 : -1.0);
    std::vector<Vec3> along(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        along[i] = a.samples[i].T + sign * a.samples[i].B;
    return finish_axis(a, f0.T + sign * f0.B, 0.0,
                       AxisConstruction::TangentPlusBinormal, along);
}

}  // namespace

AxisCandidate reconstruct_axis(const FrenetApparatus& a, double sigma_constant,
                               SigmaBranch branch) {
    const std::size_t n = a.size();
    if (n == 0) throw Error("empty apparatus");
    const FrameSample& f0 = a.samples.front();

    if (a.cls == CurveClass::SpacelikeNullN) {
        // U = a2(s) N(s) with a2 = exp(-integral of tau); a2(s0) = 1
        std::vector<double> tau(n);
        for (std::size_t i = 0; i < n; ++i) tau[i] = a.samples[i].tau;
        const std::vector<double> integral = cumulative_integral(tau, a.step());
        std::vector<Vec3> along(n);
        for (std::size_t i = 0; i < n; ++i)
            along[i] = std::exp(-integral[i]) * a.samples[i].N;
        return finish_axis(a, f0.N, 0.0, AxisConstruction::ScaledNormal, along);
    }

    if (a.cls == CurveClass::Lightlike) {
        std::vector<double> s(n), tau(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = a.samples[i].s;
            tau[i] = a.samples[i].tau;
        }
        const LightlikeFit fit = fit_lightlike_torsion(s, tau);
        std::vector<Vec3> along(n);
        for (std::size_t i = 0; i < n; ++i) {
            const FrameSample& f = a.samples[i];
            const double lin = fit.b * f.s + fit.c;
            along[i] = (fit.a / lin) * f.T + fit.b * f.N + lin * f.B;
        }
        const double lin0 = fit.b * f0.s + fit.c;
        const Vec3 U = (fit.a / lin0) * f0.T + fit.b * f0.N + lin0 * f0.B;
        return finish_axis(a, U, fit.b, AxisConstruction::TorsionFit, along);
    }

    // sigma classes
    const double scale = discriminant_scale(a);
    std::vector<double> disc(n);
    double max_abs_disc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        disc[i] = a.samples[i].tau * a.samples[i].tau -
                  a.samples[i].kappa * a.samples[i].kappa;
        max_abs_disc = std::max(max_abs_disc, std::fabs(disc[i]));
    }

    if (a.cls != CurveClass::SpacelikeTimelikeN && max_abs_disc <= 1e-9 * scale)
        return degenerate_axis(a);

    const double eps = kMaskRel * scale;
    for (std::size_t i = 0; i < n; ++i) {
        const double bd = branch_discriminant(branch, a.samples[i].kappa, a.samples[i].tau);
        if (!(bd > eps)) {
            const double lo = i > 0 ? a.samples[i - 1].s : a.samples[i].s;
            throw BranchUndefined("branch discriminant is not positive near s=" +
                                      format_double(a.samples[i].s),
                                  lo, a.samples[i].s);
        }
    }

    std::vector<Vec3> along(n);
    for (std::size_t i = 0; i < n; ++i) {
        const FrameSample& f = a.samples[i];
        const double bd = branch_discriminant(branch, f.kappa, f.tau);
        along[i] = combine(f, branch_coeffs(a.cls, branch, sigma_constant, f.kappa, f.tau, bd));
    }
    return finish_axis(a, along.front(), sigma_constant,
                       AxisConstruction::SigmaBranchFormula, along);
}

// ---------------------------------------------------------------------------
// lightlike torsion fit
// ---------------------------------------------------------------------------

LightlikeFit fit_lightlike_torsion(const std::vector<double>& s,
                                   const std::vector<double>& tau) {
    const std::size_t n = s.size();
    if (n < 8 || tau.size() != n)
        throw TooFewPoints("torsion fit needs at least 8 samples");
    const double sign = tau[0] > 0.0 ? 1.0 : -1.0;
    for (double t : tau) {
        if (t == 0.0 || (t > 0.0) != (sign > 0.0))
            throw SignChange("torsion changes sign inside the fit domain");
    }

    // least squares line through g = 1/sqrt|tau|
    double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = 1.0 / std::sqrt(std::fabs(tau[i]));
        sw += 1.0;
        sx += s[i];
        sy += g;
        sxx += s[i] * s[i];
        sxy += s[i] * g;
    }
    const double det = sw * sxx - sx * sx;
    const double p = (sw * sxy - sx * sy) / det;
    const double q = (sxx * sy - sx * sxy) / det;

    const double l0 = p * s.front() + q;
    const double l1 = p * s.back() + q;
    if (l0 == 0.0 || l1 == 0.0 || (l0 > 0.0) != (l1 > 0.0))
        throw PoleInDomain("fitted line b*s + c vanishes inside the domain");

    const double r = std::hypot(p, q);
    double b = p / r, c = q / r;
    // canonical representative of the (a,b,c) ~ (l^2 a, l b, l c) family
    const bool b_nonzero = std::fabs(b) > 1e-9;
    if ((b_nonzero && b < 0.0) || (!b_nonzero && c < 0.0)) {
        b = -b;
        c = -c;
    }
    LightlikeFit fit;
    fit.a = sign / (r * r);
    fit.b = b;
    fit.c = c;

    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lin = fit.b * s[i] + fit.c;
        const double model = fit.a / (lin * lin);
        const double rel = (tau[i] - model) / tau[i];
        acc += rel * rel;
    }
    fit.residual = std::sqrt(acc / static_cast<double>(n));
    return fit;
}

// ---------------------------------------------------------------------------
// brute-force oracle
// ---------------------------------------------------------------------------

namespace {

struct Quadratic {
    double q[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};

    double operator()(const double u[3]) const {
        double acc = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) acc += u[i] * q[i][j] * u[j];
        return acc;
    }
};

void sphere_point(double theta, double phi, double u[3]) {
    u[0] = std::sin(theta) * std::cos(phi);
    u[1] = std::sin(theta) * std::sin(phi);
    u[2] = std::cos(theta);
}

/// Nelder-Mead on (theta, phi); the objective is smooth and 2-dimensional
/// after normalization, so a short simplex descent suffices.
void simplex_descent(const Quadratic& f, double& theta, double& phi, double& fval) {
    struct Pt {
        double x[2];
        double f;
    };
    auto eval = [&](const double x[2]) {
        double u[3];
        sphere_point(x[0], x[1], u);
        return f(u);
    };
    Pt simplex[3];
    simplex[0] = {{theta, phi}, 0.0};
    simplex[1] = {{theta + 0.05, phi}, 0.0};
    simplex[2] = {{theta, phi + 0.05}, 0.0};
    for (Pt& p : simplex) p.f = eval(p.x);

    for (int it = 0; it < 200; ++it) {
        std::sort(std::begin(simplex), std::end(simplex),
                  [](const Pt& a, const Pt& b) { return a.f < b.f; });
        if (simplex[2].f - simplex[0].f <= 1e-14 * (1.0 + std::fabs(simplex[0].f))) break;
        const double cx[2] = {0.5 * (simplex[0].x[0] + simplex[1].x[0]),
                              0.5 * (simplex[0].x[1] + simplex[1].x[1])};
        Pt refl;
        refl.x[0] = cx[0] + (cx[0] - simplex[2].x[0]);
        refl.x[1] = cx[1] + (cx[1] - simplex[2].x[1]);
        refl.f = eval(refl.x);
        if (refl.f < simplex[0].f) {
            Pt exp_;
            exp_.x[0] = cx[0] + 2.0 * (cx[0] - simplex[2].x[0]);
            exp_.x[1] = cx[1] + 2.0 * (cx[1] - simplex[2].x[1]);
            exp_.f = eval(exp_.x);
            simplex[2] = exp_.f < refl.f ? exp_ : refl;
        } else if (refl.f < simplex[1].f) {
            simplex[2] = refl;
        } else {
            Pt contr;
            contr.x[0] = cx[0] + 0.5 * (simplex[2].x[0] - cx[0]);
            contr.x[1] = cx[1] + 0.5 * (simplex[2].x[1] - cx[1]);
            contr.f = eval(contr.x);
            if (contr.f < simplex[2].f) {
                simplex[2] = contr;
            } else {
                for (int i = 1; i < 3; ++i) {
                    simplex[i].x[0] = 0.5 * (simplex[i].x[0] + simplex[0].x[0]);
                    simplex[i].x[1] = 0.5 * (simplex[i].x[1] + simplex[0].x[1]);
                    simplex[i].f = eval(simplex[i].x);
                }
            }
        }
    }
    std::sort(std::begin(simplex), std::end(simplex),
              [](const Pt& a, const Pt& b) { return a.f < b.f; });
    theta = simplex[0].x[0];
    phi = simplex[0].x[1];
    fval = simplex[0].f;
}

}  // namespace

AxisCandidate brute_force_axis(const FrenetApparatus& a) {
    const std::size_t n = a.size();
    if (n < 64) throw TooFewPoints("oracle needs at least 64 samples");
    const FrameSample& f0 = a.samples.front();

    // variance of <N(s), u1 T0 + u2 N0 + u3 B0> is a quadratic form in u
    std::vector<double> series[3];
    for (auto& s : series) s.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        series[0][i] = minkowski_inner(a.samples[i].N, f0.T);
        series[1][i] = minkowski_inner(a.samples[i].N, f0.N);
        series[2][i] = minkowski_inner(a.samples[i].N, f0.B);
    }
    double mean[3];
    for (int k = 0; k < 3; ++k) mean[k] = moments(series[k]).mean;
    Quadratic f;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                acc += (series[i][k] - mean[i]) * (series[j][k] - mean[j]);
            f.q[i][j] = acc / static_cast<double>(n);
        }

    double best_f = 0.0;
    double best_u[3] = {0.0, 0.0, 1.0};
    bool have = false;
    for (int j = 0; j < 20; ++j) {
        for (int k = 0; k < 40; ++k) {
            double theta = std::numbers::pi * (static_cast<double>(j) + 0.5) / 20.0;
            double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / 40.0;
            double fval;
            simplex_descent(f, theta, phi, fval);
            double u[3];
            sphere_point(theta, phi, u);
            const double tie = 1e-16 * (1.0 + std::fabs(have ? best_f : fval));
            const bool better =
                !have || fval < best_f - tie ||
                (std::fabs(fval - best_f) <= tie &&
                 std::lexicographical_compare(u, u + 3, best_u, best_u + 3));
            if (better) {
                best_f = fval;
                std::copy(u, u + 3, best_u);
                have = true;
            }
        }
    }

    AxisCandidate ax;
    ax.U = best_u[0] * f0.T + best_u[1] * f0.N + best_u[2] * f0.B;
    ax.construction = AxisConstruction::BruteForce;
    ax.n_variance = std::max(best_f, 0.0);  // rounding can push the form negative
    ax.drift = 0.0;
    std::vector<double> ndot(n);
    for (std::size_t i = 0; i < n; ++i) ndot[i] = minkowski_inner(a.samples[i].N, ax.U);
    ax.c_value = moments(ndot).mean;
    return ax;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

namespace {

double global_ndotu_stdev(const FrenetApparatus& a, const Vec3& U, double* mean_out) {
    std::vector<double> ndot(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        ndot[i] = minkowski_inner(a.samples[i].N, U);
    const Moments m = moments(ndot);
    if (mean_out) *mean_out = m.mean;
    return m.stdev() / (1.0 + std::fabs(m.mean));
}

struct Run {
    std::size_t first, last;  // inclusive sample range
    SigmaBranch branch;
};

std::vector<Run> split_runs(const FrenetApparatus& a) {
    const double eps = kMaskRel * discriminant_scale(a);
    std::vector<Run> runs;
    std::optional<Run> cur;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.samples[i].tau * a.samples[i].tau -
                         a.samples[i].kappa * a.samples[i].kappa;
        std::optional<SigmaBranch> br;
        if (d > eps)
            br = SigmaBranch::TauMinusKappa;
        else if (d < -eps)
            br = SigmaBranch::KappaMinusTau;
        if (br && cur && cur->branch == *br) {
            cur->last = i;
        } else {
            if (cur) runs.push_back(*cur);
            cur.reset();
            if (br) cur = Run{i, i, *br};
        }
    }
    if (cur) runs.push_back(*cur);
    return runs;
}

}  // namespace

SlantReport analyze(const FrenetApparatus& a, double tol) {
    validate_apparatus_grid(a);
    if (tol <= 0.0) tol = a.source == ApparatusSource::Sampled ? 1e-4 : 1e-6;

    SlantReport rep;
    rep.cls = a.cls;
    rep.tol = tol;
    rep.oracle = brute_force_axis(a);

    const double s_begin = a.samples.front().s;
    const double s_end = a.samples.back().s;

    switch (a.cls) {
        case CurveClass::SpacelikeNullN: {
            rep.axis = reconstruct_axis(a, 0.0, SigmaBranch::TauMinusKappa);
            rep.verdict = Verdict::Slant;
            rep.intervals.push_back({s_begin, s_end, std::nullopt, true, 0.0, 0.0});
            break;
        }
        case CurveClass::Lightlike: {
            std::vector<double> s(a.size()), tau(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                s[i] = a.samples[i].s;
                tau[i] = a.samples[i].tau;
            }
            const LightlikeFit fit = fit_lightlike_torsion(s, tau);
            rep.lightlike_fit = fit;
            if (fit.residual <= tol) {
                rep.verdict = Verdict::Slant;
                rep.axis = reconstruct_axis(a, fit.b, SigmaBranch::TauMinusKappa);
            } else {
                rep.verdict = Verdict::NotSlant;
            }
            rep.intervals.push_back(
                {s_begin, s_end, std::nullopt, fit.residual <= tol, fit.b, fit.residual});
            break;
        }
        default: {
            rep.profiles = sigma_profile(a);

            const double scale = discriminant_scale(a);
            double max_abs_disc = 0.0;
            for (const FrameSample& f : a.samples)
                max_abs_disc = std::max(max_abs_disc,
                                        std::fabs(f.tau * f.tau - f.kappa * f.kappa));

            const bool difference_branches = a.cls != CurveClass::SpacelikeTimelikeN;
            if (difference_branches && max_abs_disc <= tol * scale) {
                rep.axis = degenerate_axis(a);
                rep.verdict = Verdict::DegenerateAlwaysSlant;
                rep.intervals.push_back({s_begin, s_end, std::nullopt, true, 0.0, 0.0});
                break;
            }

            std::vector<Run> runs;
            if (difference_branches) {
                for (const Run& r : split_runs(a))
                    if (r.last - r.first + 1 >= 8) runs.push_back(r);
            } else {
                runs.push_back({0, a.size() - 1, SigmaBranch::TauPlusKappa});
            }

            const SigmaProfile* by_branch[4] = {nullptr, nullptr, nullptr, nullptr};
            for (const SigmaProfile& p : rep.profiles)
                by_branch[static_cast<int>(p.branch)] = &p;

            std::size_t constant_runs = 0;
            std::optional<Run> first_constant;
            for (const Run& r : runs) {
                const SigmaProfile* p = by_branch[static_cast<int>(r.branch)];
                std::vector<double> vals;
                std::vector<char> mask;
                for (std::size_t i = r.first; i <= r.last; ++i) {
                    vals.push_back(p->sigma[i]);
                    mask.push_back(p->valid[i]);
                }
                IntervalReport ir;
                ir.s_begin = a.samples[r.first].s;
                ir.s_end = a.samples[r.last].s;
                ir.branch = r.branch;
                try {
                    const ConstancyResult cr = detect_constant(vals, mask, tol);
                    ir.constant = cr.is_constant;
                    ir.sigma_constant = cr.estimate;
                    ir.normalized_stdev = cr.normalized_stdev;
                } catch (const TooFewPoints&) {
                    ir.constant = false;
                }
                if (ir.constant) {
                    ++constant_runs;
                    if (!first_constant) first_constant = r;
                }
                rep.intervals.push_back(ir);
            }

            if (runs.empty() || constant_runs == 0) {
                rep.verdict = Verdict::NotSlant;
            } else if (constant_runs < runs.size()) {
                rep.verdict = Verdict::SlantOnSubintervals;
            } else {
                // all intervals constant: require one consistent axis
                const FrenetApparatus sl = a.slice(first_constant->first, first_constant->last);
                double c_est = 0.0;
                for (const IntervalReport& ir : rep.intervals)
                    if (ir.s_begin == sl.samples.front().s) c_est = ir.sigma_constant;
                AxisCandidate ax = reconstruct_axis(sl, c_est, first_constant->branch);
                double mean = 0.0;
                const double global_dev = global_ndotu_stdev(a, ax.U, &mean);
                if (global_dev <= tol) {
                    // diagnostics measured over the full apparatus
                    std::vector<double> ndot(a.size());
                    for (std::size_t i = 0; i < a.size(); ++i)
                        ndot[i] = minkowski_inner(a.samples[i].N, ax.U);
                    ax.n_variance = moments(ndot).variance;
                    rep.axis = ax;
                    rep.verdict = Verdict::Slant;
                } else {
                    rep.verdict = Verdict::SlantOnSubintervals;
                }
            }
            break;
        }
    }

    const bool analytic_slant =
        rep.verdict == Verdict::Slant || rep.verdict == Verdict::DegenerateAlwaysSlant;
    const bool oracle_slant = rep.oracle.n_variance <= tol * tol;
    rep.oracle_disagreement =
        rep.verdict != Verdict::SlantOnSubintervals && analytic_slant != oracle_slant;
    return rep;
}

// ---------------------------------------------------------------------------
// JSON report
// ---------------------------------------------------------------------------

namespace {

void json_vec(std::string& out, const Vec3& v) {
    out += '[';
    out += format_double(v.x);
    out += ", ";
    out += format_double(v.y);
    out += ", ";
    out += format_double(v.z);
    out += ']';
}

void json_axis(std::string& out, const AxisCandidate& ax) {
    out += "{\"U\": ";
    json_vec(out, ax.U);
    out += ", \"c\": " + format_double(ax.c_value);
    out += ", \"drift\": " + format_double(ax.drift);
    out += ", \"n_variance\": " + format_double(ax.n_variance);
    out += ", \"construction\": \"" + std::string(to_string(ax.construction)) + "\"";
    out += ", \"causal_class\": \"" +
           std::string(to_string(causal_class(ax.U, 1e-12))) + "\"}";
}

}  // namespace

std::string report_to_json(const SlantReport& r) {
    std::string out;
    out += "{\n";
    out += "  \"class\": \"" + std::string(to_string(r.cls)) + "\",\n";
    out += "  \"verdict\": \"" + std::string(to_string(r.verdict)) + "\",\n";

    out += "  \"sigma\": [";
    for (std::size_t i = 0; i < r.profiles.size(); ++i) {
        const SigmaProfile& p = r.profiles[i];
        if (i) out += ", ";
        std::vector<double> vals;
        for (std::size_t k = 0; k < p.sigma.size(); ++k)
            if (p.valid[k]) vals.push_back(p.sigma[k]);
        const Moments m = moments(vals);
        out += "{\"branch\": \"" + std::string(to_string(p.branch)) + "\"";
        out += ", \"constant\": " + (vals.empty() ? "null" : format_double(m.mean));
        out += ", \"stdev\": " + (vals.empty() ? "null" : format_double(m.stdev()));
        out += ", \"valid_points\": " + std::to_string(vals.size()) + "}";
    }
    out += "],\n";

    out += "  \"axis\": ";
    if (r.axis)
        json_axis(out, *r.axis);
    else
        out += "null";
    out += ",\n";

    out += "  \"intervals\": [";
    for (std::size_t i = 0; i < r.intervals.size(); ++i) {
        const IntervalReport& ir = r.intervals[i];
        if (i) out += ", ";
        out += "{\"s_begin\": " + format_double(ir.s_begin);
        out += ", \"s_end\": " + format_double(ir.s_end);
        out += ", \"branch\": ";
        out += ir.branch ? "\"" + std::string(to_string(*ir.branch)) + "\"" : "null";
        out += ", \"verdict\": \"";
        out += ir.constant ? "Slant" : "NotSlant";
        out += "\", \"constant\": " + format_double(ir.sigma_constant);
        out += ", \"normalized_stdev\": " + format_double(ir.normalized_stdev) + "}";
    }
    out += "],\n";

    out += "  \"lightlike_fit\": ";
    if (r.lightlike_fit) {
        const LightlikeFit& f = *r.lightlike_fit;
        out += "{\"a\": " + format_double(f.a) + ", \"b\": " + format_double(f.b) +
               ", \"c\": " + format_double(f.c) +
               ", \"residual\": " + format_double(f.residual) + "}";
    } else {
        out += "null";
    }
    out += ",\n";

    out += "  \"oracle\": {\"U\": ";
    json_vec(out, r.oracle.U);
    out += ", \"n_variance\": " + format_double(r.oracle.n_variance);
    out += ", \"agrees\": ";
    out += r.oracle_disagreement ? "false" : "true";
    out += "}\n";
    out += "}\n";
    return out;
}

// ---------------------------------------------------------------------------
// coefficient diagnostics
// ---------------------------------------------------------------------------

CoefficientDiagnostics coefficient_diagnostics(const FrenetApparatus& a, const Vec3& U) {
    const std::size_t n = a.size();
    if (n < 9) throw Error("coefficient diagnostics need at least 9 samples");
    const double h = a.step();

    std::vector<double> a1(n), an(n), a3(n), qform(n), qscale(n), s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const FrameSample& f = a.samples[i];
        s[i] = f.s;
        const double uT = minkowski_inner(U, f.T);
        const double uN = minkowski_inner(U, f.N);
        const double uB = minkowski_inner(U, f.B);
        switch (a.cls) {
            case CurveClass::Timelike:
                a1[i] = -uT; an[i] = uN; a3[i] = uB;
                qform[i] = -a1[i] * a1[i] + an[i] * an[i] + a3[i] * a3[i];
                break;
            case CurveClass::SpacelikeSpacelikeN:
                a1[i] = uT; an[i] = uN; a3[i] = -uB;
                qform[i] = a1[i] * a1[i] + an[i] * an[i] - a3[i] * a3[i];
                break;
            case CurveClass::SpacelikeTimelikeN:
                a1[i] = uT; an[i] = -uN; a3[i] = uB;  // an is the N-coefficient
                qform[i] = a1[i] * a1[i] - an[i] * an[i] + a3[i] * a3[i];
                break;
            case CurveClass::SpacelikeNullN:
                a1[i] = uT; an[i] = uB; a3[i] = uN;  // an = N-coeff, a3 = B-coeff
                qform[i] = a1[i] * a1[i] + 2.0 * an[i] * a3[i];
                break;
            case CurveClass::Lightlike:
                a1[i] = uB; an[i] = uN; a3[i] = uT;
                qform[i] = an[i] * an[i] + 2.0 * a1[i] * a3[i];
                break;
        }
        qscale[i] = a1[i] * a1[i] + an[i] * an[i] + a3[i] * a3[i];
    }

    const std::vector<double> da1 = fd_derive(a1, h, 1);
    const std::vector<double> dan = fd_derive(an, h, 1);
    const std::vector<double> da3 = fd_derive(a3, h, 1);

    CoefficientDiagnostics diag;
    for (std::size_t i = 3; i + 3 < n; ++i) {
        const double kappa = a.samples[i].kappa;
        const double tau = a.samples[i].tau;
        double r1 = 0.0, r2 = 0.0, r3 = 0.0;
        switch (a.cls) {
            case CurveClass::Timelike:
                r1 = da1[i] + an[i] * kappa;
                r2 = kappa * a1[i] - tau * a3[i];
                r3 = da3[i] + an[i] * tau;
                break;
            case CurveClass::SpacelikeSpacelikeN:
                r1 = da1[i] - an[i] * kappa;
                r2 = kappa * a1[i] + tau * a3[i];
                r3 = da3[i] + an[i] * tau;
                break;
            case CurveClass::SpacelikeTimelikeN:
                // an here is the N-coefficient; <N,U> = -an
                r1 = da1[i] + an[i] * kappa;
                r2 = kappa * a1[i] + tau * a3[i];
                r3 = da3[i] + an[i] * tau;
                break;
            case CurveClass::SpacelikeNullN:
                r1 = da1[i] - a3[i];
                r2 = a1[i] + dan[i] + tau * an[i];
                r3 = da3[i] - tau * a3[i];
                break;
            case CurveClass::Lightlike:
                r1 = da1[i] + an[i] * tau;
                r2 = a1[i] - tau * a3[i];
                r3 = da3[i] - an[i];
                break;
        }
        diag.max_system_residual =
            std::max({diag.max_system_residual, std::fabs(r1), std::fabs(r2), std::fabs(r3)});

        if (class_defines_kappa(a.cls)) {
            const double w = tau / kappa;
            const double denom = std::fabs(a1[i]) + std::fabs(a3[i]);
            if (denom > 0.0) {
                double rel;
                if (a.cls == CurveClass::Timelike)
                    rel = std::fabs(a1[i] - a3[i] * w) / denom;
                else
                    rel = std::fabs(a1[i] + a3[i] * w) / denom;
                diag.proportionality_residual = std::max(diag.proportionality_residual, rel);
            }
        }
    }

    const Moments mq = moments(qform);
    const Moments ms = moments(qscale);
    const double denom = std::max(std::fabs(mq.mean), std::max(ms.mean, 1e-30));
    double maxdev = 0.0;
    for (double q : qform) maxdev = std::max(maxdev, std::fabs(q - mq.mean));
    diag.quad_form_rel_dev = maxdev / denom;

    if (a.cls == CurveClass::Lightlike) {
        // a3 (the T-coefficient) must be affine in s
        double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sw += 1.0;
            sx += s[i];
            sy += a3[i];
            sxx += s[i] * s[i];
            sxy += s[i] * a3[i];
        }
        const double det = sw * sxx - sx * sx;
        const double slope = (sw * sxy - sx * sy) / det;
        const double icept = (sxx * sy - sx * sxy) / det;
        for (std::size_t i = 0; i < n; ++i)
            diag.a3_affine_dev =
                std::max(diag.a3_affine_dev, std::fabs(a3[i] - slope * s[i] - icept));
    }
    return diag;
}

}  // namespace helixlab
