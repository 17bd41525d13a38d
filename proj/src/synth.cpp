#include "helixlab/synth.hpp"

#include <cmath>
#include <ostream>

#include "helixlab/errors.hpp"
#include "helixlab/numfmt.hpp"

namespace helixlab {

Frame initial_frame(CurveClass cls) {
    switch (cls) {
        case CurveClass::Timelike:
            return {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
        case CurveClass::SpacelikeSpacelikeN:
            return {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        case CurveClass::SpacelikeTimelikeN:
            return {{1, 0, 0}, {0, 0, 1}, {0, 1, 0}};
        case CurveClass::SpacelikeNullN:
            return {{1, 0, 0}, {0, 1, 1}, {0, 0.5, -0.5}};
        case CurveClass::Lightlike:
            return {{0, 1, 1}, {1, 0, 0}, {0, 0.5, -0.5}};
    }
    return {};
}

namespace {

struct State {
    Vec3 T, N, B, p;
};

State operator+(const State& a, const State& b) {
    return {a.T + b.T, a.N + b.N, a.B + b.B, a.p + b.p};
}

State operator*(double k, const State& a) {
    return {k * a.T, k * a.N, k * a.B, k * a.p};
}

State rhs(CurveClass cls, const ScalarField& kappa, const ScalarField& tau, double s,
          const State& y) {
    const double k = class_defines_kappa(cls) ? kappa(s) : 1.0;
    const double t = tau(s);
    if (!std::isfinite(k) || !std::isfinite(t))
        throw EvalError("scalar spec evaluated to a non-finite value at s=" +
                        format_double(s));
    State d;
    frenet_matrix_action(cls, k, t, y.T, y.N, y.B, d.T, d.N, d.B);
    d.p = y.T;
    return d;
}

}  // namespace

SynthResult integrate_frenet_system(const SynthRequest& req) {
    const double range = req.s_range.length();
    if (!(range > 0.0)) throw Error("synthesis range must have positive length");
    if (!(req.step > 0.0) || req.step > range / 64.0)
        throw Error("step must be positive and at most 1/64 of the range");

    Frame start = req.start_frame ? *req.start_frame : initial_frame(req.cls);
    {
        const Mat3 g = frame_gram(start.T, start.N, start.B);
        if (max_abs_diff(g, expected_gram(req.cls)) > 1e-10)
            throw FrameClosureError("initial frame violates the class Gram matrix");
    }

    const long nsteps = std::lround(std::ceil(range / req.step - 1e-9));
    const double h = range / static_cast<double>(nsteps);

    SynthResult out;
    out.step_used = h;
    out.s.reserve(static_cast<std::size_t>(nsteps) + 1);
    out.position.reserve(static_cast<std::size_t>(nsteps) + 1);
    out.apparatus.cls = req.cls;
    out.apparatus.source = ApparatusSource::Synthesized;
    out.apparatus.kappa_field = req.kappa;
    out.apparatus.tau_field = req.tau;
    out.apparatus.samples.reserve(static_cast<std::size_t>(nsteps) + 1);

    const Mat3 expect = expected_gram(req.cls);
    State y{start.T, start.N, start.B, req.start_point};
    double drift = 0.0;

    auto record = [&](double s, const State& st) {
        out.s.push_back(s);
        out.position.push_back(st.p);
        FrameSample f;
        f.s = s;
        f.T = st.T;
        f.N = st.N;
        f.B = st.B;
        f.kappa = class_defines_kappa(req.cls) ? req.kappa(s) : 1.0;
        f.tau = req.tau(s);
        out.apparatus.samples.push_back(f);
        drift = std::max(drift, max_abs_diff(frame_gram(st.T, st.N, st.B), expect));
    };

    record(req.s_range.lo, y);
    for (long i = 0; i < nsteps; ++i) {
        const double s = req.s_range.lo + h * static_cast<double>(i);
        const State k1 = rhs(req.cls, req.kappa, req.tau, s, y);
        const State k2 = rhs(req.cls, req.kappa, req.tau, s + 0.5 * h, y + 0.5 * h * k1);
        const State k3 = rhs(req.cls, req.kappa, req.tau, s + 0.5 * h, y + 0.5 * h * k2);
        const State k4 = rhs(req.cls, req.kappa, req.tau, s + h, y + h * k3);
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        record(req.s_range.lo + h * static_cast<double>(i + 1), y);
    }

    out.max_gram_drift = drift;
    return out;
}

SynthResult synth_curve(const SynthRequest& req) {
    const double range = req.s_range.length();
    SynthRequest cur = req;
    for (;;) {
        if (cur.step < 1e-12 * range)
            throw StepUnderflow("integration step fell below 1e-12 of the range");
        SynthResult r = integrate_frenet_system(cur);
        if (r.max_gram_drift <= 1e-9) return r;
        cur.step *= 0.5;
    }
}

ScalarField generate_slant_torsion(double sigma_const, const ScalarField& kappa,
                                   double tau_0, Interval s_range, SigmaBranch branch,
                                   double step) {
    const double range = s_range.length();
    if (!(range > 0.0)) throw Error("range must have positive length");
    if (!(step > 0.0) || step > range / 64.0)
        throw Error("step must be positive and at most 1/64 of the range");
    if (branch == SigmaBranch::Euclidean)
        throw Error("torsion generation needs a class branch, not the comparator");

    // work on w = tau/kappa; tau = kappa * w
    auto disc_of_w = [branch](double w) {
        switch (branch) {
            case SigmaBranch::TauMinusKappa: return w * w - 1.0;
            case SigmaBranch::KappaMinusTau: return 1.0 - w * w;
            default: return w * w + 1.0;
        }
    };
    auto wdot = [&](double s, double w) {
        const double k = kappa(s);
        const double d = disc_of_w(w);
        if (!(d > 1e-9))
            throw BranchExit("discriminant decayed below 1e-9 at s=" + format_double(s), s);
        return sigma_const * k * std::pow(d, 1.5);
    };

    const long nsteps = std::lround(std::ceil(range / (0.5 * step) - 1e-9));
    const double h = range / static_cast<double>(nsteps);

    const double k0 = kappa(s_range.lo);
    if (!(std::fabs(k0) > 0.0)) throw EvalError("kappa vanishes at the range start");
    double w = tau_0 / k0;
    if (!(disc_of_w(w) > 1e-9))
        throw BranchExit("initial torsion is outside the branch validity region",
                         s_range.lo);

    std::vector<double> tau(static_cast<std::size_t>(nsteps) + 1);
    tau[0] = tau_0;
    for (long i = 0; i < nsteps; ++i) {
        const double s = s_range.lo + h * static_cast<double>(i);
        const double k1 = wdot(s, w);
        const double k2 = wdot(s + 0.5 * h, w + 0.5 * h * k1);
        const double k3 = wdot(s + 0.5 * h, w + 0.5 * h * k2);
        const double k4 = wdot(s + h, w + h * k3);
        w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(w))
            throw EvalError("torsion blew up at s=" +
                            format_double(s_range.lo + h * static_cast<double>(i + 1)));
        const double snext = s_range.lo + h * static_cast<double>(i + 1);
        if (!(disc_of_w(w) > 1e-9))
            throw BranchExit("discriminant decayed below 1e-9 at s=" + format_double(snext),
                             snext);
        tau[static_cast<std::size_t>(i + 1)] = kappa(snext) * w;
    }
    return ScalarField::from_table(s_range.lo, h, std::move(tau));
}

void write_curve_csv(const SynthResult& r, std::ostream& out) {
    out << "s,x,y,z\n";
    for (std::size_t i = 0; i < r.s.size(); ++i) {
        out << format_double(r.s[i]) << ',' << format_double(r.position[i].x) << ','
            << format_double(r.position[i].y) << ',' << format_double(r.position[i].z)
            << '\n';
    }
}

}  // namespace helixlab
