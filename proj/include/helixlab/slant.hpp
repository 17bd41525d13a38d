#pragma once

#include <optional>
#include <string>
#include <vector>

#include "helixlab/frenet.hpp"

namespace helixlab {

enum class SigmaBranch { TauMinusKappa, KappaMinusTau, TauPlusKappa, Euclidean };

const char* to_string(SigmaBranch b);

/// Characterization profile sigma(s) = kappa^2 / disc^(3/2) * (tau/kappa)'
/// for one branch discriminant; points outside the branch's domain of
/// definition are masked out.
struct SigmaProfile {
    SigmaBranch branch = SigmaBranch::TauMinusKappa;
    std::vector<double> s;
    std::vector<double> sigma;
    std::vector<char> valid;

    std::size_t valid_count() const;
};

enum class AxisConstruction {
    SigmaBranchFormula,       // frame-coefficient formula of the active branch
    TangentPlusBinormal,      // degenerate tau^2 = kappa^2 case
    ScaledNormal,             // null-normal case: U = a2(s) N(s)
    TorsionFit,               // lightlike case: U from the fitted (a, b, c)
    BruteForce,
};

const char* to_string(AxisConstruction c);

struct AxisCandidate {
    Vec3 U;
    double c_value = 0.0;  // the constant <N, U>
    AxisConstruction construction = AxisConstruction::BruteForce;
    double drift = 0.0;       // max_s |U(s) - U(s0)|_euclid for formula axes
    double n_variance = 0.0;  // variance of <N(s), U>
};

enum class Verdict { Slant, NotSlant, SlantOnSubintervals, DegenerateAlwaysSlant };

const char* to_string(Verdict v);

struct IntervalReport {
    double s_begin = 0.0;
    double s_end = 0.0;
    std::optional<SigmaBranch> branch;
    bool constant = false;
    double sigma_constant = 0.0;
    double normalized_stdev = 0.0;
};

struct LightlikeFit {
    double a = 0.0, b = 0.0, c = 0.0;
    double residual = 0.0;
};

struct SlantReport {
    CurveClass cls = CurveClass::Timelike;
    Verdict verdict = Verdict::NotSlant;
    std::vector<SigmaProfile> profiles;
    std::optional<AxisCandidate> axis;
    std::vector<IntervalReport> intervals;
    std::optional<LightlikeFit> lightlike_fit;
    AxisCandidate oracle;
    bool oracle_disagreement = false;
    double tol = 1e-6;
};

/// Branch profiles appropriate to the class: both difference branches for
/// timelike and spacelike-spacelike-normal curves, the sum branch for a
/// timelike normal, nothing for the two null-frame classes. (tau/kappa)' is
/// exact when the apparatus carries expression-backed fields, otherwise a
/// 4th-order finite difference.
std::vector<SigmaProfile> sigma_profile(const FrenetApparatus& a);

/// Comparator profile with the Euclidean-style denominator
/// (kappa^2 + tau^2)^(3/2); defined everywhere.
SigmaProfile euclidean_sigma_profile(const FrenetApparatus& a);

struct ConstancyResult {
    bool is_constant = false;
    double estimate = 0.0;
    double normalized_stdev = 0.0;  // stdev / (1 + |mean|)
};

/// Constant iff stdev/(1+|mean|) <= tol over unmasked points; needs at
/// least 8 of them (TooFewPoints otherwise).
ConstancyResult detect_constant(const std::vector<double>& values,
                                const std::vector<char>& mask, double tol);

/// Axis of the slant direction for the class, evaluated at the first sample
/// and held fixed; drift and n_variance are measured over the whole
/// apparatus. Throws BranchUndefined when the requested branch discriminant
/// changes sign inside the domain.
AxisCandidate reconstruct_axis(const FrenetApparatus& a, double sigma_constant,
                               SigmaBranch branch);

/// Least-squares fit of tau(s) = a / (b s + c)^2 through the affine model
/// of 1/sqrt|tau|, normalized to b^2 + c^2 = 1 with the leading nonzero of
/// (b, c) positive. residual is the RMS of (tau - model)/tau.
LightlikeFit fit_lightlike_torsion(const std::vector<double>& s,
                                   const std::vector<double>& tau);

/// Independent check of the defining property: minimizes the variance of
/// <N(s), U> over unit coefficient vectors of U in the frame at the first
/// sample (multi-start simplex descent). Requires >= 64 samples.
AxisCandidate brute_force_axis(const FrenetApparatus& a);

/// Full slant-helix decision for the apparatus; tol <= 0 selects the
/// default (1e-6, relaxed to 1e-4 for sampled sources).
SlantReport analyze(const FrenetApparatus& a, double tol);

/// Stable-key-order JSON with 17-significant-digit floats; byte-identical
/// across runs for identical inputs.
std::string report_to_json(const SlantReport& r);

/// Frame-expansion diagnostics of a fixed vector U along the apparatus:
/// residuals of the class's coefficient ODE system (finite-difference
/// derivatives, interior points), relative constancy of the invariant
/// quadratic form <U,U>, the coefficient proportionality residual for the
/// sigma classes, and the affine deviation of the T-coefficient for
/// lightlike curves.
struct CoefficientDiagnostics {
    double max_system_residual = 0.0;
    double quad_form_rel_dev = 0.0;
    double proportionality_residual = 0.0;
    double a3_affine_dev = 0.0;
};

CoefficientDiagnostics coefficient_diagnostics(const FrenetApparatus& a, const Vec3& U);

}  // namespace helixlab
