#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "helixlab/curve.hpp"
#include "helixlab/minkowski.hpp"

namespace helixlab {

/// Causal class of a curve, sub-classified for spacelike curves by the
/// causal character of the principal normal.
enum class CurveClass {
    Timelike,
    SpacelikeSpacelikeN,
    SpacelikeTimelikeN,
    SpacelikeNullN,
    Lightlike,
};

const char* to_string(CurveClass c);
std::optional<CurveClass> curve_class_from_string(std::string_view s);
std::vector<std::string> curve_class_names();

/// Expected Gram matrix of the frame (T, N, B) for a class; entries are
/// -1, 0 or 1.
Mat3 expected_gram(CurveClass c);

/// False for the two classes whose frame systems carry a fixed unit entry
/// in place of a curvature function; their samples report kappa = 1.
bool class_defines_kappa(CurveClass c);

struct FrameSample {
    double s = 0.0;
    Vec3 T, N, B;
    double kappa = 1.0;
    double tau = 0.0;
};

enum class ApparatusSource { Analytic, Sampled, Synthesized };

const char* to_string(ApparatusSource s);

/// Frames, curvature and torsion on a strictly increasing uniform s-grid.
/// kappa_field / tau_field are present when closed forms are known (for
/// example after synthesis from expression specs), enabling exact
/// derivatives downstream; otherwise consumers fall back to finite
/// differences on the samples.
struct FrenetApparatus {
    CurveClass cls = CurveClass::Timelike;
    ApparatusSource source = ApparatusSource::Analytic;
    std::vector<FrameSample> samples;
    std::optional<ScalarField> kappa_field, tau_field;

    double step() const;
    std::size_t size() const { return samples.size(); }

    /// Contiguous sub-range [first, last], fields carried over.
    FrenetApparatus slice(std::size_t first, std::size_t last) const;
};

/// Throws unless the grid is uniform (1e-12 relative) with >= 16 samples.
void validate_apparatus_grid(const FrenetApparatus& a);

/// Causal class of the curve from <a',a'> at `grid` points, with spacelike
/// curves sub-classified by the causal class of the normal component of a''.
/// Throws MixedCausalType (with the bracketing t-interval) or
/// DegenerateCurve.
CurveClass classify_curve(const CurveSpec& curve, int grid);

/// Monotone map s(t) with its inverse, built by composite Simpson over the
/// node grid plus Gauss quadrature within intervals and Newton inversion.
class ReparamMap {
public:
    ReparamMap(std::vector<double> t_nodes, std::vector<double> s_nodes,
               std::function<double(double)> speed);

    double s_of_t(double t) const;
    double t_of_s(double s) const;
    double length() const { return s_nodes_.back(); }
    const std::vector<double>& t_nodes() const { return t_nodes_; }
    const std::vector<double>& s_nodes() const { return s_nodes_; }

private:
    std::vector<double> t_nodes_, s_nodes_;
    std::function<double(double)> speed_;
};

/// ds/dt = |a'(t)| for non-null classes, <a'', a''>^(1/4) for lightlike
/// curves. Throws DegenerateCurve when the integrand vanishes on a
/// subinterval.
ReparamMap reparametrize(const CurveSpec& curve, CurveClass cls, int grid);

/// Full Frenet apparatus of an analytic curve on a uniform grid of
/// curve.samples points in (pseudo) arc length.
FrenetApparatus frenet_apparatus(const CurveSpec& curve, CurveClass cls);

inline FrenetApparatus frenet_apparatus(const CurveSpec& curve) {
    return frenet_apparatus(curve, classify_curve(curve, curve.samples));
}

/// Curve sampled on a uniform parameter grid (CSV header `t,x,y,z`, or
/// `s,x,y,z` for already unit-parametrized data).
struct SampledCurve {
    std::vector<double> t;
    std::vector<Vec3> p;
};

SampledCurve read_curve_csv(std::istream& in);
SampledCurve load_curve_csv(const std::string& path);

/// Apparatus from samples: derivatives by 4th-order finite differences,
/// reparametrized first unless the data is already unit-speed.
FrenetApparatus frenet_from_samples(const SampledCurve& c);

/// Header `s,Tx,Ty,Tz,Nx,Ny,Nz,Bx,By,Bz,kappa,tau`.
void write_apparatus_csv(const FrenetApparatus& a, std::ostream& out);

/// Largest entrywise |gram - expected| over all samples.
double max_gram_deviation(const FrenetApparatus& a);

/// Largest relative residual of the class's frame system, with frame
/// derivatives taken by 4th-order finite differences at interior samples.
double frenet_closure_residual(const FrenetApparatus& a);

/// Right-hand side of the class's frame system: derivatives of T, N, B as
/// combinations of the frame with coefficients kappa, tau (unit entries for
/// the two null-frame classes).
void frenet_matrix_action(CurveClass cls, double kappa, double tau, const Vec3& T,
                          const Vec3& N, const Vec3& B, Vec3& dT, Vec3& dN, Vec3& dB);

}  // namespace helixlab
