#pragma once

#include <optional>

#include "helixlab/curve.hpp"
#include "helixlab/frenet.hpp"
#include "helixlab/slant.hpp"

namespace helixlab {

struct Frame {
    Vec3 T, N, B;
};

/// Canonical frame satisfying the class's Gram matrix exactly.
Frame initial_frame(CurveClass cls);

struct SynthRequest {
    CurveClass cls = CurveClass::Timelike;
    ScalarField kappa = ScalarField::from_constant(1.0);  // ignored for the null classes
    ScalarField tau = ScalarField::from_constant(1.0);
    Interval s_range;
    double step = 1e-3;
    std::optional<Frame> start_frame;  // must satisfy the class Gram to 1e-10
    Vec3 start_point;
};

struct SynthResult {
    std::vector<double> s;
    std::vector<Vec3> position;
    FrenetApparatus apparatus;  // propagated frames, source = synthesized
    double max_gram_drift = 0.0;
    double step_used = 0.0;
};

/// One fixed-step 4th-order pass over the frame system plus alpha' = T;
/// no step control. Exposed for convergence studies.
SynthResult integrate_frenet_system(const SynthRequest& req);

/// Integrates the request, halving the step and restarting whenever the
/// frame Gram drifts beyond 1e-9; throws StepUnderflow when the step falls
/// below 1e-12 of the range.
SynthResult synth_curve(const SynthRequest& req);

/// Torsion profile that makes the branch's sigma function equal to
/// sigma_const: integrates (tau/kappa)' = sigma_const * disc^(3/2) / kappa^2
/// with 4th-order steps from tau_0 at the range start. The returned table
/// is spaced at step/2 so a synthesis at `step` hits its nodes exactly.
/// Throws BranchExit when the discriminant decays below 1e-9 before the
/// end of the range.
ScalarField generate_slant_torsion(double sigma_const, const ScalarField& kappa,
                                   double tau_0, Interval s_range, SigmaBranch branch,
                                   double step);

void write_curve_csv(const SynthResult& r, std::ostream& out);

}  // namespace helixlab
