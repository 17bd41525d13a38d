#pragma once

#include <vector>

namespace helixlab {

/// Finite-difference weights for the m-th derivative at x0 from the given
/// nodes (Fornberg's recursion). Works for any node layout; here it is used
/// on 7-point uniform windows, giving accuracy >= 4 for orders 1..3.
std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int order);

/// Derivative of `values` (uniform spacing h) at every node: centered
/// 7-point stencils inside, shifted one-sided windows at the boundaries.
std::vector<double> fd_derive(const std::vector<double>& values, double h, int order);

/// Same, but the stencil nodes are `stride` samples apart, so the effective
/// step is stride*h. Values are still produced at every node (off-node
/// evaluation points get their own Fornberg weights).
std::vector<double> fd_derive_strided(const std::vector<double>& values, double h,
                                      int order, int stride);

/// Strided derivative with the stride chosen to balance truncation against
/// rounding amplification (effective step near 5e-3 in the units of h).
/// High-order derivatives of densely sampled data lose most digits to
/// rounding at the raw spacing: the error of an order-m stencil scales like
/// eps/h^m.
std::vector<double> fd_derive_auto(const std::vector<double>& values, double h, int order);

/// Cumulative integral on a uniform grid, 4th order (Adams-type weights),
/// out[0] = 0.
std::vector<double> cumulative_integral(const std::vector<double>& values, double h);

}  // namespace helixlab
