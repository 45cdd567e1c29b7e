#pragma once

#include <vector>

#include "pfb/grid.hpp"

namespace pfb {

/// Penalization parameters: slope epsilon below the target measure alpha,
/// slope 1/epsilon above it.
struct PenaltyParams {
    double epsilon = 0.0;
    double alpha = 0.0;

    /// Throws std::invalid_argument unless 0 < epsilon <= 1 and alpha > 0.
    /// epsilon <= 1 keeps the penalty convex (slope below the kink must not
    /// exceed the slope above it).
    void validate() const;
    /// Additionally requires alpha < measure of the domain.
    void validate(const GridDomain& domain) const;
};

/// F_eps(s): epsilon*(s - alpha) below alpha, (s - alpha)/epsilon at or
/// above. Piecewise linear, zero at s = alpha.
double penalty(double s, const PenaltyParams& params);

struct EnergyBreakdown {
    double dirichlet = 0.0;
    double penalty = 0.0;
    double total = 0.0;
    double positivity = 0.0;
};

/// Sum over cells of |grad u|^p * h^N with the per-cell forward-difference
/// gradient built from the cell's corner values. A cell contributes when its
/// participating corners all carry values.
double dirichlet_p_energy(const ScalarField& u, double p);

/// Exact discrete objective: dirichlet + penalty(positivity).
EnergyBreakdown total_energy(const ScalarField& u, double p, const PenaltyParams& params);

struct ResidualReport {
    ScalarField field;        ///< residual values; zero where not reported
    std::vector<int> nodes;   ///< nodes where the residual is reported
    double max_abs = 0.0;
};

/// Divergence of (|grad u|^2 + eta^2)^((p-2)/2) grad u by the two-point flux
/// scheme with edge-midpoint gradients. Reported only at interior nodes whose
/// full 3x3 stencil carries values and is strictly positive. Reduces to the
/// 5-point Laplacian for p = 2, eta = 0.
ResidualReport p_laplacian_residual(const ScalarField& u, double p, double eta);

}  // namespace pfb
