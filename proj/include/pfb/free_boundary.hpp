#pragma once

#include <array>
#include <utility>
#include <vector>

#include "pfb/solver.hpp"

namespace pfb {

/// Discrete free-boundary extraction and the quantitative estimates attached
/// to it. fb_nodes are interior positive nodes with a nonpositive interior
/// lattice neighbor (contact with zero-data parts of the fixed boundary does
/// not count as free boundary).
struct FreeBoundaryReport {
    std::vector<int> fb_nodes;
    std::vector<std::array<double, 2>> normals;  ///< unit, pointing into {u = 0}
    std::vector<double> flux;                    ///< one-sided |grad u| per fb node
    double lambda_mean = 0.0;
    double lambda_std = 0.0;
    double perimeter = 0.0;  ///< h^(N-1) x count of positive/zero edges

    struct DensityRow {
        double cx, cy, r, ratio;
    };
    std::vector<DensityRow> density_table;
    std::vector<std::pair<int, double>> density_skipped;  ///< (node, r) outside pre
};

/// fb_nodes, normals (3x3 smoothed-indicator gradient), perimeter.
/// All-positive or all-zero fields give an empty report.
FreeBoundaryReport extract_free_boundary(const ScalarField& u);

/// Adds per-node flux (2-node one-sided stencil along the estimated normal)
/// and lambda statistics over fb nodes at lattice distance >= 2 from the
/// fixed boundary. Throws std::runtime_error when the free boundary is empty.
FreeBoundaryReport estimate_lambda(const ScalarField& u);

/// Node-counted ratio of positive to total nodes in lattice balls centered
/// at fb nodes. Radii outside [4h, dist(node, boundary)] are recorded as
/// skipped rows.
FreeBoundaryReport density_ratios(const ScalarField& u, const std::vector<double>& radii);

/// Over positive interior nodes at distance >= margin*h from the fixed
/// boundary: extremes of u / dist(nearest nonpositive node).
/// Throws std::runtime_error when no node qualifies.
std::pair<double, double> linear_growth_check(const ScalarField& u, int margin);

struct GradientFit {
    double C = 0.0;
    double gamma = 0.0;
    bool degenerate = false;  ///< m(r) never exceeds lambda: exact-cone case
    std::vector<std::pair<double, double>> curve;  ///< (r, m(r))
};

/// Least-squares fit of log(m(r)/lambda - 1) against log r, where m(r) is
/// the max of |grad u| over balls of radius r around fb nodes.
GradientFit gradient_bound_fit(const ScalarField& u, const std::vector<double>& radii);

struct BlowupSpec {
    double cx = 0.0, cy = 0.0;  ///< free-boundary point x_0
    double rho = 0.0;           ///< rescale radius, >= 4h
    int resolution = 16;        ///< output lattice half-width m
};

/// u_rho(x) = u(x_0 + rho x) / rho, bilinearly interpolated onto the
/// [-1,1]^N lattice with spacing 1/resolution. Throws std::runtime_error if
/// the sampling square leaves the domain.
ScalarField blowup_rescale(const ScalarField& u, const BlowupSpec& spec);

struct PlaneFit {
    double lambda = 0.0;
    double nu_x = 0.0, nu_y = 0.0;
    double sup_dist = 0.0;  ///< sup over the unit ball of |u - profile|
};

/// Best one-plane profile lambda * (x . nu)^- over the unit ball of a
/// rescaled field, fitted in sup norm by a deterministic angle scan with a
/// convex inner slope search.
PlaneFit plane_profile_fit(const ScalarField& rescaled);

struct SlopeProfile {
    double alpha_est = 0.0;
    std::vector<std::pair<double, double>> residual_curve;  ///< (r, residual)
};

/// Discrete asymptotic slope at the flat part of a half-ball field:
/// alpha_est = inf over dyadic j of sup_{B_{2^-j}^+} u / x_N, and the
/// residual curve r -> sup_{B_r^+} |u - alpha_est x_N| / r.
/// Throws std::runtime_error if fewer than 3 dyadic levels resolve.
SlopeProfile halfplane_slope_profile(const ScalarField& u);

struct FlatnessConfig {
    double radius = 1.0;
    double h = 1.0 / 96;
    double p = 2.0;
    double delta0 = 1.0 / 3.0;         ///< data reduction factor on the cap, in [0, 1]
    double cap_center_angle = 1.5707963267948966;  ///< pi/2
    double cap_halfwidth = 0.39269908169872414;    ///< pi/8
    SolverConfig solver;
};

struct FlatnessResult {
    double gamma_measured = 0.0;
    bool flagged = false;  ///< relaxation hit its cap before stalling
    ScalarField field;
};

/// Solves the p-harmonic problem on the half disk with data x_N outside the
/// cap and delta0 * x_N on the cap (linear interpolation over the outer half
/// of the cap), then returns sup over the inner quarter ball of psi / x_N.
FlatnessResult flatness_decay_check(const FlatnessConfig& config);

/// Bilinear sample of a field at an arbitrary point; ok = false when the
/// containing cell has a corner without a value.
double bilinear_sample(const ScalarField& u, double x, double y, bool& ok);

}  // namespace pfb
