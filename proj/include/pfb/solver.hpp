#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pfb/energy.hpp"
#include "pfb/grid.hpp"

namespace pfb {

struct SolverConfig {
    double p = 2.0;
    double eta = 0.0;        ///< gradient regularization; 0 = auto (1e-10 * max phi_0 / h)
    int max_outer = 500;     ///< outer iteration cap
    int relax_iters = 2000;  ///< sweep cap per relaxation phase
    double tol_energy = 1e-9;
    int toggle_passes = 3;
    std::uint64_t seed = 1;

    void validate() const;
};

struct TraceRow {
    int iter = 0;
    EnergyBreakdown energy;
    int toggles = 0;  ///< accepted boundary moves in this outer step
};

struct Solution {
    ScalarField field;
    EnergyBreakdown breakdown;
    std::vector<TraceRow> trace;
    double lipschitz_estimate = 0.0;
    bool converged = false;
    double p = 2.0;
    PenaltyParams params;
};

/// Pointwise max(u, 0) on interior nodes; boundary values untouched.
ScalarField truncate_negative(const ScalarField& u);

/// Nodewise minimization sweeps of the local discrete p-energy over the
/// active set (safeguarded 1D Newton per node, golden-section fallback).
/// Values outside the active set and on the boundary are unchanged; the
/// discrete Dirichlet energy does not increase.
ScalarField p_harmonic_relax(const ScalarField& u, const std::vector<int>& active,
                             const SolverConfig& config);

/// Replaces u on the ball by the relaxed p-harmonic extension of its boundary
/// values; returns the new field and the (nonnegative) Dirichlet energy drop.
std::pair<ScalarField, double> harmonic_replacement(const ScalarField& u,
                                                    const std::vector<int>& ball,
                                                    const SolverConfig& config);

/// One seed-shuffled pass over the free-boundary band: positive nodes are
/// tentatively zeroed, zero nodes adjacent to positivity are tentatively
/// freed at their local one-node optimum; a move is kept iff the exact total
/// energy strictly decreases. Returns the new field and the accepted count.
std::pair<ScalarField, int> toggle_sweep(const ScalarField& u, double p,
                                         const PenaltyParams& params,
                                         const SolverConfig& config);

/// Minimizes J_eps over the discrete admissible class: p-harmonic extension
/// of phi_0 (or the given warm start), then alternating truncation,
/// relaxation on {u > 0}, and exact-energy free-boundary moves (single-node
/// toggles, whole-layer retreat/advance steps, and measure-preserving
/// exchanges, each evaluated after re-relaxation and reverted unless the
/// energy strictly drops) until no move is accepted and the relative energy
/// decrease falls below tol_energy.
Solution solve_penalized(const DomainPtr& domain, const BoundaryData& bdata, double p,
                         const PenaltyParams& params, const SolverConfig& config,
                         const ScalarField* warm_start = nullptr);

}  // namespace pfb
