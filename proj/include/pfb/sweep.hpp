#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pfb/config.hpp"

namespace pfb {

struct SweepRow {
    double epsilon = 0.0;
    double positivity = 0.0;
    double vol_gap = 0.0;
    double lambda_mean = 0.0;
    double lambda_std = 0.0;
    double energy = 0.0;
    int iters = 0;
    bool converged = false;
    bool attained = false;
    double perimeter = 0.0;
};

struct SweepReport {
    std::vector<SweepRow> rows;  ///< ordered by descending epsilon
    std::optional<double> epsilon_attained;
};

/// One independent deterministic solve per epsilon (largest first). When the
/// config names an output_dir, each run's field dump and CSV reports persist
/// under output_dir/eps_<value>/ and the sweep table under output_dir.
SweepReport run_epsilon_sweep(const RunConfig& config);

/// Header exactly: epsilon,positivity,vol_gap,lambda_mean,lambda_std,energy,iters,converged
std::string sweep_csv(const SweepReport& report);

/// Solves one problem instance (the given epsilon) and returns the Solution.
Solution solve_instance(const RunConfig& config, double epsilon);
Solution solve_instance(const RunConfig& config, double epsilon, const Problem& prob,
                        const ScalarField* warm_start);

/// Writes field.txt, trace.csv, fb.csv, density.csv, summary.csv for a run.
void persist_run(const std::string& dir, const Solution& sol);

/// Default attainment tolerance: two lattice layers along the free boundary.
double auto_vol_tol(const GridDomain& domain, double perimeter);

}  // namespace pfb
