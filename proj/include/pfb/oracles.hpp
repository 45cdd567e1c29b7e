#pragma once

#include <utility>
#include <vector>

#include "pfb/energy.hpp"

namespace pfb {

enum class OracleBranch { below_alpha, at_kink, above_alpha };

const char* to_string(OracleBranch b);

/// Ground truth for the 1D penalized problem on the unit interval with datum
/// b at the left end: the minimizer over ramps u(x) = b (1 - x/s)^+ of
/// E(s) = b^p s^(1-p) + F_eps(s).
struct Oracle1DResult {
    double s_star = 0.0;       ///< optimal positivity length
    double lambda_star = 0.0;  ///< slope b / s_star
    double energy = 0.0;       ///< E(s_star), recomputed exactly
    OracleBranch branch = OracleBranch::at_kink;
};

/// Brute-force scan over s_grid points in (0, 1], refined by ternary search
/// on the winning cell; the kink s = alpha is always evaluated exactly.
/// Ties resolve to the smallest s.
Oracle1DResult oracle_1d_minimizer(double b, double p, double epsilon, double alpha,
                                   int s_grid = 4096);

/// Scan curve (s, E(s)) for plotting.
std::vector<std::pair<double, double>> oracle_1d_scan(double b, double p, double epsilon,
                                                      double alpha, int s_grid = 256);

/// Radial p-harmonic profile a + b r^((p-N)/(p-1)), or a + b log r when
/// p == N, pinned to prescribed endpoint values.
struct RadialProfile {
    double inner_r = 0.0, outer_r = 0.0;
    double inner_val = 0.0, outer_val = 0.0;
    double p = 2.0;
    int N = 2;
    double coef_a = 0.0, coef_b = 0.0;
    bool log_branch = false;

    double value(double r) const;
    double slope(double r) const;
};

RadialProfile radial_p_harmonic(double inner_r, double outer_r, double inner_val,
                                double outer_val, double p, int N);

/// Closed-form Dirichlet p-energy of the profile over its annulus
/// (weight 2*pi*r for N = 2, weight 1 for N = 1).
double radial_dirichlet_energy(const RadialProfile& profile);

struct AnnulusOracleResult {
    double R_star = 0.0;
    RadialProfile profile;
    double energy = 0.0;
};

/// Radial minimizer of the auxiliary annulus functional: for each support
/// radius R in (delta, 2 delta], Dirichlet energy of the radial p-harmonic
/// profile on (delta, R) with values (c0, 0) plus (1/eps) * volume of the
/// shell, scanned and refined. Ties resolve to the smallest R.
AnnulusOracleResult oracle_annulus_minimizer(double delta, double c0, double p, int N,
                                             double epsilon, int R_grid = 2048);

/// Scan curve (R, objective) for plotting.
std::vector<std::pair<double, double>> oracle_annulus_scan(double delta, double c0,
                                                           double p, int N,
                                                           double epsilon,
                                                           int R_grid = 256);

}  // namespace pfb
