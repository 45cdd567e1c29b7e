#include "pfb/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace pfb {

const char* to_string(OracleBranch b) {
    switch (b) {
        case OracleBranch::below_alpha: return "below_alpha";
        case OracleBranch::at_kink: return "at_kink";
        case OracleBranch::above_alpha: return "above_alpha";
    }
    return "?";
}

namespace {

double ramp_energy(double s, double b, double p, const PenaltyParams& params) {
    return std::pow(b, p) * std::pow(s, 1.0 - p) + penalty(s, params);
}

// Ternary search for the minimum of a convex function on [lo, hi].
template <class F>
double ternary_min(F f, double lo, double hi) {
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (f(m1) <= f(m2))
            hi = m2;
        else
            lo = m1;
        if (hi - lo < 1e-14 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

Oracle1DResult oracle_1d_minimizer(double b, double p, double epsilon, double alpha,
                                   int s_grid) {
    if (!(b > 0.0)) throw std::invalid_argument("oracle_1d_minimizer: need b > 0");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("oracle_1d_minimizer: need 0 < alpha < 1");
    if (!(p > 1.0)) throw std::invalid_argument("oracle_1d_minimizer: need p > 1");
    if (s_grid < 8) throw std::invalid_argument("oracle_1d_minimizer: s_grid too small");
    PenaltyParams params{epsilon, alpha};
    params.validate();

    auto E = [&](double s) { return ramp_energy(s, b, p, params); };

    int best_k = 1;
    double best_E = E(1.0 / s_grid);
    for (int k = 2; k <= s_grid; ++k) {
        const double val = E(static_cast<double>(k) / s_grid);
        if (val < best_E) {
            best_E = val;
            best_k = k;
        }
    }
    const double lo = std::max(1e-12, static_cast<double>(best_k - 1) / s_grid);
    const double hi = std::min(1.0, static_cast<double>(best_k + 1) / s_grid);
    double s_star = ternary_min(E, lo, hi);

    // The kink is a minimizer candidate in its own right; prefer it on ties
    // so the at_kink branch is classified exactly.
    if (alpha <= 1.0 && (E(alpha) <= E(s_star) || std::abs(s_star - alpha) < 1e-9))
        if (E(alpha) <= E(s_star) + 1e-13 * (1.0 + std::abs(E(alpha)))) s_star = alpha;

    Oracle1DResult out;
    out.s_star = s_star;
    out.lambda_star = b / s_star;
    out.energy = E(s_star);
    if (s_star == alpha)
        out.branch = OracleBranch::at_kink;
    else
        out.branch = (s_star < alpha) ? OracleBranch::below_alpha : OracleBranch::above_alpha;
    return out;
}

std::vector<std::pair<double, double>> oracle_1d_scan(double b, double p, double epsilon,
                                                      double alpha, int s_grid) {
    PenaltyParams params{epsilon, alpha};
    params.validate();
    std::vector<std::pair<double, double>> curve;
    curve.reserve(s_grid);
    for (int k = 1; k <= s_grid; ++k) {
        const double s = static_cast<double>(k) / s_grid;
        curve.emplace_back(s, ramp_energy(s, b, p, params));
    }
    return curve;
}

RadialProfile radial_p_harmonic(double inner_r, double outer_r, double inner_val,
                                double outer_val, double p, int N) {
    if (!(0.0 < inner_r && inner_r < outer_r))
        throw std::invalid_argument("radial_p_harmonic: need 0 < inner_r < outer_r");
    if (!(p > 1.0)) throw std::invalid_argument("radial_p_harmonic: need p > 1");
    if (N != 1 && N != 2) throw std::invalid_argument("radial_p_harmonic: N must be 1 or 2");

    RadialProfile prof;
    prof.inner_r = inner_r;
    prof.outer_r = outer_r;
    prof.inner_val = inner_val;
    prof.outer_val = outer_val;
    prof.p = p;
    prof.N = N;

    const double kappa = (p - static_cast<double>(N)) / (p - 1.0);
    prof.log_branch = std::abs(kappa) < 1e-13;
    if (prof.log_branch) {
        prof.coef_b = (inner_val - outer_val) / (std::log(inner_r) - std::log(outer_r));
        prof.coef_a = inner_val - prof.coef_b * std::log(inner_r);
    } else {
        const double bi = std::pow(inner_r, kappa), bo = std::pow(outer_r, kappa);
        prof.coef_b = (inner_val - outer_val) / (bi - bo);
        prof.coef_a = inner_val - prof.coef_b * bi;
    }
    return prof;
}

double RadialProfile::value(double r) const {
    if (log_branch) return coef_a + coef_b * std::log(r);
    const double kappa = (p - static_cast<double>(N)) / (p - 1.0);
    return coef_a + coef_b * std::pow(r, kappa);
}

double RadialProfile::slope(double r) const {
    if (log_branch) return coef_b / r;
    const double kappa = (p - static_cast<double>(N)) / (p - 1.0);
    return coef_b * kappa * std::pow(r, kappa - 1.0);
}

double radial_dirichlet_energy(const RadialProfile& prof) {
    const double b = prof.coef_b;
    if (b == 0.0) return 0.0;
    if (prof.N == 1)
        return std::pow(std::abs(prof.slope(prof.inner_r)), prof.p) *
               (prof.outer_r - prof.inner_r);

    const double two_pi = 2.0 * M_PI;
    if (prof.log_branch) {
        // p == N == 2: |u'| = |b|/r, integrand (|b|/r)^2 * 2 pi r.
        return two_pi * b * b * std::log(prof.outer_r / prof.inner_r);
    }
    const double kappa = (prof.p - 2.0) / (prof.p - 1.0);
    const double amp = std::pow(std::abs(b * kappa), prof.p);
    return two_pi * amp *
           (std::pow(prof.outer_r, kappa) - std::pow(prof.inner_r, kappa)) / kappa;
}

namespace {

double annulus_objective(double R, double delta, double c0, double p, int N,
                         double epsilon) {
    const RadialProfile prof = radial_p_harmonic(delta, R, c0, 0.0, p, N);
    const double vol = (N == 2) ? M_PI * (R * R - delta * delta) : (R - delta);
    return radial_dirichlet_energy(prof) + vol / epsilon;
}

}  // namespace

AnnulusOracleResult oracle_annulus_minimizer(double delta, double c0, double p, int N,
                                             double epsilon, int R_grid) {
    if (!(delta > 0.0)) throw std::invalid_argument("oracle_annulus_minimizer: delta > 0");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("oracle_annulus_minimizer: epsilon > 0");
    if (R_grid < 8) throw std::invalid_argument("oracle_annulus_minimizer: R_grid too small");

    auto f = [&](double R) { return annulus_objective(R, delta, c0, p, N, epsilon); };

    int best_k = 1;
    double best = f(delta + delta / R_grid);
    for (int k = 2; k <= R_grid; ++k) {
        const double R = delta + delta * static_cast<double>(k) / R_grid;
        const double val = f(R);
        if (val < best) {
            best = val;
            best_k = k;
        }
    }
    const double lo = delta + delta * std::max(0.5, best_k - 1.0) / R_grid;
    const double hi = delta + delta * std::min<double>(R_grid, best_k + 1.0) / R_grid;
    const double R_star = ternary_min(f, lo, hi);

    AnnulusOracleResult out;
    out.R_star = R_star;
    out.profile = radial_p_harmonic(delta, R_star, c0, 0.0, p, N);
    out.energy = f(R_star);
    return out;
}

std::vector<std::pair<double, double>> oracle_annulus_scan(double delta, double c0,
                                                           double p, int N,
                                                           double epsilon, int R_grid) {
    std::vector<std::pair<double, double>> curve;
    curve.reserve(R_grid);
    for (int k = 1; k <= R_grid; ++k) {
        const double R = delta + delta * static_cast<double>(k) / R_grid;
        curve.emplace_back(R, annulus_objective(R, delta, c0, p, N, epsilon));
    }
    return curve;
}

}  // namespace pfb
