#pragma once

#include <string>
#include <vector>

#include "pfb/oracles.hpp"
#include "pfb/sweep.hpp"

namespace pfb {

struct CheckResult {
    std::string name;
    bool pass = false;
    bool errored = false;
    std::string measured;  ///< human-readable numbers backing the verdict
};

/// Randomized harmonic-replacement trials on a square: measured ratio of the
/// energy drop to the p-form (p >= 2) or the mixed form (p < 2) of the
/// difference-field energy. Returns the minimum ratio over trials.
double replacement_trials(double p, int trials, std::uint64_t seed);

/// Nondegeneracy on sampled fb-centered balls: both sides of the integral
/// inequality with q = p, gamma = 1; returns the minimal measured constant.
double nondegeneracy_constant(const Solution& sol, double radius, int max_samples);

/// Runs the named checks (all known checks when `checks` is empty is NOT
/// implied: an empty list runs nothing and passes). Unknown names error that
/// check and continue.
std::vector<CheckResult> run_verification_suite(const RunConfig& config,
                                                const std::vector<std::string>& checks);

/// CSV: check,pass,errored,measured
std::string verification_csv(const std::vector<CheckResult>& results);

/// Names accepted by run_verification_suite.
const std::vector<std::string>& known_checks();

}  // namespace pfb
