#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pfb/config.hpp"
#include "pfb/free_boundary.hpp"
#include "pfb/io.hpp"
#include "pfb/oracles.hpp"
#include "pfb/solver.hpp"

using namespace pfb;

namespace {

Problem interval_problem(int nodes) {
    RunConfig cfg = parse_config_text("problem = interval_1d\ngrid.nx = " +
                                      std::to_string(nodes) + "\n");
    return build_problem(cfg);
}

}  // namespace

TEST_CASE("truncate_negative") {
    auto g = build_rectangle(10, 10, 0.1);
    ScalarField u(g, 0.5);
    CHECK(truncate_negative(u).data == u.data);

    ScalarField v = u;
    const int node = g->interior_list[3];
    v[node] = -0.2;
    PenaltyParams params{0.1, 0.3};
    const double before = total_energy(v, 2.0, params).total;
    const ScalarField w = truncate_negative(v);
    CHECK(w[node] == 0.0);
    CHECK(total_energy(w, 2.0, params).total <= before);

    ScalarField all_neg(g, 0.0);
    for (int n : g->interior_list) all_neg[n] = -1.0;
    const ScalarField z = truncate_negative(all_neg);
    for (int n : g->interior_list) CHECK(z[n] == 0.0);
}

TEST_CASE("relaxation fixes linear fields for every p") {
    auto g = build_rectangle(16, 16, 1.0 / 16);
    ScalarField u(g, 0.0);
    for (int j = 0; j < 16; ++j)
        for (int i = 0; i < 16; ++i) u.at(i, j) = 0.3 * i + 0.7 * j + 0.1;
    for (double p : {1.5, 2.0, 3.0}) {
        SolverConfig cfg;
        cfg.p = p;
        cfg.eta = 1e-9;
        cfg.relax_iters = 50;
        const ScalarField v = p_harmonic_relax(u, g->interior_list, cfg);
        double drift = 0.0;
        for (int node : g->interior_list) drift = std::max(drift, std::abs(v[node] - u[node]));
        CHECK(drift < 1e-8);
    }
}

TEST_CASE("p = 2 nodal update is the 5-point average") {
    auto g = build_rectangle(8, 8, 0.125);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    ScalarField u(g, 0.0);
    for (int node = 0; node < g->node_count(); ++node) u[node] = unif(rng);

    SolverConfig cfg;
    cfg.relax_iters = 1;
    const int node = g->idx(4, 4);
    const ScalarField v = p_harmonic_relax(u, {node}, cfg);
    const double avg =
        0.25 * (u.at(5, 4) + u.at(3, 4) + u.at(4, 5) + u.at(4, 3));
    CHECK(v[node] == doctest::Approx(avg).epsilon(1e-14));
    CHECK_THROWS_AS(p_harmonic_relax(u, {g->boundary_list.front()}, cfg),
                    std::invalid_argument);
}

TEST_CASE("relaxation reproduces radial profiles on the annulus") {
    for (double p : {2.0, 3.0}) {
        auto g = build_annulus(1.0, 2.0, 1.0 / 16);
        ScalarField u(g, 0.0);
        for (int node : g->boundary_list) {
            const double r = std::hypot(g->pos_x(node % g->nx), g->pos_y(node / g->nx));
            u[node] = (r <= 1.0) ? 1.0 : 0.0;
        }
        SolverConfig cfg;
        cfg.p = p;
        cfg.eta = 1e-8;
        cfg.relax_iters = 20000;
        const ScalarField v = p_harmonic_relax(u, g->interior_list, cfg);
        const auto prof = radial_p_harmonic(1.0, 2.0, 1.0, 0.0, p, 2);
        double sup = 0.0;
        for (int node : g->interior_list) {
            const double r = std::hypot(g->pos_x(node % g->nx), g->pos_y(node / g->nx));
            sup = std::max(sup, std::abs(v[node] - prof.value(r)));
        }
        CHECK(sup < 5.0 * g->h);
    }
}

TEST_CASE("relaxation never raises the dirichlet energy") {
    auto g = build_rectangle(20, 20, 0.05);
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> unif(0.0, 2.0);
    for (double p : {1.5, 2.0, 3.0}) {
        ScalarField u(g, 0.0);
        for (int node = 0; node < g->node_count(); ++node) u[node] = unif(rng);
        SolverConfig cfg;
        cfg.p = p;
        cfg.relax_iters = 7;
        const double before = dirichlet_p_energy(u, p);
        const ScalarField v = p_harmonic_relax(u, g->interior_list, cfg);
        CHECK(dirichlet_p_energy(v, p) <= before * (1.0 + 1e-13));
    }
}

TEST_CASE("harmonic replacement: minimality and drop identity") {
    auto g = build_rectangle(32, 32, 1.0 / 32);
    SolverConfig cfg;
    cfg.relax_iters = 20000;

    // Harmonic background: replacement is a no-op.
    ScalarField lin(g, 0.0);
    for (int j = 0; j < 32; ++j)
        for (int i = 0; i < 32; ++i) lin.at(i, j) = 1.0 + 0.5 * g->pos_x(i);
    std::vector<int> ball;
    for (int node : g->interior_list) {
        const double x = g->pos_x(node % g->nx) - 0.5, y = g->pos_y(node / g->nx) - 0.5;
        if (x * x + y * y <= 0.3 * 0.3) ball.push_back(node);
    }
    auto [same, drop0] = harmonic_replacement(lin, ball, cfg);
    CHECK(drop0 < 1e-10);
    double drift = 0.0;
    for (int node : ball) drift = std::max(drift, std::abs(same[node] - lin[node]));
    CHECK(drift < 1e-7);

    // Bump over the background: for p = 2 the drop equals the Dirichlet
    // energy of the harmonic deficit exactly.
    ScalarField bump = lin;
    for (int node : ball) {
        const double x = g->pos_x(node % g->nx) - 0.5, y = g->pos_y(node / g->nx) - 0.5;
        bump[node] += std::exp(-(x * x + y * y) / 0.01);
    }
    auto [v, drop] = harmonic_replacement(bump, ball, cfg);
    CHECK(drop > 1e-3);
    ScalarField w = bump;
    for (std::size_t k = 0; k < w.data.size(); ++k) w.data[k] -= v.data[k];
    CHECK(drop == doctest::Approx(dirichlet_p_energy(w, 2.0)).epsilon(1e-6));

    // Empty ball: identity with zero drop.
    auto [id, dz] = harmonic_replacement(bump, {}, cfg);
    CHECK(dz == 0.0);
    CHECK(id.data == bump.data);
}

TEST_CASE("toggle sweep directions") {
    // Oversized support with dominant 1/eps slope: zero-moves fire.
    auto prob = interval_problem(128);
    const double h = prob.domain->h;
    ScalarField u = make_admissible(prob.bdata, 0.0);
    for (int node : prob.domain->interior_list) {
        const double x = prob.domain->pos_x(node % prob.domain->nx);
        u[node] = std::max(1.0 - x, 0.0);  // support everywhere
    }
    SolverConfig cfg;
    PenaltyParams params{0.01, 0.5};
    auto [shrunk, changed] = toggle_sweep(u, 2.0, params, cfg);
    CHECK(changed > 0);
    CHECK(positivity_measure(shrunk) < positivity_measure(u));

    // Undersized support with negligible eps slope: free-moves fire.
    ScalarField tight = make_admissible(prob.bdata, 0.0);
    for (int node : prob.domain->interior_list) {
        const double x = prob.domain->pos_x(node % prob.domain->nx);
        tight[node] = std::max(1.0 - x / 0.25, 0.0);
    }
    PenaltyParams loose{1.0, 0.5};
    auto [grown, freed] = toggle_sweep(tight, 2.0, loose, cfg);
    CHECK(freed > 0);
    CHECK(positivity_measure(grown) > positivity_measure(tight));
    (void)h;
}

TEST_CASE("solve_penalized matches the 1D oracle") {
    auto prob = interval_problem(256);
    const double h = prob.domain->h;
    SolverConfig cfg;

    SUBCASE("eps = 0.1: volume attained, lambda near b/alpha") {
        const Solution sol =
            solve_penalized(prob.domain, prob.bdata, 2.0, {0.1, 0.5}, cfg);
        CHECK(sol.converged);
        CHECK(std::abs(sol.breakdown.positivity - 0.5) <= 2.0 * h);
        const FreeBoundaryReport rep = estimate_lambda(sol.field);
        CHECK(rep.lambda_mean == doctest::Approx(2.0).epsilon(10.0 * h));
        // Dirichlet total approaches the oracle value with O(h) error.
        const auto oracle = oracle_1d_minimizer(1.0, 2.0, 0.1, 0.5);
        CHECK(std::abs(sol.breakdown.total - oracle.energy) < 0.05);
        // Exact zero toggles on the converged minimizer.
        auto [same, changed] = toggle_sweep(sol.field, 2.0, {0.1, 0.5}, cfg);
        CHECK(changed == 0);
        // Positivity near the contact segment.
        for (int node : prob.domain->interior_list)
            if (prob.domain->dist_to_boundary(node) <= 2.0 * h &&
                prob.domain->pos_x(node % prob.domain->nx) < 0.1)
                CHECK(sol.field[node] > 0.0);
    }

    SUBCASE("eps = 0.36: overshoot to s* = 0.6") {
        const Solution sol =
            solve_penalized(prob.domain, prob.bdata, 2.0, {0.36, 0.5}, cfg);
        CHECK(std::abs(sol.breakdown.positivity - 0.6) <= 2.0 * h);
    }

    SUBCASE("trace is monotone and the field admissible") {
        const Solution sol =
            solve_penalized(prob.domain, prob.bdata, 2.0, {0.36, 0.5}, cfg);
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& row : sol.trace) {
            CHECK(row.energy.total <= prev);
            prev = row.energy.total;
        }
        for (int node = 0; node < prob.domain->node_count(); ++node)
            if (prob.domain->in_closure(node)) CHECK(sol.field[node] >= 0.0);
        for (int node : prob.domain->boundary_list)
            CHECK(sol.field[node] == prob.bdata.values[node]);
    }

    SUBCASE("identical inputs and seed give bit-identical solutions") {
        const Solution a = solve_penalized(prob.domain, prob.bdata, 2.0, {0.1, 0.5}, cfg);
        const Solution b = solve_penalized(prob.domain, prob.bdata, 2.0, {0.1, 0.5}, cfg);
        CHECK(a.field.data == b.field.data);
        CHECK(trace_csv(a.trace) == trace_csv(b.trace));
    }

    SUBCASE("iteration cap flags non-convergence") {
        SolverConfig tiny = cfg;
        tiny.max_outer = 1;
        tiny.relax_iters = 4;
        const Solution sol =
            solve_penalized(prob.domain, prob.bdata, 2.0, {0.1, 0.5}, tiny);
        CHECK_FALSE(sol.converged);
        CHECK(std::isfinite(sol.breakdown.total));
    }
}

TEST_CASE("solve_penalized reproduces the annulus oracle at coarse resolution") {
    RunConfig cfg = parse_config_text(
        "problem = annulus_2d\ngrid.h = 0.0625\nepsilon_list = 0.2\n");
    const Problem prob = build_problem(cfg);
    const Solution sol =
        solve_penalized(prob.domain, prob.bdata, 2.0, {0.2, 0.5}, cfg.solver);
    CHECK(sol.converged);
    const auto oracle = oracle_annulus_minimizer(1.0, 1.0, 2.0, 2, 0.2);
    const GridDomain& g = *prob.domain;
    double sup = 0.0, rmax = 0.0;
    for (int node : g.interior_list) {
        const double r = std::hypot(g.pos_x(node % g.nx), g.pos_y(node / g.nx));
        double want = 0.0;
        if (r <= 1.0)
            want = 1.0;
        else if (r < oracle.R_star)
            want = oracle.profile.value(r);
        sup = std::max(sup, std::abs(sol.field[node] - want));
        if (sol.field[node] > 0.0) rmax = std::max(rmax, r);
    }
    CHECK(sup <= 5.0 * g.h);
    CHECK(std::abs(rmax - oracle.R_star) <= 3.0 * g.h);
}
