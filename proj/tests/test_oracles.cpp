#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pfb/energy.hpp"
#include "pfb/oracles.hpp"

using namespace pfb;

TEST_CASE("1D oracle: kink attainment at eps = 0.1") {
    const auto res = oracle_1d_minimizer(1.0, 2.0, 0.1, 0.5);
    CHECK(res.s_star == 0.5);
    CHECK(res.lambda_star == doctest::Approx(2.0));
    CHECK(res.energy == doctest::Approx(2.0));
    CHECK(res.branch == OracleBranch::at_kink);
}

TEST_CASE("1D oracle: interior optimum above the kink at eps = 0.36") {
    const auto res = oracle_1d_minimizer(1.0, 2.0, 0.36, 0.5);
    CHECK(res.s_star == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(res.branch == OracleBranch::above_alpha);
    // Stationarity on the steep branch: (p-1) b^p s^{-p} = 1/eps.
    CHECK(1.0 / (res.s_star * res.s_star) == doctest::Approx(1.0 / 0.36).epsilon(1e-5));
}

TEST_CASE("1D oracle: constraint attained for all small eps") {
    for (double eps : {0.25, 0.2, 0.1, 0.05, 0.01}) {
        const auto res = oracle_1d_minimizer(1.0, 2.0, eps, 0.5);
        CHECK(res.branch == OracleBranch::at_kink);
        CHECK(res.s_star == 0.5);
    }
}

TEST_CASE("1D oracle: kink bracket across p") {
    for (double p : {1.5, 2.0, 3.0}) {
        const double b = 1.0, alpha = 0.5;
        const double G = (p - 1.0) * std::pow(b / alpha, p);
        const double edge = std::min(G, 1.0 / G);
        for (double f : {0.5, 0.8, 0.95, 1.05, 1.3, 2.0}) {
            const double eps = f * edge;
            if (eps > 1.0 || eps <= 0.0) continue;
            const auto res = oracle_1d_minimizer(b, p, eps, alpha);
            if (f <= 0.95) CHECK(res.branch == OracleBranch::at_kink);
            if (f >= 1.05) CHECK(res.branch != OracleBranch::at_kink);
        }
    }
}

TEST_CASE("1D oracle invariants") {
    for (double eps : {0.9, 0.5, 0.3, 0.12, 0.04}) {
        const auto res = oracle_1d_minimizer(1.3, 2.5, eps, 0.4);
        CHECK(res.s_star > 0.0);
        CHECK(res.s_star <= 1.0);
        const double expect = std::pow(1.3, 2.5) * std::pow(res.s_star, -1.5) +
                              penalty(res.s_star, {eps, 0.4});
        CHECK(res.energy == doctest::Approx(expect).epsilon(1e-14));
        CHECK(res.lambda_star == doctest::Approx(1.3 / res.s_star).epsilon(1e-14));
        // Scan minimality against a fine independent grid.
        for (int k = 1; k <= 500; ++k) {
            const double s = k / 500.0;
            const double e =
                std::pow(1.3, 2.5) * std::pow(s, -1.5) + penalty(s, {eps, 0.4});
            CHECK(res.energy <= e + 1e-10);
        }
    }
}

TEST_CASE("radial p-harmonic closed forms") {
    // p = N = 2: logarithmic profile.
    const auto log_prof = radial_p_harmonic(1.0, 2.0, 1.0, 0.0, 2.0, 2);
    CHECK(log_prof.log_branch);
    CHECK(log_prof.value(std::sqrt(2.0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(log_prof.value(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(log_prof.value(2.0) == doctest::Approx(0.0).epsilon(1e-12));

    // p = 3, N = 2: exponent (p-N)/(p-1) = 1/2.
    const auto p3 = radial_p_harmonic(1.0, 2.0, 1.0, 0.0, 3.0, 2);
    CHECK_FALSE(p3.log_branch);
    const double r = 1.21;
    const double expect = (std::sqrt(2.0) - std::sqrt(r)) / (std::sqrt(2.0) - 1.0);
    CHECK(p3.value(r) == doctest::Approx(expect).epsilon(1e-12));

    // Constants are p-harmonic.
    const auto c = radial_p_harmonic(1.0, 2.0, 0.7, 0.7, 2.5, 2);
    CHECK(c.value(1.5) == doctest::Approx(0.7).epsilon(1e-12));

    // N = 1 gives the linear interpolant for every p.
    const auto lin = radial_p_harmonic(1.0, 3.0, 2.0, 0.0, 2.7, 1);
    CHECK(lin.value(2.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("radial dirichlet energy matches quadrature") {
    for (double p : {1.5, 2.0, 3.0}) {
        const auto prof = radial_p_harmonic(1.0, 1.8, 1.0, 0.0, p, 2);
        const double closed = radial_dirichlet_energy(prof);
        // Trapezoid quadrature of |u'|^p 2 pi r dr.
        const int n = 40000;
        double quad = 0.0;
        for (int k = 0; k < n; ++k) {
            const double r0 = 1.0 + 0.8 * k / n, r1 = 1.0 + 0.8 * (k + 1) / n;
            auto f = [&](double r) {
                return std::pow(std::abs(prof.slope(r)), p) * 2.0 * M_PI * r;
            };
            quad += 0.5 * (f(r0) + f(r1)) * (r1 - r0);
        }
        CHECK(closed == doctest::Approx(quad).epsilon(1e-6));
    }
}

TEST_CASE("radial profiles kill the discrete residual under refinement") {
    const auto prof = radial_p_harmonic(1.0, 2.0, 1.0, 0.0, 3.0, 2);
    double prev = 0.0;
    double rate = 0.0;
    int level = 0;
    for (double h : {0.05, 0.025}) {
        auto g = build_annulus(1.0, 2.0, h);
        ScalarField u(g, 0.0);
        for (int node = 0; node < g->node_count(); ++node) {
            if (!g->in_closure(node)) continue;
            const double r = std::hypot(g->pos_x(node % g->nx), g->pos_y(node / g->nx));
            u[node] = prof.value(r);  // closed form extends smoothly past the ring
        }
        const ResidualReport rep = p_laplacian_residual(u, 3.0, 0.0);
        if (level > 0) rate = std::log2(prev / rep.max_abs);
        prev = rep.max_abs;
        ++level;
    }
    CHECK(rate > 0.9);
}

TEST_CASE("annulus oracle scan") {
    const auto res = oracle_annulus_minimizer(1.0, 1.0, 2.0, 2, 0.05);
    // Stationarity R log R = sqrt(eps) for p = N = 2, delta = c0 = 1.
    CHECK(res.R_star * std::log(res.R_star) ==
          doctest::Approx(std::sqrt(0.05)).epsilon(1e-5));
    CHECK(res.R_star == doctest::Approx(1.204).epsilon(2e-3));

    // Minimality against a dense independent sample.
    for (int k = 1; k <= 800; ++k) {
        const double R = 1.0 + k / 800.0;
        const auto prof = radial_p_harmonic(1.0, R, 1.0, 0.0, 2.0, 2);
        const double e = radial_dirichlet_energy(prof) + M_PI * (R * R - 1.0) / 0.05;
        CHECK(res.energy <= e + 1e-9);
    }

    // Penalty negligible: the support fills the ring.
    const auto big = oracle_annulus_minimizer(1.0, 1.0, 2.0, 2, 1e6);
    CHECK(big.R_star == doctest::Approx(2.0).epsilon(1e-3));

    // eps -> 0: the support shrinks toward the inner ball.
    const auto tiny = oracle_annulus_minimizer(1.0, 1.0, 2.0, 2, 1e-3);
    CHECK(tiny.R_star < 1.07);
    CHECK(tiny.R_star > 1.0);
}

TEST_CASE("annulus oracle is monotone in eps and radially nonincreasing") {
    double prev = 0.0;
    for (double eps : {0.01, 0.05, 0.2, 0.5, 1.0}) {
        const auto res = oracle_annulus_minimizer(1.0, 1.0, 2.5, 2, eps);
        CHECK(res.R_star >= prev);
        prev = res.R_star;
        double last = res.profile.value(1.0);
        for (int k = 1; k <= 50; ++k) {
            const double r = 1.0 + (res.R_star - 1.0) * k / 50.0;
            CHECK(res.profile.value(r) <= last + 1e-12);
            last = res.profile.value(r);
        }
    }
}
