"""Smoke tests for the pfb python bindings."""

import math

import pytest

pfb = pytest.importorskip("pfb")


def test_grid_and_measure():
    dom = pfb.build_rectangle(64, 64, 1.0 / 64)
    assert dom.nx == 64 and dom.ny == 64
    assert dom.interior_count == 62 * 62
    assert math.isclose(dom.measure(), 1.0, rel_tol=1e-14)

    ring = pfb.build_annulus(1.0, 2.0, 0.1)
    assert ring.interior_count > 0


def test_penalty_and_energy():
    params = pfb.PenaltyParams(0.1, 0.5)
    assert math.isclose(pfb.penalty(0.4, params), -0.01, rel_tol=1e-12)
    assert math.isclose(pfb.penalty(0.6, params), 1.0, rel_tol=1e-12)

    dom = pfb.build_rectangle(32, 32, 1.0 / 32)
    field = pfb.ScalarField(dom, 1.0)
    assert pfb.dirichlet_p_energy(field, 2.0) == 0.0
    breakdown = pfb.total_energy(field, 2.0, params)
    assert math.isclose(breakdown.total, breakdown.dirichlet + breakdown.penalty)


def test_oracles():
    res = pfb.oracle_1d_minimizer(1.0, 2.0, 0.1, 0.5)
    assert res.s_star == 0.5
    assert res.branch == "at_kink"
    assert math.isclose(res.energy, 2.0, rel_tol=1e-12)

    over = pfb.oracle_1d_minimizer(1.0, 2.0, 0.36, 0.5)
    assert math.isclose(over.s_star, 0.6, rel_tol=1e-5)
    assert over.branch == "above_alpha"

    ann = pfb.oracle_annulus_minimizer(1.0, 1.0, 2.0, 2, 0.05)
    assert math.isclose(ann.R_star, 1.204, rel_tol=2e-3)
    assert ann.profile_value(1.0) == pytest.approx(1.0)


def test_solve_1d_attains_the_volume():
    dom = pfb.build_rectangle(128, 1, 1.0 / 128)
    bdata = pfb.uniform_boundary(dom, {"left": 1.0, "right": 0.0}, "left", 1.0)
    sol = pfb.solve_penalized(dom, bdata, 2.0, pfb.PenaltyParams(0.1, 0.5))
    assert sol.converged
    assert abs(sol.breakdown.positivity - 0.5) <= 2.0 / 128
    totals = sol.trace_totals
    assert all(b <= a + 1e-15 for a, b in zip(totals, totals[1:]))

    rep = pfb.estimate_lambda(sol.field)
    assert rep.lambda_mean == pytest.approx(2.0, rel=0.1)

    arr = sol.field.to_numpy()
    assert arr.shape == (1, 128)
    assert arr.min() >= 0.0


def test_config_and_sweep():
    cfg = pfb.parse_config_text(
        "problem = interval_1d\ngrid.nx = 64\nepsilon_list = 0.36 0.1\n"
    )
    report = pfb.run_epsilon_sweep(cfg)
    rows = report["rows"]
    assert [row["epsilon"] for row in rows] == [0.36, 0.1]
    assert rows[1]["attained"]
    assert not rows[0]["attained"]
    assert report["epsilon_attained"] == 0.1
