import math

import numpy as np
import pytest

from imkdv.experiments import (
    EPS_SMALLNESS,
    DriftRow,
    drift_csv,
    drift_sweep,
    gwp_plan,
    iteration_ledger,
    rescaled_norm_check,
)
from imkdv.spectral import field_from_function, make_grid


# --- GWP planner ----------------------------------------------------------------


def test_gwp_plan_arithmetic_s_half():
    plan = gwp_plan(0.5, 100.0, theta=0.5, c_margin=1.0)
    assert plan.N == 22
    assert plan.lam == pytest.approx(math.sqrt(22.0))
    assert plan.steps == 22**3 == 10648
    # the planned N actually satisfies the constraint T N^e <= c
    assert 100.0 * plan.N**plan.exponent <= 1.0 + 1e-12
    assert 100.0 * (plan.N - 1) ** plan.exponent > 1.0
    assert plan.delta == pytest.approx(EPS_SMALLNESS ** (-4.0))


def test_gwp_plan_low_s_branch():
    # s <= 1/4 makes the exponent nonnegative: feasible only for T <= c
    ok = gwp_plan(0.25, 0.5)
    assert ok.feasible and ok.N == 1
    bad = gwp_plan(0.25, 2.0)
    assert not bad.feasible and bad.N is None
    with pytest.raises(ValueError):
        iteration_ledger(bad)


def test_gwp_plan_validation():
    with pytest.raises(ValueError):
        gwp_plan(1.5, 1.0)
    with pytest.raises(ValueError):
        gwp_plan(0.5, -1.0)
    with pytest.raises(ValueError):
        gwp_plan(0.5, 1.0, theta=0.7)


def test_iteration_ledger_arithmetic():
    plan = gwp_plan(0.5, 100.0)
    led = iteration_ledger(plan, drift_constant=1.0, eps=0.1)
    # steps_to_double = eps^2 / (C N^-3 eps^6) = N^3 / eps^4 = 10^4 N^3
    assert led["steps_to_double"] == pytest.approx(1e4 * plan.N**3)
    assert led["margin"] == pytest.approx(1e4)
    assert led["sufficient"]
    # eps = 1 collapses the margin to exactly N^3 / N^3 = 1
    edge = iteration_ledger(plan, drift_constant=1.0, eps=1.0)
    assert edge["steps_to_double"] == pytest.approx(plan.N**3)
    assert edge["margin"] == pytest.approx(1.0)


# --- rescaled norms ----------------------------------------------------------------


def test_rescaled_norm_scaling_laws():
    grid = make_grid(40.0, 256)
    from imkdv.solver import soliton

    phi = soliton(1.0, 20.0, grid)
    out = rescaled_norm_check(phi, 0.5, 22.0, [1.0, 2.0, 4.0, 8.0, 16.0])
    rows = out["rows"]
    # lambda = 1 edge: identical norms to the original
    from imkdv.spectral import l2_norm

    assert rows[0]["l2"] == pytest.approx(l2_norm(phi), rel=1e-12)
    # L2 law ||phi^lam|| = lam^{-1/2} ||phi||
    for row in rows:
        assert row["l2"] == pytest.approx(rows[0]["l2"] / math.sqrt(row["lambda"]), rel=1e-6)
    # ||I phi^lam||_{H^1} decreases monotonically in lambda
    ih1 = [row["ih1"] for row in rows]
    assert all(b < a for a, b in zip(ih1, ih1[1:]))
    assert out["lambda_predicted"] > 0


def test_rescaled_norm_check_validation():
    grid = make_grid(40.0, 256)
    from imkdv.solver import soliton

    phi = soliton(1.0, 20.0, grid)
    with pytest.raises(ValueError):
        rescaled_norm_check(phi, 0.5, 22.0, [4.0, 2.0])
    with pytest.raises(ValueError):
        rescaled_norm_check(phi, 0.5, 22.0, [0.5, 2.0])


# --- drift sweep --------------------------------------------------------------------


def test_drift_row_validation():
    with pytest.raises(ValueError):
        DriftRow(-1.0, 0.0, 0.0, 64, 1e-5, 1.0, 0.5)
    with pytest.raises(ValueError):
        DriftRow(4.0, -1.0, 0.0, 64, 1e-5, 1.0, 0.5)


def test_drift_sweep_validation():
    grid = make_grid(np.pi / 2, 64)
    u = field_from_function(grid, lambda x: 0.1 * np.cos(4 * x))
    with pytest.raises(ValueError):
        drift_sweep(u, 0.5, [8, 4], 0.01, 64, 1e-4)  # not increasing
    with pytest.raises(ValueError):
        drift_sweep(u, 0.5, [4, 8], 0.01, 32, 1e-4)  # wrong K


def test_drift_sweep_short_run_and_csv():
    grid = make_grid(np.pi / 2, 64)
    u = field_from_function(
        grid, lambda x: 0.4 * np.cos(4 * x) + 0.3 * np.cos(8 * x)
    )
    rows, slope = drift_sweep(u, 0.5, [4, 8, 16], 0.002, 64, 1e-4, snapshots=4)
    assert len(rows) == 3
    # E2 improves on E1 at every cutoff even on a short run
    for r in rows:
        assert r.e2_drift <= r.e1_drift
    csv = drift_csv(rows, slope)
    lines = csv.splitlines()
    assert lines[0] == "N,e1_drift,e2_drift,K,dt,T_run,s"
    assert len(lines) == 5
    assert lines[-1].startswith("# fitted_slope=")


def test_drift_sweep_T_doubling_is_controlled():
    # doubling the horizon should not blow up the e2 drift (almost
    # conservation accumulates at worst linearly in T)
    grid = make_grid(np.pi / 2, 64)
    u = field_from_function(
        grid, lambda x: 0.4 * np.cos(4 * x) + 0.3 * np.cos(8 * x)
    )
    rows1, _ = drift_sweep(u, 0.5, [8], 0.002, 64, 1e-4, snapshots=4)
    rows2, _ = drift_sweep(u, 0.5, [8], 0.004, 64, 1e-4, snapshots=8)
    assert rows2[0].e2_drift <= 3.0 * max(rows1[0].e2_drift, 1e-14)
