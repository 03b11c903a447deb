"""Headline studies: almost-conservation drift of the modified energies
versus the cutoff N, rescaled-data norm scaling, and the arithmetic of the
global-iteration schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .functionals import modified_energy_e1, modified_energy_e2, modified_energy_e2_system
from .multiplier import CALIBRATED_CONSTANTS, IMultiplierProfile
from .solver import evolve, rescale
from .spectral import Field, FieldPair, l2_norm, sobolev_norm

EPS_SMALLNESS = 0.1  # rescaled-data smallness target for ||I phi^lam||_{H^1}


@dataclass(frozen=True)
class DriftRow:
    N: float
    e1_drift: float
    e2_drift: float
    K: int
    dt: float
    T_run: float
    s: float

    def __post_init__(self):
        if self.N <= 0 or self.e1_drift < 0 or self.e2_drift < 0:
            raise ValueError("invalid drift row")


@dataclass(frozen=True)
class GwpPlan:
    s: float
    T: float
    theta: float
    c_margin: float
    exponent: float
    feasible: bool
    N: int | None
    lam: float | None
    delta: float | None
    steps: int | None


def _e1_e2(state, profile):
    if isinstance(state, Field):
        return (
            modified_energy_e1(state, profile),
            modified_energy_e2(state, profile),
        )
    e1 = modified_energy_e1(state.u, profile) + modified_energy_e1(state.v, profile)
    return e1, modified_energy_e2_system(state, profile)


def drift_sweep(initial, s: float, N_list, T_run: float, K: int, dt: float,
                snapshots: int = 16, variant: str = "sharp"):
    """Evolve the same data once per cutoff N and record sup-drifts of E1, E2.

    Returns (rows, fitted_slope) with the slope of log e2_drift vs log N.
    """
    N_list = list(N_list)
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ValueError("N_list must be strictly increasing")
    grid = initial.grid if isinstance(initial, Field) else initial.grid
    if grid.K != K:
        raise ValueError("initial data does not live on a K-point grid")
    if K > 64:
        raise ValueError("drift sweep is restricted to K <= 64")
    if any(N <= 0 for N in N_list):
        raise ValueError("cutoffs must be positive")
    every = max(1, round(T_run / dt / snapshots))
    traj = evolve(initial, T_run, dt, snapshot_every=every)
    rows = []
    for N in N_list:
        profile = IMultiplierProfile(N=N, s=s, variant=variant)
        pairs = [_e1_e2(state, profile) for state in traj.states]
        e1_0, e2_0 = pairs[0]
        e1_drift = max(abs(e1 - e1_0) for e1, _ in pairs)
        e2_drift = max(abs(e2 - e2_0) for _, e2 in pairs)
        rows.append(DriftRow(N, e1_drift, e2_drift, K, dt, T_run, s))
    logs = [(math.log(r.N), math.log(max(r.e2_drift, 1e-300))) for r in rows]
    if len(logs) < 2:
        slope = float("nan")
    else:
        slope = float(np.polyfit([p[0] for p in logs], [p[1] for p in logs], 1)[0])
    return rows, slope


def drift_csv(rows, slope) -> str:
    lines = ["N,e1_drift,e2_drift,K,dt,T_run,s"]
    for r in rows:
        lines.append(
            ",".join(
                f"{v:.17g}"
                for v in (r.N, r.e1_drift, r.e2_drift, r.K, r.dt, r.T_run, r.s)
            )
        )
    lines.append(f"# fitted_slope={slope:.17g}")
    return "\n".join(lines) + "\n"


def gwp_plan(s: float, T: float, theta: float = 0.5, c_margin: float = 1.0) -> GwpPlan:
    """Cutoff, scaling parameter, and step count of the global iteration."""
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    if T <= 0 or c_margin <= 0 or not 0 < theta <= 0.5:
        raise ValueError("need T > 0, c_margin > 0, theta in (0, 1/2]")
    e = (3 - 12 * s) / (1 + 2 * s)
    if e >= 0:  # s <= 1/4: the constraint T N^e <= c cannot improve with N
        feasible = T <= c_margin
        if not feasible:
            return GwpPlan(s, T, theta, c_margin, e, False, None, None, None, None)
        N = 1
    else:
        N = max(1, math.ceil((T / c_margin) ** (-1.0 / e)))
    lam = float(N) ** (2 * (1 - s) / (1 + 2 * s))
    delta = EPS_SMALLNESS ** (-2.0 / theta)
    return GwpPlan(s, T, theta, c_margin, e, True, N, lam, delta, N**3)


def rescaled_norm_check(phi: Field, s: float, N: float, lambda_list) -> dict:
    """Norms of the rescaled data phi^lam across lambda_list.

    Rows hold ||phi^lam||_{H^s} and ||I phi^lam||_{H^1}; the report compares
    the first lambda reaching the smallness target with the scaling
    prediction lam ~ (N^{1-s} ||phi||_{H^s} / eps)^{2/(1+2s)}.
    """
    from .functionals import apply_I

    lambda_list = list(lambda_list)
    if any(b <= a for a, b in zip(lambda_list, lambda_list[1:])):
        raise ValueError("lambda_list must be increasing")
    if any(lam < 1 for lam in lambda_list):
        raise ValueError("scaling parameters must be >= 1")
    profile = IMultiplierProfile(N=N, s=s)
    rows = []
    achieved = None
    for lam in lambda_list:
        scaled = rescale(phi, lam)
        hs = sobolev_norm(scaled, s)
        ih1 = sobolev_norm(apply_I(scaled, profile), 1.0)
        rows.append({"lambda": lam, "l2": l2_norm(scaled), "hs": hs, "ih1": ih1})
        if achieved is None and ih1 <= EPS_SMALLNESS:
            achieved = lam
    base_hs = sobolev_norm(phi, s)
    predicted = (N ** (1 - s) * base_hs / EPS_SMALLNESS) ** (2.0 / (1 + 2 * s))
    return {
        "rows": rows,
        "eps": EPS_SMALLNESS,
        "lambda_achieving_eps": achieved,
        "lambda_predicted": predicted,
    }


def iteration_ledger(plan: GwpPlan, drift_constant: float = 1.0,
                     eps: float = EPS_SMALLNESS) -> dict:
    """Arithmetic bookkeeping of the iteration: energy budget eps^2,
    per-step increment C N^-3 eps^6, steps until the budget doubles."""
    if not plan.feasible:
        raise ValueError("plan is infeasible")
    increment = drift_constant * plan.N ** (-3) * eps**6
    steps_to_double = eps**2 / increment
    return {
        "N": plan.N,
        "lambda": plan.lam,
        "eps": eps,
        "drift_constant": drift_constant,
        "budget": eps**2,
        "increment_per_step": increment,
        "steps_to_double": steps_to_double,
        "planned_steps": plan.steps,
        "margin": steps_to_double / plan.steps,
        "sufficient": steps_to_double >= plan.steps,
    }
