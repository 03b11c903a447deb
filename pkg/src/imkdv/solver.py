"""Time integration of the mKdV equation and the coupled system.

Integrating-factor RK4: the dispersion exp(i xi^3 t) is applied exactly,
the (dealiased, pseudo-spectral) nonlinearity is advanced with classical
RK4 in the filtered variable.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .spectral import (
    Field,
    FieldPair,
    SpectralGrid,
    dealias,
    derivative,
    dump_field,
    inverse_transform,
    make_grid,
    transform,
)

BLOWUP_THRESHOLD = 1e12


class StepFailure(RuntimeError):
    """Non-finite or blown-up coefficients during a step."""

    def __init__(self, time: float):
        super().__init__(f"step failure at t = {time}")
        self.time = time


@dataclass(frozen=True)
class Trajectory:
    times: list
    states: list  # Field or FieldPair snapshots
    dt: float


@dataclass(frozen=True)
class InvariantReport:
    times: list
    mass: list
    energy: list
    i1: list
    i2: list

    def to_csv(self) -> str:
        lines = ["t,mass,energy,i1,i2"]
        for row in zip(self.times, self.mass, self.energy, self.i1, self.i2):
            lines.append(",".join(f"{v:.17g}" for v in row))
        return "\n".join(lines) + "\n"


def soliton(c: float, x0: float, grid: SpectralGrid) -> Field:
    """Traveling-wave profile sqrt(2c) sech(sqrt(c) (x - x0)) of speed c."""
    if c <= 0:
        raise ValueError("speed must be positive")
    tail = 1.0 / math.cosh(math.sqrt(c) * grid.L / 2)
    if tail >= 1e-8:
        raise ValueError(
            f"soliton tail {tail:.3g} does not fit the torus (needs < 1e-8)"
        )
    samples = math.sqrt(2 * c) / np.cosh(math.sqrt(c) * (grid.x - x0))
    return dealias(transform(samples, grid))


def _check_finite(coeffs: np.ndarray, time: float) -> None:
    if not np.all(np.isfinite(coeffs)) or np.abs(coeffs).max() > BLOWUP_THRESHOLD:
        raise StepFailure(time)


def _nl_factory(grid: SpectralGrid):
    """Dealiased pseudo-spectral nonlinearities; returns (mkdv, system)."""
    keep = np.abs(grid.modes) <= grid.kmax_dealiased
    keep[grid.K // 2] = False
    ixi = 1j * grid.xi

    def to_phys(c):
        return np.fft.ifft(c * grid.K).real

    def mkdv(c):
        u = to_phys(c)
        return np.where(keep, -ixi * (np.fft.fft(u**3) / grid.K), 0.0)

    def system(cu, cv):
        u, v = to_phys(cu), to_phys(cv)
        nu = np.where(keep, -ixi * (np.fft.fft(u * v * v) / grid.K), 0.0)
        nv = np.where(keep, -ixi * (np.fft.fft(u * u * v) / grid.K), 0.0)
        return nu, nv

    return mkdv, system


def _phases(grid: SpectralGrid, dt: float):
    lam = 1j * grid.xi**3
    return np.exp(lam * dt), np.exp(lam * dt / 2)


def step_mkdv(state: Field, dt: float, t: float = 0.0) -> Field:
    """One integrating-factor RK4 step of u_t + u_xxx + (u^3)_x = 0."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    grid = state.grid
    nl, _ = _nl_factory(grid)
    E, E2 = _phases(grid, dt)
    c = state.coeffs
    n1 = nl(c)
    u2 = E2 * (c + 0.5 * dt * n1)
    n2 = nl(u2)
    u3 = E2 * c + 0.5 * dt * n2
    n3 = nl(u3)
    u4 = E * c + dt * E2 * n3
    n4 = nl(u4)
    out = E * c + (dt / 6.0) * (E * n1 + 2.0 * E2 * (n2 + n3) + n4)
    _check_finite(out, t + dt)
    return Field(grid, out)


def step_system(state: FieldPair, dt: float, t: float = 0.0) -> FieldPair:
    """One step of the coupled system (both linear parts are third order)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    grid = state.grid
    _, nl = _nl_factory(grid)
    E, E2 = _phases(grid, dt)
    cu, cv = state.u.coeffs, state.v.coeffs
    nu1, nv1 = nl(cu, cv)
    au, av = E2 * (cu + 0.5 * dt * nu1), E2 * (cv + 0.5 * dt * nv1)
    nu2, nv2 = nl(au, av)
    bu, bv = E2 * cu + 0.5 * dt * nu2, E2 * cv + 0.5 * dt * nv2
    nu3, nv3 = nl(bu, bv)
    du, dv = E * cu + dt * E2 * nu3, E * cv + dt * E2 * nv3
    nu4, nv4 = nl(du, dv)
    ou = E * cu + (dt / 6.0) * (E * nu1 + 2.0 * E2 * (nu2 + nu3) + nu4)
    ov = E * cv + (dt / 6.0) * (E * nv1 + 2.0 * E2 * (nv2 + nv3) + nv4)
    _check_finite(ou, t + dt)
    _check_finite(ov, t + dt)
    return FieldPair(Field(grid, ou), Field(grid, ov))


def default_dt(state) -> float:
    """Nonlinear-advection stability heuristic."""
    fields = [state] if isinstance(state, Field) else [state.u, state.v]
    umax = max(float(np.abs(inverse_transform(f)).max()) for f in fields)
    xi_max = 2 * np.pi * fields[0].grid.kmax_dealiased / fields[0].grid.L
    if umax == 0 or xi_max == 0:
        return 1e-3
    return min(1e-3, 0.5 / (xi_max * umax**2))


def evolve(state, t_end: float, dt: float, snapshot_every: int = 1) -> Trajectory:
    """Repeated stepping with snapshots every `snapshot_every` steps."""
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")
    if t_end == 0:
        return Trajectory([0.0], [state], dt)
    ratio = t_end / dt
    nsteps = round(ratio)
    if nsteps < 1 or abs(ratio - nsteps) > 1e-9 * max(ratio, 1.0):
        raise ValueError(f"dt {dt} does not divide t_end {t_end}")
    stepper = step_mkdv if isinstance(state, Field) else step_system
    times, states = [0.0], [state]
    current = state
    for i in range(nsteps):
        current = stepper(current, dt, t=i * dt)
        if (i + 1) % snapshot_every == 0 or i + 1 == nsteps:
            times.append((i + 1) * dt)
            states.append(current)
    return Trajectory(times, states, dt)


def rescale(state: Field, lam: float, K_new: int | None = None) -> Field:
    """u -> (1/lam) u(x/lam) on the stretched grid L' = lam * L."""
    if lam < 1:
        raise ValueError("scaling parameter must be >= 1")
    grid = state.grid
    K_new = grid.K if K_new is None else K_new
    new_grid = make_grid(lam * grid.L, K_new)
    coeffs = np.zeros(K_new, dtype=np.complex128)
    kcap = min(grid.K, K_new) // 2 - 1
    for k in range(-kcap, kcap + 1):
        coeffs[k % K_new] = state.coeffs[k % grid.K] / lam
    return Field(new_grid, coeffs)


def invariants(traj: Trajectory, alpha: float) -> InvariantReport:
    """Classical invariants per snapshot: mass, energy(alpha), I1, I2."""
    from .functionals import energy  # local import to avoid a cycle

    mass, en, i1, i2 = [], [], [], []
    for state in traj.states:
        if isinstance(state, Field):
            u = state
            mass.append(0.5 * _l2sq(u))
            en.append(energy(u, alpha))
            i1.append(float("nan"))
            i2.append(float("nan"))
        else:
            u, v = state.u, state.v
            mass.append(0.5 * (_l2sq(u) + _l2sq(v)))
            en.append(energy(u, alpha) + energy(v, alpha))
            i1.append(_l2sq(u) + _l2sq(v))
            i2.append(_l2sq(derivative(u, 1)) + _l2sq(derivative(v, 1)) - _int_u2v2(u, v))
    return InvariantReport(list(traj.times), mass, en, i1, i2)


def _l2sq(f: Field) -> float:
    return f.grid.L * float(np.sum(np.abs(f.coeffs) ** 2))


def _int_u2v2(u: Field, v: Field) -> float:
    from .functionals import transform_pad

    K = u.grid.K
    us = transform_pad(u, 2 * K)
    vs = transform_pad(v, 2 * K)
    return float(np.sum(us * us * vs * vs) * u.grid.L / (2 * K))


def content_hash(state) -> str:
    if isinstance(state, Field):
        payload = dump_field(state)
    else:
        payload = dump_field(state.u) + dump_field(state.v)
    return hashlib.sha256(payload.encode()).hexdigest()


def export_trajectory(traj: Trajectory, outdir, equation: str, parameters: dict) -> None:
    """Write manifest.json plus one field file per snapshot."""
    from pathlib import Path

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    first = traj.states[0]
    grid = first.grid if isinstance(first, Field) else first.grid
    manifest = {
        "equation": equation,
        "grid": {"L": grid.L, "K": grid.K},
        "dt": traj.dt,
        "t_end": traj.times[-1],
        "snapshots": len(traj.times),
        "parameters": parameters,
        "initial_hash": content_hash(first),
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    for i, (t, state) in enumerate(zip(traj.times, traj.states)):
        if isinstance(state, Field):
            (outdir / f"snapshot_{i:04d}.txt").write_text(dump_field(state))
        else:
            (outdir / f"snapshot_{i:04d}_u.txt").write_text(dump_field(state.u))
            (outdir / f"snapshot_{i:04d}_v.txt").write_text(dump_field(state.v))
