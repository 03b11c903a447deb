"""Discrete n-linear functionals on the zero-sum frequency hyperplane and the
modified energies built from them.

Normalization: Lambda_n(M; f_1..f_n) = L * sum over lattice tuples with
k_1+...+k_n = 0 of M(xi_1,...,xi_n) * prod uhat_j(k_j), so that
Lambda_n(1; f,...,f) equals the integral of f^n over the period.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import kernels
from .multiplier import CALIBRATED_CONSTANTS, FrequencyTuple, IMultiplierProfile
from .spectral import Field, FieldPair, dealias, inverse_transform, transform

LAMBDA6_TUPLE_GUARD = 2**31
CALLABLE_TUPLE_GUARD = 4_000_000

REAL_RESIDUE_TOL = 1e-10


class CostGuardError(RuntimeError):
    """Raised when a hyperplane sum would exceed its tuple budget."""


def apply_I(f: Field, profile: IMultiplierProfile) -> Field:
    """Coefficient-wise multiplication by m(xi_k)."""
    return Field(f.grid, f.coeffs * profile.m(f.grid.xi))


def _centered(f: Field) -> np.ndarray:
    """Dealiased coefficients reindexed to c[k + kmax], k in [-kmax, kmax]."""
    grid = f.grid
    kmax = grid.kmax_dealiased
    high = np.abs(grid.modes) > kmax
    scale = float(np.abs(f.coeffs).max())
    if scale > 0 and np.abs(f.coeffs[high]).max() > 1e-13 * scale:
        raise ValueError("field carries modes above the dealiasing cutoff")
    idx = np.arange(-kmax, kmax + 1) % grid.K
    return np.ascontiguousarray(f.coeffs[idx])


def _common_grid(fields):
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise ValueError("fields live on different grids")
    return grid


def _check_real(value: complex, scale: float) -> float:
    if abs(value.imag) > REAL_RESIDUE_TOL * max(abs(value.real), scale):
        raise ArithmeticError(f"hyperplane sum has imaginary residue: {value}")
    return float(value.real)


def lambda_n_complex(multiplier, fields, profile: IMultiplierProfile | None = None) -> complex:
    """Hyperplane sum with complex result; `multiplier` is 1, a named lattice
    multiplier ("m4", "m6", "m4_system", "m6_system"), or a callable on
    FrequencyTuple."""
    n = len(fields)
    if not 2 <= n <= 6:
        raise ValueError("arity must lie in [2, 6]")
    grid = _common_grid(fields)
    kmax = grid.kmax_dealiased
    nmodes = 2 * kmax + 1
    if n == 6 and nmodes**5 > LAMBDA6_TUPLE_GUARD:
        raise CostGuardError(f"Lambda_6 needs {nmodes}^5 tuples; grid too large")
    cs = [_centered(f) for f in fields]
    L = grid.L
    h = 2.0 * np.pi / L

    if multiplier is None or (np.isscalar(multiplier) and multiplier == 1):
        acc = cs[0]
        for c in cs[1:]:
            acc = np.convolve(acc, c)
        return L * complex(acc[n * kmax])

    if isinstance(multiplier, str):
        if profile is None:
            raise ValueError("named multipliers need a profile")
        g, gp, gpp = profile.lattice_tables(kmax, h)
        if multiplier in ("m4", "m4_system"):
            if n != 4:
                raise ValueError("m4 multiplier needs arity 4")
            val = kernels.lam4_m4(*cs, g, gp, gpp, kmax, L, h)
            return complex(val) * (4.0 if multiplier == "m4_system" else 1.0)
        if multiplier in ("m6", "m6_system"):
            if n != 6:
                raise ValueError("m6 multiplier needs arity 6")
            val = kernels.lam6_m4rho(cs, g, gp, gpp, kmax, L, h, (0, 1, 2))
            return complex(val) * (4.0 if multiplier == "m6_system" else 1.0)
        raise ValueError(f"unknown multiplier {multiplier!r}")

    if not callable(multiplier):
        raise TypeError("multiplier must be 1, a name, or a callable")
    if nmodes ** (n - 1) > CALLABLE_TUPLE_GUARD:
        raise CostGuardError("callable multiplier path exceeds its tuple budget")
    ks = range(-kmax, kmax + 1)
    acc = 0.0 + 0.0j
    for head in itertools.product(ks, repeat=n - 1):
        klast = -sum(head)
        if abs(klast) > kmax:
            continue
        prod = cs[-1][klast + kmax]
        if prod == 0:
            continue
        for c, k in zip(cs, head):
            prod *= c[k + kmax]
        if prod == 0:
            continue
        xi = tuple(h * k for k in head) + (h * klast,)
        acc += multiplier(xi) * prod
    return L * acc


def lambda_n(multiplier, fields, profile: IMultiplierProfile | None = None) -> float:
    """Real-valued hyperplane sum; checks and discards the imaginary residue.
    Intended for real even multipliers on Hermitian inputs."""
    val = lambda_n_complex(multiplier, fields, profile)
    scale = fields[0].grid.L * float(
        np.prod([np.abs(_centered(f)).sum() for f in fields])
    )
    return _check_real(val, 1e-30 + scale)


def _quadratic_imxi(f: Field, profile: IMultiplierProfile) -> float:
    """-1/2 Lambda_2(m1 xi1 m2 xi2; f, f) = 1/2 ||(If)_x||^2, computed spectrally."""
    grid = f.grid
    w = profile.m(grid.xi) * grid.xi
    return 0.5 * grid.L * float(np.sum((w * np.abs(f.coeffs)) ** 2))


def _l4_integral(f: Field) -> float:
    """Alias-free integral of f^4 via zero-padded pointwise quadrature."""
    grid = f.grid
    fine = transform_pad(f, 2 * grid.K)
    return float(np.sum(fine**4) * grid.L / (2 * grid.K))


def transform_pad(f: Field, M: int) -> np.ndarray:
    """Samples of f on an M-point grid (M >= K), by spectral zero padding."""
    grid = f.grid
    coeffs = np.zeros(M, dtype=np.complex128)
    for k in range(-grid.K // 2 + 1, grid.K // 2):
        coeffs[k % M] = f.coeffs[k % grid.K]
    return np.fft.ifft(coeffs * M).real


def energy(u: Field, alpha: float) -> float:
    """E = 1/2 ||u_x||^2 - alpha ||u||_{L4}^4 (alias-free quartic term)."""
    grid = u.grid
    grad = grid.L * float(np.sum((grid.xi * np.abs(u.coeffs)) ** 2))
    return 0.5 * grad - alpha * _l4_integral(u)


def modified_energy_e1(
    u: Field, profile: IMultiplierProfile, alpha: float | None = None
) -> float:
    """E1 = E(Iu), evaluated two independent ways and cross-checked."""
    if alpha is None:
        alpha = CALIBRATED_CONSTANTS["c4"]
    iu = dealias(apply_I(u, profile))
    phys = energy(iu, alpha)
    lam = _quadratic_imxi(u, profile) - alpha * lambda_n(1, [iu, iu, iu, iu])
    scale = max(abs(phys), abs(lam), 1e-30)
    if abs(phys - lam) > 1e-10 * scale:
        raise ArithmeticError(
            f"E1 evaluation paths disagree: physical {phys!r} vs Lambda-form {lam!r}"
        )
    return lam


def modified_energy_e2(
    u: Field, profile: IMultiplierProfile, c4: float | None = None
) -> float:
    """E2 = -1/2 Lambda_2(m xi m xi) - c4 Lambda_4(M4)."""
    if c4 is None:
        c4 = CALIBRATED_CONSTANTS["c4"]
    quart = lambda_n("m4", [u, u, u, u], profile)
    return _quadratic_imxi(u, profile) - c4 * quart


def modified_energy_e2_system(
    state: FieldPair, profile: IMultiplierProfile, c4_system: float | None = None
) -> float:
    """System E2 with quartic slots ordered (u, u, v, v)."""
    if c4_system is None:
        c4_system = CALIBRATED_CONSTANTS["c4_system"]
    u, v = state.u, state.v
    quart = lambda_n("m4_system", [u, u, v, v], profile)
    return 2.0 * _quadratic_imxi(u, profile) + 2.0 * _quadratic_imxi(v, profile) - c4_system * quart


def de2_dt_sextic(state, profile: IMultiplierProfile, c6: float | None = None) -> float:
    """The sextic time derivative of E2 along the flow.

    Single equation: c6 * Re(i Lambda_6(M6)).  System: the factored functional
    2 c6 * Re(i (K_u + K_v)) with K_u, K_v the u^2 v^4 and u^4 v^2 hyperplane
    sums produced by differentiating the quartic term (see de2_dt_sextic_terms).
    """
    if isinstance(state, Field):
        if c6 is None:
            c6 = CALIBRATED_CONSTANTS["c6"]
        val = lambda_n_complex("m6", [state] * 6, profile)
        return c6 * float((1j * val).real)
    if c6 is None:
        c6 = CALIBRATED_CONSTANTS["c6_system"]
    ku, kv = de2_dt_sextic_terms(state, profile)
    return 2.0 * c6 * float((1j * (ku + kv)).real)


def _quadratic_increment(ca, cb, grid, profile) -> float:
    """Difference of -1/2 Lambda_2(m xi m xi) between coefficient sets,
    evaluated without large-term cancellation."""
    w = profile.m(grid.xi) * grid.xi
    d = cb - ca
    s = cb + ca
    return 0.5 * grid.L * float(np.sum(w * w * (d * np.conj(s)).real))


def _lam4_m4_telescope(cs_a, cs_b, grid, profile) -> float:
    """Lambda_4(M4; b,b,b,b) - Lambda_4(M4; a,a,a,a) via slotwise telescoping,
    so every term carries one factor of (b - a)."""
    kmax = grid.kmax_dealiased
    L = grid.L
    h = 2.0 * np.pi / L
    g, gp, gpp = profile.lattice_tables(kmax, h)
    total = 0.0 + 0.0j
    n = len(cs_a)
    for j in range(n):
        slots = list(cs_a[:j]) + [cs_b[j] - cs_a[j]] + list(cs_b[j + 1 :])
        total += kernels.lam4_m4(*slots, g, gp, gpp, kmax, L, h)
    return float(total.real)


def modified_energy_e2_increment(
    ua: Field, ub: Field, profile: IMultiplierProfile, c4: float | None = None
) -> float:
    """E2(ub) - E2(ua), cancellation-free (for finite-difference rates)."""
    if c4 is None:
        c4 = CALIBRATED_CONSTANTS["c4"]
    grid = _common_grid([ua, ub])
    quad = _quadratic_increment(ua.coeffs, ub.coeffs, grid, profile)
    ca, cb = _centered(ua), _centered(ub)
    quart = _lam4_m4_telescope([ca] * 4, [cb] * 4, grid, profile)
    return quad - c4 * quart


def modified_energy_e2_system_increment(
    pa: FieldPair, pb: FieldPair, profile: IMultiplierProfile, c4_system: float | None = None
) -> float:
    if c4_system is None:
        c4_system = CALIBRATED_CONSTANTS["c4_system"]
    grid = _common_grid([pa.u, pb.u, pa.v, pb.v])
    quad = _quadratic_increment(pa.u.coeffs, pb.u.coeffs, grid, profile) * 2.0
    quad += _quadratic_increment(pa.v.coeffs, pb.v.coeffs, grid, profile) * 2.0
    ua, va = _centered(pa.u), _centered(pa.v)
    ub, vb = _centered(pb.u), _centered(pb.v)
    quart = _lam4_m4_telescope([ua, ua, va, va], [ub, ub, vb, vb], grid, profile)
    return quad - 4.0 * c4_system * quart


def de2_dt_sextic_terms(state: FieldPair, profile: IMultiplierProfile):
    """The two hyperplane sums entering the system sextic derivative.

    K_u sums M4(eta_1, eta_3, eta_4, rho) * rho over slots (u,u,v,v,v,v) and
    K_v sums M4(eta_1, eta_2, eta_5, rho) * rho over slots (u,u,u,u,v,v);
    rho is the complementary triple sum in each case.
    """
    grid = _common_grid([state.u, state.v])
    kmax = grid.kmax_dealiased
    if (2 * kmax + 1) ** 5 > LAMBDA6_TUPLE_GUARD:
        raise CostGuardError("system sextic exceeds the Lambda_6 tuple budget")
    cu, cv = _centered(state.u), _centered(state.v)
    L = grid.L
    h = 2.0 * np.pi / L
    g, gp, gpp = profile.lattice_tables(kmax, h)
    ku = kernels.lam6_m4rho([cu, cu, cv, cv, cv, cv], g, gp, gpp, kmax, L, h, (0, 2, 3))
    kv = kernels.lam6_m4rho([cu, cu, cu, cu, cv, cv], g, gp, gpp, kmax, L, h, (0, 1, 4))
    return complex(ku), complex(kv)


def de2_dt_sextic_single_term_form(state: FieldPair, profile: IMultiplierProfile) -> float:
    """The one-term system sextic Re(i Lambda_6(4 M6; u,u,v,v,v,v)).

    Reported for the record only: differentiating the system quartic term
    produces both a u^2 v^4 and a u^4 v^2 functional, so this form agrees
    with the true derivative only on symmetric states (v = +-u).
    """
    val = lambda_n_complex("m6_system", [state.u, state.u, state.v, state.v, state.v, state.v], profile)
    return float((1j * val).real)
