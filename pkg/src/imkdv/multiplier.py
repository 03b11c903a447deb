"""Smoothing multiplier m(xi), the operator I, and the M4/M6 lattice multipliers.

m equals 1 up to the cutoff N and decays like (N/|xi|)^(1-s) at high
frequency.  The default "sharp" profile switches branch exactly at N;
an optional C1 "blend" interpolates in log-log space on [N, 2N].

M4 = (sum_j m^2(xi_j) xi_j^3) / (sum_j xi_j^3) on the zero-sum hyperplane,
extended across the resonant set (some pair sum vanishing) by its finite
limits.  With g(xi) = m^2(xi) xi^3 the limits are

    M4(a, -a, b, -b) = (g'(a) - g'(b)) / (3 (a^2 - b^2)),   a != +-b,
    M4(a, -a, a, -a) = g''(a) / (6 a),
    M4(0, 0, 0, 0)   = 1.

M6 = M4(xi1, xi2, xi3, xi456) * xi456.  The system variants are 4x these.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Normalized threshold on |xi12 xi13 xi23| / max|xi|^3 below which a tuple
# is treated as resonant (real-frequency entry points only; on the integer
# lattice resonance is detected exactly).
RESONANCE_TAU = 1e-9

_LN2 = np.log(2.0)


@dataclass(frozen=True)
class IMultiplierProfile:
    """Cutoff N, regularity s and the evaluation rule for m(xi)."""

    N: float
    s: float
    variant: str = "sharp"  # "sharp" | "blend"

    def __post_init__(self):
        if self.N <= 0:
            raise ValueError(f"cutoff N must be positive, got {self.N}")
        if not 0.0 < self.s < 1.0:
            raise ValueError(f"regularity s must lie in (0, 1), got {self.s}")
        if self.variant not in ("sharp", "blend"):
            raise ValueError(f"unknown profile variant {self.variant!r}")

    # -- m and g = m^2 xi^3 ---------------------------------------------

    def m(self, xi):
        """Evaluate m(xi); accepts scalars or arrays, even in xi."""
        r = np.abs(np.asarray(xi, dtype=np.float64))
        N, s = self.N, self.s
        with np.errstate(divide="ignore", over="ignore"):
            outer = (N / np.where(r > 0, r, 1.0)) ** (1.0 - s)
        if self.variant == "sharp":
            out = np.where(r <= N, 1.0, outer)
        else:
            t = np.clip(np.log(np.maximum(r, N) / N) / _LN2, 0.0, 1.0)
            hermite = 2.0 * t * t - t**3  # C1 monotone, H(0)=H'(0)=0, H(1)=H'(1)=1
            out = np.where(
                r <= N, 1.0, np.where(r >= 2 * N, outer, np.exp(-(1.0 - s) * _LN2 * hermite))
            )
        if np.isscalar(xi):
            return float(out)
        return out

    def g(self, xi):
        xi = np.asarray(xi, dtype=np.float64)
        return self.m(xi) ** 2 * xi**3

    def g_prime(self, xi):
        xi = np.asarray(xi, dtype=np.float64)
        if self.variant == "sharp":
            r = np.abs(xi)
            N, s = self.N, self.s
            low = 3.0 * xi**2
            high = (2 * s + 1) * N ** (2 - 2 * s) * np.where(r > 0, r, 1.0) ** (2 * s)
            return np.where(r <= N, low, high)
        return _stencil_derivative(self.g, xi, order=1)

    def g_second(self, xi):
        xi = np.asarray(xi, dtype=np.float64)
        if self.variant == "sharp":
            r = np.abs(xi)
            N, s = self.N, self.s
            low = 6.0 * xi
            high = 2 * s * (2 * s + 1) * N ** (2 - 2 * s) * np.sign(xi) * np.where(
                r > 0, r, 1.0
            ) ** (2 * s - 1)
            return np.where(r <= N, low, high)
        return _stencil_derivative(self.g, xi, order=2)

    def lattice_tables(self, kmax: int, h: float):
        """g, g', g'' tabulated at xi = h*k for k in [-3*kmax, 3*kmax].

        The hyperplane kernels evaluate M4 only at lattice frequencies (and
        their triple sums), so three lookup tables cover every case.
        """
        k = np.arange(-3 * kmax, 3 * kmax + 1)
        xi = h * k
        return self.g(xi), self.g_prime(xi), self.g_second(xi)


def _stencil_derivative(func, xi, order: int):
    """5-point central stencil; used for the blend profile off the sharp branches."""
    xi = np.asarray(xi, dtype=np.float64)
    h = 1e-4 * np.maximum(np.abs(xi), 1.0)
    f2, f1, fm1, fm2 = (func(xi + j * h) for j in (2, 1, -1, -2))
    if order == 1:
        return (-f2 + 8 * f1 - 8 * fm1 + fm2) / (12 * h)
    f0 = func(xi)
    return (-f2 + 16 * f1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h)


@dataclass(frozen=True)
class FrequencyTuple:
    """Point of the zero-sum hyperplane, arity 4 or 6."""

    xi: tuple

    def __post_init__(self):
        if len(self.xi) not in (4, 6):
            raise ValueError("arity must be 4 or 6")
        scale = max(abs(x) for x in self.xi)
        if abs(sum(self.xi)) > 1e-12 * max(scale, 1.0):
            raise ValueError(f"frequencies do not sum to zero: {self.xi}")

    @property
    def n(self) -> int:
        return len(self.xi)


def m_eval(profile: IMultiplierProfile, xi: float) -> float:
    return float(profile.m(xi))


def m4(t: FrequencyTuple, profile: IMultiplierProfile) -> float:
    """M4 at a real-frequency Gamma_4 point, resonant limits included."""
    if t.n != 4:
        raise ValueError("m4 needs a 4-tuple")
    return float(m4_raw(*(np.asarray([x]) for x in t.xi), profile=profile)[0])


def m4_raw(x1, x2, x3, x4, profile: IMultiplierProfile):
    """Vectorized M4 over arrays of real frequencies on Gamma_4."""
    x1, x2, x3, x4 = (np.asarray(x, dtype=np.float64) for x in (x1, x2, x3, x4))
    mx_raw = np.maximum.reduce([np.abs(x1), np.abs(x2), np.abs(x3), np.abs(x4)])
    mx = np.where(mx_raw > 0, mx_raw, 1.0)
    d12, d13, d23 = x1 + x2, x1 + x3, x2 + x3
    prod = d12 * d13 * d23
    nonres = np.abs(prod) > RESONANCE_TAU * mx**3

    num = profile.g(x1) + profile.g(x2) + profile.g(x3) + profile.g(x4)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = num / np.where(nonres, -3.0 * prod, 1.0)

    # Resonant branch: identify the vanishing pair sum, reduce to (a,-a,b,-b).
    a12, a13, a23 = np.abs(d12), np.abs(d13), np.abs(d23)
    use12 = (a12 <= a13) & (a12 <= a23)
    use13 = ~use12 & (a13 <= a23)
    a = np.where(use12, x1, np.where(use13, x1, x2))
    b = np.where(use12, x3, np.where(use13, x2, x1))
    double = np.abs(np.abs(a) - np.abs(b)) <= RESONANCE_TAU * mx
    azero = np.abs(a) <= RESONANCE_TAU * mx
    safe_a = np.where(azero, 1.0, a)
    lim_dbl = np.where(azero, 1.0, profile.g_second(safe_a) / (6.0 * safe_a))
    denom = 3.0 * (a * a - b * b)
    with np.errstate(divide="ignore", invalid="ignore"):
        lim_gen = (profile.g_prime(a) - profile.g_prime(b)) / np.where(double, 1.0, denom)
    resonant = np.where(double, lim_dbl, lim_gen)
    out = np.where(nonres, ratio, resonant)
    # M4 is identically 1 on the m == 1 plateau (limits included); besides
    # being exact, this sidesteps underflow for degenerate tiny tuples.
    return np.where(mx_raw <= profile.N, 1.0, out)


def m6(t: FrequencyTuple, profile: IMultiplierProfile) -> float:
    """M6 = M4(xi1, xi2, xi3, xi4+xi5+xi6) * (xi4+xi5+xi6)."""
    if t.n != 6:
        raise ValueError("m6 needs a 6-tuple")
    x456 = t.xi[3] + t.xi[4] + t.xi[5]
    quad = FrequencyTuple((t.xi[0], t.xi[1], t.xi[2], -(t.xi[0] + t.xi[1] + t.xi[2])))
    return m4(quad, profile) * x456


def m4_system(t: FrequencyTuple, profile: IMultiplierProfile) -> float:
    return 4.0 * m4(t, profile)


def m6_system(t: FrequencyTuple, profile: IMultiplierProfile) -> float:
    return 4.0 * m6(t, profile)


# --- constants table --------------------------------------------------------
# The quartic/sextic coefficients as printed in the source analysis versus the
# values the cancellation / derivative-matching calibration actually selects
# under this code's Fourier normalization.  The energy functional here is
# E = 1/2 ||u_x||^2 - alpha ||u||_{L4}^4, E2 = -1/2 L2(m xi m xi) - c4 L4(M4),
# dE2/dt = c6 * Re(i L6(M6)); system analogues use c4_system on L4(4*M4) and
# c6_system on the factored sextic functional.

PAPER_CONSTANTS = {"c4": 1.0 / 12.0, "c4_system": 1.0, "c6": 1.0 / 3.0, "c6_system": 4.0}
CALIBRATED_CONSTANTS = {"c4": 0.25, "c4_system": 0.25, "c6": 1.0, "c6_system": 1.0}

ALPHA_PAPER = 1.0 / 12.0
ALPHA_CALIBRATED = 0.25
