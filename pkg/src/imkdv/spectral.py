"""Periodic Fourier representation of real fields.

Coefficient convention: u(x) = sum_k uhat(k) exp(i xi_k x) with
uhat(k) = (1/L) * integral of u(x) exp(-i xi_k x) over [0, L), so a
discrete transform is fft(samples)/K.  Coefficients are stored in numpy
fft order; the Nyquist mode K/2 is always forced to zero so that real
fields stay Hermitian under odd-order derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SpectralGrid:
    """Periodic domain [0, L) sampled at K equispaced collocation points."""

    L: float
    K: int

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError(f"domain length must be positive, got {self.L}")
        K = self.K
        if K < 8 or (K & (K - 1)) != 0:
            raise ValueError(f"K must be a power of two >= 8, got {K}")

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.K) * (self.L / self.K)

    @property
    def modes(self) -> np.ndarray:
        """Integer mode numbers in fft order; k in {-K/2+1, ..., K/2-1} plus Nyquist slot."""
        return np.fft.fftfreq(self.K, d=1.0 / self.K).astype(np.int64)

    @property
    def xi(self) -> np.ndarray:
        """Physical frequencies 2*pi*k/L in fft order."""
        return 2.0 * np.pi * self.modes / self.L

    @property
    def kmax_dealiased(self) -> int:
        """Largest mode retained by the two-thirds rule."""
        return self.K // 3

    def __eq__(self, other):
        return isinstance(other, SpectralGrid) and self.L == other.L and self.K == other.K


@dataclass(frozen=True)
class Field:
    """Real field stored as Hermitian-symmetric Fourier coefficients."""

    grid: SpectralGrid
    coeffs: np.ndarray  # complex128, length K, fft order, Nyquist zeroed

    def check(self, tol: float = 1e-12) -> None:
        """Assert the Hermitian-symmetry and Nyquist invariants (test helper)."""
        c = self.coeffs
        K = self.grid.K
        if c.shape != (K,):
            raise ValueError("coefficient count does not match grid")
        if c[K // 2] != 0:
            raise ValueError("Nyquist mode is not zero")
        scale = max(1.0, float(np.abs(c).max()))
        mirrored = np.conj(c[(-np.arange(K)) % K])
        if np.abs(c - mirrored).max() > tol * scale:
            raise ValueError("coefficients are not Hermitian symmetric")


@dataclass(frozen=True)
class FieldPair:
    """Two-component state (u, v) on a common grid."""

    u: Field
    v: Field

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise ValueError("components live on different grids")

    @property
    def grid(self) -> SpectralGrid:
        return self.u.grid


def make_grid(L: float, K: int) -> SpectralGrid:
    return SpectralGrid(float(L), int(K))


def zero_field(grid: SpectralGrid) -> Field:
    return Field(grid, np.zeros(grid.K, dtype=np.complex128))


def transform(samples: np.ndarray, grid: SpectralGrid) -> Field:
    """Collocation samples -> Field."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape != (grid.K,):
        raise ValueError(f"expected {grid.K} samples, got {samples.shape}")
    coeffs = np.fft.fft(samples) / grid.K
    coeffs[grid.K // 2] = 0.0
    return Field(grid, coeffs)


def inverse_transform(f: Field) -> np.ndarray:
    """Field -> collocation samples (imaginary residue discarded)."""
    return np.fft.ifft(f.coeffs * f.grid.K).real


def field_from_function(grid: SpectralGrid, func) -> Field:
    return transform(func(grid.x), grid)


def derivative(f: Field, order: int) -> Field:
    if order not in (1, 2, 3):
        raise ValueError(f"derivative order must be 1, 2 or 3, got {order}")
    coeffs = f.coeffs * (1j * f.grid.xi) ** order
    coeffs[f.grid.K // 2] = 0.0
    return Field(f.grid, coeffs)


def dealias(f: Field) -> Field:
    """Zero all modes with |k| > K/3 (two-thirds rule); idempotent."""
    kmax = f.grid.kmax_dealiased
    coeffs = np.where(np.abs(f.grid.modes) <= kmax, f.coeffs, 0.0)
    return Field(f.grid, coeffs)


def sobolev_norm(f: Field, s: float) -> float:
    """H^s norm with the weight (1 + |xi|)^s; s = 0 gives the L2 norm."""
    w = (1.0 + np.abs(f.grid.xi)) ** (2.0 * s)
    return float(np.sqrt(f.grid.L * np.sum(w * np.abs(f.coeffs) ** 2)))


def l2_norm(f: Field) -> float:
    return sobolev_norm(f, 0.0)


def integral_of_product(fields: list[Field]) -> float:
    """Trapezoid-free spectral quadrature (L/K) * sum of the pointwise product."""
    if not 2 <= len(fields) <= 6:
        raise ValueError("need between 2 and 6 fields")
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise ValueError("fields live on different grids")
    prod = np.ones(grid.K)
    for f in fields:
        prod = prod * inverse_transform(f)
    return float(prod.sum() * grid.L / grid.K)


# --- text serialization -----------------------------------------------------

def dump_field(f: Field) -> str:
    """One header line 'L=<L> K=<K>', then 'k re im' per mode, ascending k."""
    grid = f.grid
    lines = [f"L={grid.L:.17g} K={grid.K}"]
    for k in range(-grid.K // 2 + 1, grid.K // 2 + 1):
        c = f.coeffs[k % grid.K]
        lines.append(f"{k} {c.real:.17g} {c.imag:.17g}")
    return "\n".join(lines) + "\n"


def load_field(text: str) -> Field:
    lines = text.strip().splitlines()
    header = dict(item.split("=") for item in lines[0].split())
    grid = make_grid(float(header["L"]), int(header["K"]))
    coeffs = np.zeros(grid.K, dtype=np.complex128)
    for line in lines[1:]:
        kstr, re, im = line.split()
        coeffs[int(kstr) % grid.K] = complex(float(re), float(im))
    coeffs[grid.K // 2] = 0.0
    return Field(grid, coeffs)
