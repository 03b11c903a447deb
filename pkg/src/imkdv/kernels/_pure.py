"""Numpy fallback for the hyperplane-sum kernels.

Coefficient arrays are indexed by k + kmax for k in [-kmax, kmax]; the
multiplier tables g, g', g'' are indexed by k + 3*kmax so that triple
frequency sums stay inside the table.  All resonance decisions are exact
integer tests on the lattice.
"""

from __future__ import annotations

import numpy as np

name = "pure"


def m4_lattice(k1, k2, k3, k4, g, gp, gpp, kmax, h):
    """Vectorized M4 at integer lattice tuples (k1+k2+k3+k4 = 0)."""
    k1, k2, k3, k4 = (np.asarray(k, dtype=np.int64) for k in (k1, k2, k3, k4))
    off = 3 * kmax
    k12, k13, k23 = k1 + k2, k1 + k3, k2 + k3
    res = (k12 == 0) | (k13 == 0) | (k23 == 0)
    num = g[k1 + off] + g[k2 + off] + g[k3 + off] + g[k4 + off]
    den = (-3.0 * h * h * h) * (k12 * k13 * k23)
    out = np.where(res, 0.0, num / np.where(res, 1.0, den))
    if np.any(res):
        use12 = k12 == 0
        use13 = ~use12 & (k13 == 0)
        a = np.where(use12 | use13, k1, k2)
        b = np.where(use12, k3, np.where(use13, k2, k1))
        dbl = np.abs(a) == np.abs(b)
        azero = a == 0
        sa = np.where(azero, 1, a)
        lim_dbl = np.where(azero, 1.0, gpp[a + off] / (6.0 * h * sa))
        af, bf = a.astype(np.float64), b.astype(np.float64)
        lim_gen = (gp[a + off] - gp[b + off]) / np.where(
            dbl, 1.0, 3.0 * h * h * (af * af - bf * bf)
        )
        out = np.where(res, np.where(dbl, lim_dbl, lim_gen), out)
    return out


def lam4_m4(c1, c2, c3, c4, g, gp, gpp, kmax, L, h):
    """L * sum over Gamma_4 lattice tuples of M4 * c1 c2 c3 c4 (complex)."""
    ks = np.arange(-kmax, kmax + 1, dtype=np.int64)
    K1, K2, K3 = np.meshgrid(ks, ks, ks, indexing="ij", sparse=False)
    K4 = -(K1 + K2 + K3)
    mask = np.abs(K4) <= kmax
    K1, K2, K3, K4 = K1[mask], K2[mask], K3[mask], K4[mask]
    mult = m4_lattice(K1, K2, K3, K4, g, gp, gpp, kmax, h)
    acc = np.sum(mult * c1[K1 + kmax] * c2[K2 + kmax] * c3[K3 + kmax] * c4[K4 + kmax])
    return L * acc


def lam6_m4rho(cs, g, gp, gpp, kmax, L, h, slots):
    """L * sum over Gamma_6 of M4(k_a, k_b, k_c, rho) * (h*rho) * prod(cs).

    slots = (a, b, c) names the three positions fed to M4; rho is minus
    their sum (equivalently the sum of the complementary three).
    """
    ks = np.arange(-kmax, kmax + 1, dtype=np.int64)
    K3, K4, K5 = np.meshgrid(ks, ks, ks, indexing="ij", sparse=False)
    c1, c2, c3, c4, c5, c6 = cs
    acc = 0.0 + 0.0j
    tail = c3[K3 + kmax] * c4[K4 + kmax] * c5[K5 + kmax]
    for k1 in ks:
        a1 = c1[k1 + kmax]
        if a1 == 0.0:
            continue
        for k2 in ks:
            a2 = c2[k2 + kmax]
            if a2 == 0.0:
                continue
            K6 = -(k1 + k2 + K3 + K4 + K5)
            mask = np.abs(K6) <= kmax
            if not mask.any():
                continue
            kk = (
                np.full(mask.sum(), k1, dtype=np.int64),
                np.full(mask.sum(), k2, dtype=np.int64),
                K3[mask],
                K4[mask],
                K5[mask],
                K6[mask],
            )
            ka, kb, kc = kk[slots[0]], kk[slots[1]], kk[slots[2]]
            rho = -(ka + kb + kc)
            mult = m4_lattice(ka, kb, kc, rho, g, gp, gpp, kmax, h) * (h * rho)
            acc += a1 * a2 * np.sum(mult * tail[mask] * c6[kk[5] + kmax])
    return L * acc
