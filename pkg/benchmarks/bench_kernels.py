"""Time the compiled hyperplane kernels against the pure-numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--K 32 64] [--repeats 5]

For each grid size the script builds a random band-limited field, evaluates
Lambda_4(M4) and the slotted Lambda_6 kernel with both backends, checks that
the results agree, and reports the best-of-N wall times plus the speedup.
"""

import argparse
import time

import numpy as np

from imkdv.kernels import _pure, backend_name
from imkdv.multiplier import IMultiplierProfile
from imkdv.spectral import make_grid
from imkdv.verify import random_band_limited

try:
    from imkdv.kernels import _speed
except ImportError:
    _speed = None


def _setup(K: int):
    grid = make_grid(2 * np.pi, K)
    rng = np.random.default_rng(K)
    u = random_band_limited(grid, grid.kmax_dealiased, rng)
    kmax = grid.kmax_dealiased
    h = 2 * np.pi / grid.L
    profile = IMultiplierProfile(N=max(2.0, kmax / 4), s=0.5)
    g, gp, gpp = profile.lattice_tables(kmax, h)
    idx = np.arange(-kmax, kmax + 1) % grid.K
    cs = np.ascontiguousarray(u.coeffs[idx])
    return cs, g, gp, gpp, kmax, grid.L, h


def _best_of(repeats, fn, *args):
    best = float("inf")
    value = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        value = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, value


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--K", type=int, nargs="+", default=[32, 64])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if _speed is None:
        print("compiled backend unavailable; timing the fallback only")
    print(f"active backend at import time: {backend_name}")
    header = f"{'kernel':<12}{'K':>5}{'pure (s)':>12}{'compiled (s)':>14}{'speedup':>9}"
    print(header)
    print("-" * len(header))

    for K in args.K:
        cs, g, gp, gpp, kmax, L, h = _setup(K)
        t_pure, v_pure = _best_of(
            args.repeats, _pure.lam4_m4, cs, cs, cs, cs, g, gp, gpp, kmax, L, h
        )
        if _speed is not None:
            t_fast, v_fast = _best_of(
                args.repeats, _speed.lam4_m4, cs, cs, cs, cs, g, gp, gpp, kmax, L, h
            )
            assert abs(v_fast - v_pure) <= 1e-10 * (1 + abs(v_pure))
            print(f"{'lam4_m4':<12}{K:>5}{t_pure:>12.4f}{t_fast:>14.4f}"
                  f"{t_pure / t_fast:>9.1f}")
        else:
            print(f"{'lam4_m4':<12}{K:>5}{t_pure:>12.4f}{'-':>14}{'-':>9}")

        slots = (0, 2, 3)
        t_pure6, v_pure6 = _best_of(
            args.repeats, _pure.lam6_m4rho, [cs] * 6, g, gp, gpp, kmax, L, h, slots
        )
        if _speed is not None:
            t_fast6, v_fast6 = _best_of(
                args.repeats, _speed.lam6_m4rho, [cs] * 6, g, gp, gpp, kmax, L, h, slots
            )
            assert abs(v_fast6 - v_pure6) <= 1e-8 * (1 + abs(v_pure6))
            print(f"{'lam6_m4rho':<12}{K:>5}{t_pure6:>12.4f}{t_fast6:>14.4f}"
                  f"{t_pure6 / t_fast6:>9.1f}")
        else:
            print(f"{'lam6_m4rho':<12}{K:>5}{t_pure6:>12.4f}{'-':>14}{'-':>9}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
