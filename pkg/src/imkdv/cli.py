"""Command-line entry point.

One subcommand per study; every run writes a manifest.json with the resolved
configuration, the quartic/sextic constants table, the seed, and the wall
time.  Floats in all outputs carry 17 significant digits.  Exit codes:
0 pass, 1 check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .kernels import backend_name
from .multiplier import CALIBRATED_CONSTANTS, PAPER_CONSTANTS, IMultiplierProfile
from .spectral import Field, FieldPair, dealias, field_from_function, make_grid

DEFAULT_TOLS = {
    "bounds": 10.0,
    "dmvt": 4.0,
    "cancellation": 1e-7,
    "derivative": 1e-6,
    "plancherel": 1e-10,
    "rescale": 1e-6,
}


# --- 17-significant-digit JSON -----------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return json.dumps(str(value))
        return f"{value:.17g}"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        inner = ", ".join(f"{json.dumps(str(k))}: {_fmt(v)}" for k, v in value.items())
        return "{" + inner + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if isinstance(value, (np.floating,)):
        return _fmt(float(value))
    raise TypeError(f"cannot serialize {type(value)!r}")


def dump_json(obj) -> str:
    return _fmt(obj) + "\n"


# --- config file --------------------------------------------------------------


def load_config(path: str) -> dict:
    """Plain "key = value" file with optional [section] headers; keys are
    flattened (the section name is dropped, flags and file share key names)."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line or (line.startswith("[") and line.endswith("]")):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw.rstrip()}")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _resolve(args, config: dict, defaults: dict) -> dict:
    """Flag value if given, else config-file value, else hard default."""
    resolved = {}
    for key, hard in defaults.items():
        flag = getattr(args, key, None)
        if flag is not None:
            resolved[key] = flag
        elif key in config:
            caster = type(hard) if hard is not None else str
            if caster is list:
                resolved[key] = [float(v) for v in config[key].split(",")]
            elif caster is bool:
                resolved[key] = config[key].lower() in ("1", "true", "yes")
            else:
                resolved[key] = caster(config[key])
        else:
            resolved[key] = hard
    return resolved


def _cosine_field(grid, amps, freqs) -> Field:
    def func(x):
        total = np.zeros_like(x)
        for a, f in zip(amps, freqs):
            total += a * np.cos(f * x)
        return total

    return dealias(field_from_function(grid, func))


def _parse_floats(text: str):
    return [float(v) for v in str(text).split(",")]


def _write(outdir: str, name: str, text: str) -> None:
    os.makedirs(outdir, exist_ok=True)
    with open(os.path.join(outdir, name), "w", encoding="utf-8") as fh:
        fh.write(text)


def _manifest(outdir, subcommand, resolved, seed, passed, t0) -> None:
    manifest = {
        "subcommand": subcommand,
        "config": resolved,
        "constants": {"paper": PAPER_CONSTANTS, "calibrated": CALIBRATED_CONSTANTS},
        "seed": seed,
        "version": __version__,
        "backend": backend_name,
        "wall_time_s": time.time() - t0,
        "pass": passed,
    }
    _write(outdir, "manifest.json", dump_json(manifest))


# --- subcommand bodies ----------------------------------------------------------


def _initial_state(cfg, grid, equation):
    from .solver import soliton

    if cfg["ic"] == "soliton":
        u = soliton(cfg["c_speed"], cfg["x0"], grid)
    elif cfg["ic"] == "cosine":
        u = _cosine_field(grid, _parse_floats(cfg["amp"]), _parse_floats(cfg["freq"]))
    else:
        raise ValueError(f"unknown initial condition {cfg['ic']!r}")
    if equation == "mkdv":
        return u
    return FieldPair(u, Field(grid, cfg["v_scale"] * u.coeffs))


SIM_DEFAULTS = {
    "equation": "mkdv",
    "L": 40.0,
    "K": 256,
    "dt": 1e-3,
    "t_end": 1.0,
    "snapshot_every": 100,
    "ic": "soliton",
    "c_speed": 1.0,
    "x0": 20.0,
    "amp": "1.0",
    "freq": "1.0",
    "v_scale": 1.0,
    "alpha": 0.25,
}


def cmd_simulate(cfg, outdir, seed):
    from .solver import evolve, export_trajectory

    grid = make_grid(cfg["L"], int(cfg["K"]))
    state = _initial_state(cfg, grid, cfg["equation"])
    traj = evolve(state, cfg["t_end"], cfg["dt"], int(cfg["snapshot_every"]))
    export_trajectory(traj, outdir, cfg["equation"], cfg)
    return True, {"snapshots": len(traj.times)}


def cmd_invariants(cfg, outdir, seed):
    from .solver import evolve, invariants

    grid = make_grid(cfg["L"], int(cfg["K"]))
    state = _initial_state(cfg, grid, cfg["equation"])
    traj = evolve(state, cfg["t_end"], cfg["dt"], int(cfg["snapshot_every"]))
    report = invariants(traj, cfg["alpha"])
    _write(outdir, "invariants.csv", report.to_csv())
    drift = max(abs(m - report.mass[0]) for m in report.mass)
    return True, {"mass_drift": drift}


DRIFT_DEFAULTS = {
    "L": math.pi / 2,
    "K": 64,
    "dt": 5e-6,
    "T_run": 1.0,
    "s": 0.5,
    "N_list": [4.0, 8.0, 16.0, 32.0],
    "amp": "0.56568542494923801,0.47568284600108841,0.4",
    "freq": "4,8,16",
    "variant": "sharp",
    "max_slope": None,
}


def cmd_drift_sweep(cfg, outdir, seed):
    from .experiments import drift_csv, drift_sweep

    grid = make_grid(cfg["L"], int(cfg["K"]))
    u0 = _cosine_field(grid, _parse_floats(cfg["amp"]), _parse_floats(cfg["freq"]))
    N_list = [float(n) for n in cfg["N_list"]] if isinstance(cfg["N_list"], list) else _parse_floats(cfg["N_list"])
    rows, slope = drift_sweep(
        u0, cfg["s"], N_list, cfg["T_run"], int(cfg["K"]), cfg["dt"], variant=cfg["variant"]
    )
    _write(outdir, "drift.csv", drift_csv(rows, slope))
    passed = True if cfg["max_slope"] is None else slope <= float(cfg["max_slope"])
    return passed, {"fitted_slope": slope}


def cmd_verify_identity(cfg, outdir, seed):
    from .verify import check_cubic_identity

    rng = np.random.default_rng(seed)
    n = int(cfg["samples"])
    ks = rng.integers(-(10**6), 10**6 + 1, size=(n, 3))
    failures = sum(
        not check_cubic_identity((a, b, c, -(a + b + c))) for a, b, c in ks
    )
    lat = int(cfg["lattice"])
    for k1 in range(-lat, lat + 1):
        for k2 in range(-lat, lat + 1):
            for k3 in range(-lat, lat + 1):
                if not check_cubic_identity((k1, k2, k3, -(k1 + k2 + k3))):
                    failures += 1
    report = {
        "check": "cubic_identity",
        "parameters": {"samples": n, "lattice": lat},
        "seed": seed,
        "sample_count": n + (2 * lat + 1) ** 3,
        "failures": failures,
        "pass": failures == 0,
    }
    _write(outdir, "verification.json", dump_json(report))
    return report["pass"], report


def _bound_entry(rep, threshold):
    return {
        "sample_count": rep.sample_count,
        "max_ratio": rep.max_ratio,
        "argmax_tuple": list(rep.argmax_tuple.xi),
        "histogram": [list(b) for b in rep.histogram],
        "pass": rep.max_ratio <= threshold,
    }


def cmd_verify_bounds(cfg, outdir, seed):
    from .verify import bound_m4, bound_m6

    profile = IMultiplierProfile(N=cfg["N"], s=cfg["s"], variant=cfg["variant"])
    threshold = cfg["threshold"]
    entries = {}
    if cfg["which"] in ("m4", "both"):
        entries["m4"] = _bound_entry(bound_m4(profile, int(cfg["samples"]), seed), threshold)
    if cfg["which"] in ("m6", "both"):
        entries["m6"] = _bound_entry(bound_m6(profile, int(cfg["samples"]), seed), threshold)
    passed = all(e["pass"] for e in entries.values())
    report = {
        "check": "multiplier_bounds",
        "parameters": {"N": cfg["N"], "s": cfg["s"], "variant": cfg["variant"],
                       "threshold": threshold},
        "seed": seed,
        "results": entries,
        "pass": passed,
    }
    _write(outdir, "verification.json", dump_json(report))
    return passed, report


def cmd_verify_dmvt(cfg, outdir, seed):
    from .verify import dmvt_scan

    profile = IMultiplierProfile(N=cfg["N"], s=cfg["s"], variant=cfg["variant"])
    scan = dmvt_scan(profile, int(cfg["samples"]), seed)
    passed = scan["max_ratio"] <= scan["threshold"]
    report = {
        "check": "dmvt",
        "parameters": {"N": cfg["N"], "s": cfg["s"], "variant": cfg["variant"]},
        "seed": seed,
        "sample_count": scan["samples"],
        "skipped_kink_straddles": scan["skipped"],
        "max_ratio": scan["max_ratio"],
        "threshold": scan["threshold"],
        "pass": passed,
    }
    _write(outdir, "verification.json", dump_json(report))
    return passed, report


def cmd_verify_cancellation(cfg, outdir, seed):
    from .verify import quartic_cancellation

    grid = make_grid(cfg["L"], int(cfg["K"]))
    u = _cosine_field(grid, _parse_floats(cfg["amp"]), _parse_floats(cfg["freq"]))
    profile = IMultiplierProfile(N=cfg["N"], s=cfg["s"])
    res_cal = quartic_cancellation(u, profile, cfg["dt"], CALIBRATED_CONSTANTS)
    res_paper = quartic_cancellation(u, profile, cfg["dt"], PAPER_CONSTANTS)
    passed = res_cal <= cfg["tol"]
    report = {
        "check": "quartic_cancellation",
        "parameters": {k: cfg[k] for k in ("L", "K", "dt", "N", "s", "tol")},
        "seed": seed,
        "residual_calibrated": res_cal,
        "residual_paper_constants": res_paper,
        "pass": passed,
    }
    _write(outdir, "verification.json", dump_json(report))
    return passed, report


def cmd_verify_derivative(cfg, outdir, seed):
    from .solver import evolve
    from .verify import e2_derivative_match, random_band_limited

    grid = make_grid(cfg["L"], int(cfg["K"]))
    rng = np.random.default_rng(seed)
    profile = IMultiplierProfile(N=cfg["N"], s=cfg["s"])
    u = random_band_limited(grid, 2, rng, amplitude=0.9)
    u = evolve(u, 0.05, 1e-4).states[-1]  # warm up off the symmetric slice
    if cfg["equation"] == "mkdv":
        state = u
    else:
        v = random_band_limited(grid, 2, rng, amplitude=0.9)
        state = FieldPair(u, evolve(v, 0.05, 1e-4).states[-1])
    err = e2_derivative_match(state, profile, cfg["dt"])
    err_half = e2_derivative_match(state, profile, cfg["dt"] * 2)
    passed = err <= cfg["tol"]
    report = {
        "check": "e2_derivative_match",
        "parameters": {k: cfg[k] for k in ("equation", "L", "K", "dt", "N", "s", "tol")},
        "seed": seed,
        "relative_error": err,
        "relative_error_double_dt": err_half,
        "halving_ratio": err_half / err if err > 0 else float("nan"),
        "pass": passed,
    }
    _write(outdir, "verification.json", dump_json(report))
    return passed, report


def cmd_plancherel(cfg, outdir, seed):
    from .verify import plancherel_oracle, random_band_limited

    grid = make_grid(cfg["L"], int(cfg["K"]))
    rng = np.random.default_rng(seed)
    arity = int(cfg["n"])
    kcap = min(5, grid.kmax_dealiased if arity < 6 else 5)
    worst = 0.0
    for _ in range(int(cfg["samples"])):
        fields = [random_band_limited(grid, kcap, rng) for _ in range(arity)]
        lhs, rhs = plancherel_oracle(fields)
        worst = max(worst, abs(lhs - rhs) / (1 + abs(rhs)))
    passed = worst <= cfg["tol"]
    report = {
        "check": "plancherel",
        "parameters": {"n": arity, "L": cfg["L"], "K": cfg["K"], "tol": cfg["tol"]},
        "seed": seed,
        "sample_count": int(cfg["samples"]),
        "max_residual": worst,
        "pass": passed,
    }
    _write(outdir, "verification.json", dump_json(report))
    return passed, report


def cmd_plan_gwp(cfg, outdir, seed):
    from .experiments import gwp_plan

    plan = gwp_plan(cfg["s"], cfg["T"], cfg["theta"], cfg["c"])
    report = {
        "s": plan.s,
        "T": plan.T,
        "theta": plan.theta,
        "c_margin": plan.c_margin,
        "exponent": plan.exponent,
        "N": plan.N,
        "lambda": plan.lam,
        "delta": plan.delta,
        "steps": plan.steps,
        "feasible": plan.feasible,
    }
    print(dump_json(report), end="")
    _write(outdir, "plan.json", dump_json(report))
    return plan.feasible, report


def cmd_rescale_check(cfg, outdir, seed):
    from .experiments import rescaled_norm_check
    from .solver import soliton

    grid = make_grid(cfg["L"], int(cfg["K"]))
    phi = soliton(cfg["c_speed"], cfg["x0"], grid)
    lams = cfg["lambdas"] if isinstance(cfg["lambdas"], list) else _parse_floats(cfg["lambdas"])
    table = rescaled_norm_check(phi, cfg["s"], cfg["N"], lams)
    rows = table["rows"]
    base_l2 = rows[0]["l2"] * math.sqrt(rows[0]["lambda"])
    l2_err = max(
        abs(r["l2"] - base_l2 / math.sqrt(r["lambda"])) / base_l2 for r in rows
    )
    monotone = all(b["ih1"] <= a["ih1"] for a, b in zip(rows, rows[1:]))
    passed = monotone and l2_err <= cfg["tol"]
    report = {
        "check": "rescaled_norms",
        "parameters": {k: cfg[k] for k in ("L", "K", "s", "N", "tol")},
        "seed": seed,
        "rows": rows,
        "l2_law_relative_error": l2_err,
        "ih1_monotone": monotone,
        "lambda_achieving_eps": table["lambda_achieving_eps"],
        "lambda_predicted": table["lambda_predicted"],
        "pass": passed,
    }
    _write(outdir, "rescale.json", dump_json(report))
    return passed, report


def cmd_ledger(cfg, outdir, seed):
    from .experiments import gwp_plan, iteration_ledger

    plan = gwp_plan(cfg["s"], cfg["T"], cfg["theta"], cfg["c"])
    if not plan.feasible:
        report = {"check": "iteration_ledger", "feasible": False, "pass": False}
        _write(outdir, "ledger.json", dump_json(report))
        return False, report
    led = iteration_ledger(plan, cfg["drift_constant"], cfg["eps"])
    report = {"check": "iteration_ledger", "seed": seed, **led, "pass": bool(led["sufficient"])}
    _write(outdir, "ledger.json", dump_json(report))
    print(dump_json(report), end="")
    return report["pass"], report


COMMANDS = {
    "simulate": (cmd_simulate, dict(SIM_DEFAULTS)),
    "invariants": (cmd_invariants, dict(SIM_DEFAULTS, equation="system", v_scale=-0.5)),
    "drift-sweep": (cmd_drift_sweep, dict(DRIFT_DEFAULTS)),
    "verify-identity": (cmd_verify_identity, {"samples": 10**6, "lattice": 20}),
    "verify-bounds": (
        cmd_verify_bounds,
        {"which": "both", "samples": 10**6, "N": 16.0, "s": 0.5, "variant": "blend",
         "threshold": DEFAULT_TOLS["bounds"]},
    ),
    "verify-dmvt": (
        cmd_verify_dmvt,
        {"samples": 10**4, "N": 16.0, "s": 0.5, "variant": "sharp"},
    ),
    "verify-cancellation": (
        cmd_verify_cancellation,
        {"L": 2 * math.pi, "K": 32, "dt": 1e-5, "N": 2.0, "s": 0.5,
         "amp": "1.0,0.5", "freq": "1,3", "tol": DEFAULT_TOLS["cancellation"]},
    ),
    "verify-derivative": (
        cmd_verify_derivative,
        {"equation": "mkdv", "L": 2 * math.pi, "K": 32, "dt": 1e-5, "N": 2.0,
         "s": 0.5, "tol": DEFAULT_TOLS["derivative"]},
    ),
    "plancherel": (
        cmd_plancherel,
        {"n": 4, "L": 2 * math.pi, "K": 32, "samples": 100,
         "tol": DEFAULT_TOLS["plancherel"]},
    ),
    "plan-gwp": (cmd_plan_gwp, {"s": 0.5, "T": 100.0, "theta": 0.5, "c": 1.0}),
    "rescale-check": (
        cmd_rescale_check,
        {"L": 40.0, "K": 256, "c_speed": 1.0, "x0": 20.0, "s": 0.5, "N": 22.0,
         "lambdas": [2.0, 4.0, 8.0, 16.0], "tol": DEFAULT_TOLS["rescale"]},
    ),
    "ledger": (
        cmd_ledger,
        {"s": 0.5, "T": 100.0, "theta": 0.5, "c": 1.0, "drift_constant": 1.0,
         "eps": 0.1},
    ),
}

_FLAG_TYPES = {
    "equation": str, "ic": str, "amp": str, "freq": str, "which": str,
    "variant": str, "N_list": str, "lambdas": str, "max_slope": float,
    "K": int, "samples": int, "lattice": int, "snapshot_every": int, "n": int,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="imkdv", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, (_, defaults) in COMMANDS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--config", default=None, help="key = value config file")
        for key in defaults:
            flag = "--" + key.replace("_", "-")
            sp.add_argument(flag, type=_FLAG_TYPES.get(key, float), default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func, defaults = COMMANDS[args.subcommand]
    config = load_config(args.config) if args.config else {}
    try:
        cfg = _resolve(args, config, defaults)
    except (TypeError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    if args.threads is not None:
        os.environ["OMP_NUM_THREADS"] = str(args.threads)
    outdir = args.out or f"imkdv-{args.subcommand}"
    t0 = time.time()
    try:
        passed, summary = func(cfg, outdir, seed)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        _manifest(outdir, args.subcommand, cfg, seed, False, t0)
        return 1
    _manifest(outdir, args.subcommand, cfg, seed, bool(passed), t0)
    if args.subcommand not in ("plan-gwp", "ledger"):
        print(dump_json({"subcommand": args.subcommand, "pass": bool(passed), **{
            k: v for k, v in summary.items() if not isinstance(v, (dict, list))
        }}), end="")
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
