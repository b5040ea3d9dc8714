"""Batch driver: JSON problem configurations in, reproducible artifacts out.

Subcommands: expand (coefficient table), verify (defect report with a
pass/fail exit status), sample (plot-ready field values), report (all of
the above).  Exit codes: 0 all checks passed, 1 a verification defect
exceeded its tolerance, 2 configuration error.

All numeric output is written with shortest round-trip float formatting, so
identical configurations produce byte-identical artifacts and re-parsing a
coefficient table loses nothing.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .jets import InsufficientOrderError, Jet
from .potential import PotentialSpec, expand_potential
from .recursion import (
    FreeData,
    InternalInconsistencyError,
    WTCSeries,
    generate,
    plan_order_budget,
)
from .verify import GridError, GridSpec, build_report, compat_defects, residual_grid

EXIT_OK = 0
EXIT_DEFECT = 1
EXIT_CONFIG = 2

DEFAULT_OUTPUTS = {
    "coefficients": "coefficients.csv",
    "summary": "expand_summary.json",
    "report": "report.json",
    "samples": "samples.csv",
}


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass(frozen=True)
class Tolerances:
    compat: float = 1e-10
    conjugacy: float = 1e-9
    residual: float = 1e-10

    def __post_init__(self):
        for name in ("compat", "conjugacy", "residual"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"tolerance '{name}' must be positive")


@dataclass(frozen=True)
class RunConfig:
    t0: float
    theta: float
    p0: tuple
    p1: tuple
    q: tuple
    psi: tuple
    s3: tuple
    s4: tuple
    n: int
    k_target: int
    tolerances: Tolerances
    grid: Optional[GridSpec]
    outputs: dict


def _need(obj: dict, key: str, where: str):
    if key not in obj:
        raise ConfigError(f"missing field '{key}' in {where}")
    return obj[key]


def _real_list(val, where: str) -> tuple:
    if not isinstance(val, (list, tuple)) or not val:
        raise ConfigError(f"field '{where}' must be a nonempty list of reals")
    try:
        return tuple(float(x) for x in val)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field '{where}' must contain only real numbers") from exc


def _real(val, where: str) -> float:
    try:
        return float(val)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field '{where}' must be a real number") from exc


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    pot = _need(data, "potential", "config")
    if not isinstance(pot, dict):
        raise ConfigError("field 'potential' must be an object")
    p0 = _real_list(_need(pot, "p0", "potential"), "potential.p0")
    p1 = _real_list(_need(pot, "p1", "potential"), "potential.p1")
    q = _real_list(_need(pot, "q", "potential"), "potential.q")
    psi = _real_list(_need(pot, "psi", "potential"), "potential.psi")
    n = int(_need(data, "N", "config"))
    if n < 5:
        raise ConfigError("field 'N' must be at least 5 for a full run")
    k_target = int(data.get("K_target", 2))
    if k_target < 0:
        raise ConfigError("field 'K_target' must be nonnegative")

    tol_in = data.get("tolerances", {})
    if not isinstance(tol_in, dict):
        raise ConfigError("field 'tolerances' must be an object")
    unknown = set(tol_in) - {"compat", "conjugacy", "residual"}
    if unknown:
        raise ConfigError(f"unknown tolerance keys: {sorted(unknown)}")
    tol = Tolerances(**{k: _real(v, f"tolerances.{k}") for k, v in tol_in.items()})

    grid = None
    if "grid" in data:
        g = data["grid"]
        if not isinstance(g, dict):
            raise ConfigError("field 'grid' must be an object")
        xr = _real_list(_need(g, "x", "grid"), "grid.x")
        tr = _real_list(_need(g, "t", "grid"), "grid.t")
        if len(xr) != 2 or len(tr) != 2:
            raise ConfigError("grid.x and grid.t must be [min, max] pairs")
        rmin = _real(_need(g, "rmin", "grid"), "grid.rmin")
        if rmin <= 0:
            raise ConfigError("grid.rmin must be positive (the singular curve "
                              "must be excluded)")
        grid = GridSpec(
            x_min=xr[0], x_max=xr[1], t_min=tr[0], t_max=tr[1],
            dx=_real(_need(g, "dx", "grid"), "grid.dx"),
            dt=_real(_need(g, "dt", "grid"), "grid.dt"),
            rmin=rmin,
            rmax=_real(_need(g, "rmax", "grid"), "grid.rmax"),
            trust_tau=_real(g["trust_tau"], "grid.trust_tau")
            if "trust_tau" in g else None,
        )

    outputs = dict(DEFAULT_OUTPUTS)
    extra = data.get("outputs", {})
    if not isinstance(extra, dict):
        raise ConfigError("field 'outputs' must be an object")
    bad = set(extra) - set(DEFAULT_OUTPUTS)
    if bad:
        raise ConfigError(f"unknown output keys: {sorted(bad)}")
    outputs.update({k: str(v) for k, v in extra.items()})

    return RunConfig(
        t0=_real(data.get("t0", 0.0), "t0"),
        theta=_real(data.get("theta", 0.0), "theta"),
        p0=p0, p1=p1, q=q, psi=psi,
        s3=_real_list(data.get("s3", [0.0]), "s3"),
        s4=_real_list(data.get("s4", [0.0]), "s4"),
        n=n,
        k_target=k_target,
        tolerances=tol,
        grid=grid,
        outputs=outputs,
    )


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, "
                          f"column {exc.colno}: {exc.msg}") from exc
    return parse_config(data)


def _poly_jet(coeffs, t0: float, order: int) -> Jet:
    # A polynomial is exact data: padding its coefficient list with zeros up
    # to the budget order fabricates nothing.
    c = np.zeros(max(order, len(coeffs) - 1) + 1)
    c[: len(coeffs)] = coeffs
    return Jet(c, t0)


def build_problem(cfg: RunConfig):
    """Construct the potential and free data at the planned order budget."""
    k0 = plan_order_budget(cfg.n, cfg.k_target)
    spec = PotentialSpec(
        p0=_poly_jet(cfg.p0, cfg.t0, k0),
        p1=_poly_jet(cfg.p1, cfg.t0, k0),
        q=_poly_jet(cfg.q, cfg.t0, k0),
        psi=_poly_jet(cfg.psi, cfg.t0, k0),
    )
    free = FreeData(
        theta=cfg.theta,
        s3=_poly_jet(cfg.s3, cfg.t0, k0),
        s4=_poly_jet(cfg.s4, cfg.t0, k0),
    )
    return spec, free


def run_config(cfg: RunConfig):
    spec, free = build_problem(cfg)
    series = generate(spec, free, cfg.n, cfg.k_target)
    return spec, free, series


def random_config(seed: int, n: int = 30, k_target: int = 2,
                  degree: int = 4) -> RunConfig:
    """Random admissible configuration (test mode): polynomial data of the
    given degree with coefficients uniform in [-1, 1], plus a sampling
    window placed on one side of the singular curve."""
    rng = np.random.default_rng(seed)
    mk = lambda: [float(x) for x in rng.uniform(-1.0, 1.0, degree + 1)]
    psi = mk()
    x0 = -psi[0]
    data = {
        "t0": 0.0,
        "theta": float(rng.uniform(0.0, 2.0 * math.pi)),
        "potential": {"p0": mk(), "p1": mk(), "q": mk(), "psi": psi},
        "s3": mk(),
        "s4": mk(),
        "N": n,
        "K_target": k_target,
        "grid": {
            "x": [x0 + 0.3, x0 + 0.6],
            "t": [-0.04, 0.04],
            "dx": 0.01,
            "dt": 0.01,
            "rmin": 0.2,
            "rmax": 0.75,
        },
    }
    return parse_config(data)


# --------------------------------------------------------------------------
# artifacts


def _fmt(x: float) -> str:
    return repr(float(x))


def write_coefficient_table(path, series: WTCSeries) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["j", "m", "re_u", "im_u", "re_v", "im_v", "valid_order"])
        for j in range(series.n + 1):
            uc, vc = series.u[j].coeffs, series.v[j].coeffs
            for m in range(len(uc)):
                w.writerow([
                    j, m,
                    _fmt(uc[m].real), _fmt(uc[m].imag),
                    _fmt(vc[m].real), _fmt(vc[m].imag),
                    series.valid_order[j],
                ])


def read_coefficient_table(path, base: float):
    """Re-parse an expand artifact into (u, v) jet tuples (lossless)."""
    rows: dict = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            rows.setdefault(int(row["j"]), []).append(row)
    u, v = [], []
    for j in range(len(rows)):
        chunk = sorted(rows[j], key=lambda r: int(r["m"]))
        uc = np.array([complex(float(r["re_u"]), float(r["im_u"])) for r in chunk])
        vc = np.array([complex(float(r["re_v"]), float(r["im_v"])) for r in chunk])
        u.append(Jet(uc, base))
        v.append(Jet(vc, base))
    return tuple(u), tuple(v)


def _dump_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_expand(cfg: RunConfig, out_dir) -> WTCSeries:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spec, free, series = run_config(cfg)
    write_coefficient_table(out / cfg.outputs["coefficients"], series)
    res3_mismatch, res3_imag, res4_sum, res4_real = compat_defects(series)
    _dump_json(out / cfg.outputs["summary"], {
        "n": series.n,
        "order_budget": plan_order_budget(cfg.n, cfg.k_target),
        "valid_order": list(series.valid_order),
        "abs_u_at_base": [abs(complex(f.coeffs[0])) for f in series.u],
        "resonance_defects": {
            "res3_mismatch": res3_mismatch,
            "res3_imag": res3_imag,
            "res4_sum": res4_sum,
            "res4_real": res4_real,
        },
    })
    return series


def cmd_verify(cfg: RunConfig, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spec, free, series = run_config(cfg)
    exp = expand_potential(spec)
    report = build_report(series, spec, exp, cfg.grid)
    scale = exp.scale()
    tol = cfg.tolerances
    checks = {
        "compat": (
            float(max(report.res3_mismatch, report.res3_imag,
                      report.res4_sum, report.res4_real)),
            tol.compat * scale,
        ),
        "conjugacy": (float(report.conjugacy_defect), tol.conjugacy),
        "residual": (float(report.worst_coeff_residual()), tol.residual * scale),
    }
    failures = {k: v for k, (v, lim) in checks.items() if v > lim}
    payload = report.to_dict()
    payload["tolerances"] = {
        "compat": tol.compat, "conjugacy": tol.conjugacy, "residual": tol.residual,
    }
    payload["scale"] = scale
    payload["checks"] = {
        k: {"value": v, "limit": lim, "passed": bool(v <= lim)}
        for k, (v, lim) in checks.items()
    }
    payload["passed"] = not failures
    _dump_json(out / cfg.outputs["report"], payload)
    return payload, (EXIT_OK if not failures else EXIT_DEFECT)


def cmd_sample(cfg: RunConfig, out_dir):
    if cfg.grid is None:
        raise ConfigError("sampling requires a 'grid' section in the config")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spec, free, series = run_config(cfg)
    grid = cfg.grid
    tau = grid.trust_tau if grid.trust_tau is not None else 0.25 / spec.input_scale()
    reach = max(abs(grid.t_min - cfg.t0), abs(grid.t_max - cfg.t0))
    if reach > tau + 1e-12:
        raise GridError(
            f"grid t-range reaches {reach:.4g} from t0; trust region is {tau:.4g}"
        )
    xs, ts, big_psi, u, res = residual_grid(series, spec, grid, series.n)
    path = out / cfg.outputs["samples"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "t", "re_u", "im_u", "abs_u", "abs_psi", "residual"])
        for k in range(len(ts)):
            for i in range(len(xs)):
                mag = abs(big_psi[k, i])
                if mag < grid.rmin:
                    continue
                w.writerow([
                    _fmt(xs[i]), _fmt(ts[k]),
                    _fmt(u[k, i].real), _fmt(u[k, i].imag),
                    _fmt(abs(u[k, i])), _fmt(mag), _fmt(res[k, i]),
                ])
    return path


def cmd_report(cfg: RunConfig, out_dir) -> int:
    cmd_expand(cfg, out_dir)
    payload, code = cmd_verify(cfg, out_dir)
    if cfg.grid is not None:
        cmd_sample(cfg, out_dir)
    return code


def _load_from_args(args) -> RunConfig:
    if (args.config is None) == (args.seed is None):
        raise ConfigError("exactly one of --config or --seed is required")
    if args.config is not None:
        cfg = load_config(args.config)
    else:
        cfg = random_config(args.seed)
    if args.n is not None:
        if args.n < 5:
            raise ConfigError("--n must be at least 5")
        cfg = dataclasses.replace(cfg, n=args.n)
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="wtc-nls",
        description="Series construction near a movable singularity of a "
                    "cubic Schrodinger-type equation, with verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("expand", "write the coefficient table and summary"),
        ("verify", "run all checks and write the defect report"),
        ("sample", "write field samples over the configured grid"),
        ("report", "expand + verify + sample"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, help="JSON configuration file")
        p.add_argument("--seed", type=int,
                       help="generate a random admissible config (test mode)")
        p.add_argument("--out", type=Path, default=Path("."),
                       help="output directory (default: current)")
        p.add_argument("--n", type=int, help="override the truncation index N")
    args = parser.parse_args(argv)

    try:
        cfg = _load_from_args(args)
        if args.command == "expand":
            cmd_expand(cfg, args.out)
            return EXIT_OK
        if args.command == "verify":
            _, code = cmd_verify(cfg, args.out)
            return code
        if args.command == "sample":
            cmd_sample(cfg, args.out)
            return EXIT_OK
        return cmd_report(cfg, args.out)
    except (ConfigError, GridError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InternalInconsistencyError, InsufficientOrderError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEFECT


if __name__ == "__main__":
    raise SystemExit(main())
