"""Command-line entry point: ``hamlag resolve|verify|sample|torus-search|oracle``.

Exit codes: 0 success, 1 config error, 2 infeasible parameters, 3 verification
failure, 4 empty search.
"""
from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import immersion as im
from . import oracle, torus
from .errors import ConfigError, EmptySearch, HamlagError, IntegrationError, ParameterError
from .params import SeedParameters, resolve
from .profile import build_profile
from .verify import DEFAULT_TOLERANCES, Grid, run_suite

log = logging.getLogger("hamlag")

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_VERIFY, EXIT_EMPTY = 0, 1, 2, 3, 4

CHARTS = ("homogeneous", "affine0", "affine1", "affine2")
CHART_EPS = 1e-9
ORACLE_TOL = 1e-8

DEFAULT_CONFIG = {
    "seed": {"alpha": [0, -1, 3], "a1": 2.0, "a2": 1.0, "c2_root_branch": "minus", "c2_sign": "positive"},
    "grid": {"nx": 64, "ny": 64},
    "tolerances": {},
    "export": {"format": "csv", "chart": "affine0", "path": None},
    "torus": {
        "q_max": 50, "tol": 1e-6,
        "a1_range": [1.5, 2.5], "a2_range": [0.5, 1.4], "tau_range": None,
        "grid_counts": [5, 5, 8], "branches": [["minus", "positive"]],
        "refine": True, "workers": 1,
    },
    "oracle": {"steps_per_period": 2000, "periods": 5.0},
}


@dataclass
class JobConfig:
    seed: SeedParameters
    grid: Grid
    tolerances: dict[str, float] = field(default_factory=dict)
    export: dict = field(default_factory=dict)
    torus: dict = field(default_factory=dict)
    oracle: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "JobConfig":
        cfg = _merge(copy.deepcopy(DEFAULT_CONFIG), raw)
        try:
            seed = SeedParameters(**cfg["seed"])
            grid = Grid(**cfg["grid"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        tols = {k: float(v) for k, v in cfg["tolerances"].items()}
        unknown = set(tols) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerance names {sorted(unknown)}")
        if any(v <= 0 for v in tols.values()):
            raise ConfigError("tolerances must be positive")
        export = cfg["export"]
        if export["chart"] not in CHARTS:
            raise ConfigError(f"chart must be one of {CHARTS}")
        if export["format"] not in ("csv", "json"):
            raise ConfigError("export format must be csv or json")
        return cls(seed, grid, tols, export, cfg["torus"], cfg["oracle"])


def _merge(base: dict, over: dict) -> dict:
    for key, val in over.items():
        if isinstance(val, dict) and isinstance(base.get(key), dict):
            _merge(base[key], val)
        else:
            base[key] = val
    return base


def _set_path(raw: dict, dotted: str, value):
    node = raw
    *parents, last = dotted.split(".")
    for p in parents:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot set {dotted!r}: {p!r} is not an object")
    node[last] = value


def _parse_assignments(items, what) -> list[tuple[str, str]]:
    pairs = []
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"{what} expects key=value, got {item!r}")
        pairs.append((key.strip(), val.strip()))
    return pairs


def load_config(path: str | None, overrides=()) -> JobConfig:
    raw: dict = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    for key, val in _parse_assignments(overrides, "--set"):
        try:
            parsed = json.loads(val)
        except json.JSONDecodeError:
            parsed = val
        _set_path(raw, key, parsed)
    return JobConfig.from_dict(raw)


def _write(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".hamlag-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# -- commands ---------------------------------------------------------------

def _profile(cfg: JobConfig, perturb=()):
    consts = resolve(cfg.seed)
    factors = {}
    for key, val in _parse_assignments(perturb, "--perturb"):
        try:
            factors[key] = float(val)
        except ValueError as exc:
            raise ConfigError(f"--perturb factor for {key!r} is not a number") from exc
    if factors:
        try:
            consts = consts.perturbed(**factors)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
    return build_profile(consts)


def cmd_resolve(cfg: JobConfig, args) -> int:
    _write(_dump(resolve(cfg.seed).to_dict()), args.out)
    return EXIT_OK


def cmd_verify(cfg: JobConfig, args) -> int:
    report = run_suite(_profile(cfg, args.perturb), cfg.grid, cfg.tolerances)
    _write(report.to_json() + "\n", args.out)
    for e in report.failures():
        log.warning("check %s failed: residual %.3g > tolerance %.3g", e.check_name, e.max_abs_residual, e.tolerance)
    return EXIT_OK if report.passed else EXIT_VERIFY


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def sample_rows(profile, nx: int, ny: int, chart: str):
    """Header and rows of the point cloud over one period rectangle."""
    try:
        y_max = torus.y_period(profile.alpha)
    except HamlagError:
        y_max = 1.0
    x, y = np.meshgrid(np.linspace(0.0, profile.T, nx), np.linspace(0.0, y_max, ny), indexing="ij")
    x, y = x.ravel(), y.ravel()
    r = im.position(x, y, profile)
    if chart == "homogeneous":
        header = ["x", "y", "z1_re", "z1_im", "z2_re", "z2_im", "z3_re", "z3_im"]
        coords, flagged = r, np.zeros(len(x), dtype=bool)
    else:
        k = int(chart[-1])
        denom = r[:, k]
        flagged = np.abs(denom) < CHART_EPS
        others = [j for j in range(3) if j != k]
        with np.errstate(divide="ignore", invalid="ignore"):
            coords = r[:, others] / denom[:, None]
        coords[flagged] = complex(np.nan, np.nan)
        header = ["x", "y", "w1_re", "w1_im", "w2_re", "w2_im"]
    rows = []
    for i in range(len(x)):
        vals = [x[i], y[i]]
        for z in coords[i]:
            vals.extend([z.real, z.imag])
        rows.append(vals)
    if flagged.any():
        log.warning("%d sample(s) lie on the chart boundary of %s; written as nan", int(flagged.sum()), chart)
    return header, rows, flagged


def cmd_sample(cfg: JobConfig, args) -> int:
    prof = _profile(cfg, args.perturb)
    chart, fmt = cfg.export["chart"], cfg.export["format"]
    header, rows, flagged = sample_rows(prof, cfg.grid.nx, cfg.grid.ny, chart)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        text = buf.getvalue()
    else:
        text = _dump({"chart": chart, "columns": header, "rows": rows,
                      "flagged": [int(i) for i in np.flatnonzero(flagged)]})
    _write(text, args.out or cfg.export.get("path"))
    return EXIT_OK


def cmd_torus_search(cfg: JobConfig, args) -> int:
    t = cfg.torus
    spec = torus.SearchSpec(
        alpha=torus.integer_angles(cfg.seed.alpha),
        a1_range=tuple(t["a1_range"]),
        a2_range=tuple(t["a2_range"]),
        tau_range=None if t.get("tau_range") is None else tuple(t["tau_range"]),
        grid_counts=tuple(t["grid_counts"]),
        q_max=int(t["q_max"]),
        tol=float(t["tol"]),
        branches=tuple(tuple(b) for b in t["branches"]),
        refine=bool(t["refine"]),
    )
    certs = torus.search(spec, workers=int(t.get("workers", 1)))
    _write(_dump({"count": len(certs), "certificates": [c.to_dict() for c in certs]}), args.out)
    return EXIT_OK


def cmd_oracle(cfg: JobConfig, args) -> int:
    prof = _profile(cfg, args.perturb)
    report = oracle.compare(prof, int(cfg.oracle["steps_per_period"]), float(cfg.oracle["periods"]))
    report["tolerance"] = ORACLE_TOL
    report["passed"] = report["max_error"] <= ORACLE_TOL
    _write(_dump(report), args.out)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


COMMANDS = {
    "resolve": cmd_resolve,
    "verify": cmd_verify,
    "sample": cmd_sample,
    "torus-search": cmd_torus_search,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hamlag", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON job configuration")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config field by dotted path, e.g. seed.a1=2.1 (repeatable, last wins)")
    parser.add_argument("--perturb", action="append", default=[], metavar="NAME=FACTOR",
                        help="multiply a resolved constant (c2, a, a3, m, ...) by FACTOR")
    parser.add_argument("--out", help="output path (default stdout)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def _fail(exc: HamlagError, code: int) -> int:
    sys.stderr.write(json.dumps({"error": exc.name, "message": str(exc)}) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.set)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        return _fail(exc, EXIT_CONFIG)
    except ParameterError as exc:
        return _fail(exc, EXIT_INFEASIBLE)
    except EmptySearch as exc:
        return _fail(exc, EXIT_EMPTY)
    except IntegrationError as exc:
        return _fail(exc, EXIT_VERIFY)
    except HamlagError as exc:
        return _fail(exc, EXIT_CONFIG)


if __name__ == "__main__":
    sys.exit(main())
