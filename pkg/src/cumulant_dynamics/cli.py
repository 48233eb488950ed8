"""Config-driven runner: JSON config in, CSV time series and a JSON report out.

    cumulant-dynamics simulate run.json --out results/ --report results/report.json
    cumulant-dynamics compare davies.json star.json doublestar.json --out overlay.csv
    cumulant-dynamics check run.json

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 invariant violation.
"""
from __future__ import annotations

import argparse
import copy
import csv
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .analysis import (InvalidStateError, nonmarkovianity_witness, observables,
                       validate_density_matrix)
from .bath import KINDS
from .generators import (CUMULANT_METHODS, InvariantViolation, bohr_decompose,
                         cumulant_generator, davies_global_generator,
                         davies_local_generator, group_frequencies, propagate)
from .linalg import is_cptp, matrix_exp
from .models import preset_state, qutrit_boson, spin_boson
from .rates import QuadratureConfig, QuadratureError, QuadratureLog, RateKernel

CONFIG_VERSION = 1
METHOD_NAMES = ("exact-cutoff", "star", "doublestar", "davies-global", "davies-local")
EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_INVARIANT = 0, 2, 3, 4
NUMBER_FORMAT = "%.16e"

DEFAULTS = {
    "model": {"name": "spin_boson", "delta_omega": 2 * math.pi * 1e-2},
    "bath": {"kind": "ohmic", "alpha": 0.05, "omega_c": None, "T_eff": 1.0},
    "time_grid": {"t_max": 10.0, "n_points": 101, "spacing": "linear", "t_min": None},
    "initial_state": "uniform",
    "observables": None,
    "grouping": {"gap_threshold": None},
    "quadrature": {"rel_tol": 1e-8, "abs_tol": 1e-10, "max_subdivisions": 200,
                   "tail_epsilon": 1e-12},
    "output": {"dir": ".", "prefix": "run"},
    "witness": None,
}
TOP_KEYS = {"version", "method"} | set(DEFAULTS)


class ConfigError(ValueError):
    """Invalid run configuration; ``location`` names the offending field."""

    def __init__(self, message, location=None):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


def _check_keys(section, allowed, where):
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown}", where)


def _merged(raw, name):
    value = raw.get(name, DEFAULTS[name])
    if isinstance(DEFAULTS[name], dict):
        if not isinstance(value, dict):
            raise ConfigError("expected an object", name)
        _check_keys(value, DEFAULTS[name], name)
        return {**DEFAULTS[name], **value}
    return copy.deepcopy(value)


def _positive(value, where, integer=False):
    kind = int if integer else (int, float)
    if isinstance(value, bool) or not isinstance(value, kind) or not value > 0:
        raise ConfigError(f"must be a positive {'integer' if integer else 'number'}, got {value!r}",
                          where)
    return value


def _parse_state(spec, d, where):
    if isinstance(spec, str):
        try:
            return preset_state(spec, d)
        except ValueError as exc:
            raise ConfigError(str(exc), where) from None
    if isinstance(spec, list):
        try:
            rows = [[complex(x[0], x[1]) if isinstance(x, list) else complex(x) for x in row]
                    for row in spec]
            M = np.array(rows, dtype=complex)
        except (TypeError, ValueError, IndexError):
            raise ConfigError("matrix entries must be numbers or [re, im] pairs", where) from None
        if M.shape != (d, d):
            raise ConfigError(f"expected a {d}x{d} matrix, got shape {M.shape}", where)
        try:
            return validate_density_matrix(M, herm_tol=1e-12, trace_tol=1e-12, psd_tol=1e-12)
        except InvalidStateError as exc:
            raise ConfigError(str(exc), where) from None
    raise ConfigError("expected a preset name or a matrix", where)


def parse_config(text, source="<config>"):
    """Validate a JSON run config and fill in defaults.

    Returns a plain dict; ``check`` and ``simulate`` both go through here,
    so every error is raised before any numerics start.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
                          source) from None
    if not isinstance(raw, dict):
        raise ConfigError("top level must be an object", source)
    _check_keys(raw, TOP_KEYS, "config")
    if raw.get("version") != CONFIG_VERSION:
        raise ConfigError(f"must be {CONFIG_VERSION}, got {raw.get('version')!r}", "version")
    method = raw.get("method")
    if method not in METHOD_NAMES:
        raise ConfigError(f"must be one of {METHOD_NAMES}, got {method!r}", "method")

    cfg = {"version": CONFIG_VERSION, "method": method}
    for name in DEFAULTS:
        cfg[name] = _merged(raw, name)

    model = cfg["model"]
    if model["name"] not in ("spin_boson", "qutrit_boson"):
        raise ConfigError(f"unknown model {model['name']!r}", "model.name")
    if model["name"] == "qutrit_boson":
        dw = _positive(model["delta_omega"], "model.delta_omega")
        if dw >= 2:
            raise ConfigError("must lie in (0, 2)", "model.delta_omega")
    elif "delta_omega" in raw.get("model", {}):
        raise ConfigError("only the qutrit_boson model takes delta_omega", "model.delta_omega")

    bath = cfg["bath"]
    if bath["kind"] not in KINDS:
        raise ConfigError(f"must be one of {KINDS}", "bath.kind")
    if model["name"] == "qutrit_boson" and bath["kind"] != "ohmic":
        raise ConfigError("the qutrit_boson model uses a plain ohmic bath", "bath.kind")
    _positive(bath["alpha"], "bath.alpha")
    T = bath["T_eff"]
    if isinstance(T, bool) or not isinstance(T, (int, float)) or not (T >= 0 and math.isfinite(T)):
        raise ConfigError(f"must be a finite number >= 0, got {T!r}", "bath.T_eff")
    if bath["kind"] == "ohmic":
        if bath["omega_c"] is not None:
            raise ConfigError("plain ohmic bath takes no omega_c", "bath.omega_c")
    else:
        _positive(bath["omega_c"], "bath.omega_c")
    if method == "exact-cutoff" and bath["kind"] == "ohmic":
        raise ConfigError("method 'exact-cutoff' requires a cut-off spectral density "
                          "(bath.kind is 'ohmic')", "method/bath.kind")

    grid = cfg["time_grid"]
    _positive(grid["t_max"], "time_grid.t_max")
    n = _positive(grid["n_points"], "time_grid.n_points", integer=True)
    if n < 2:
        raise ConfigError("must be >= 2", "time_grid.n_points")
    if grid["spacing"] not in ("linear", "log"):
        raise ConfigError("must be 'linear' or 'log'", "time_grid.spacing")
    if grid["spacing"] == "log":
        if grid["t_min"] is None:
            grid["t_min"] = grid["t_max"] * 1e-3
        _positive(grid["t_min"], "time_grid.t_min")
        if grid["t_min"] >= grid["t_max"]:
            raise ConfigError("must be below t_max", "time_grid.t_min")
    elif grid["t_min"] is not None:
        raise ConfigError("only used with log spacing", "time_grid.t_min")

    d = 2 if model["name"] == "spin_boson" else 3
    _parse_state(cfg["initial_state"], d, "initial_state")
    if cfg["observables"] is None:
        cfg["observables"] = [[r, c] for r in range(d) for c in range(r, d)]
    if not isinstance(cfg["observables"], list) or not cfg["observables"]:
        raise ConfigError("expected a non-empty list of [row, col] selectors", "observables")
    for sel in cfg["observables"]:
        if (not isinstance(sel, list) or len(sel) != 2
                or not all(isinstance(x, int) and 0 <= x < d for x in sel)):
            raise ConfigError(f"selector {sel!r} out of range for dimension {d}", "observables")

    if cfg["grouping"]["gap_threshold"] is not None:
        if method != "davies-local":
            raise ConfigError("gap_threshold only applies to method 'davies-local'",
                              "grouping.gap_threshold")
        _positive(cfg["grouping"]["gap_threshold"], "grouping.gap_threshold")

    q = cfg["quadrature"]
    for key in ("rel_tol", "abs_tol", "tail_epsilon"):
        _positive(q[key], f"quadrature.{key}")
    _positive(q["max_subdivisions"], "quadrature.max_subdivisions", integer=True)

    if cfg["witness"] is not None:
        w = cfg["witness"]
        if not isinstance(w, dict):
            raise ConfigError("expected an object", "witness")
        _check_keys(w, {"initial_state"}, "witness")
        if "initial_state" not in w:
            raise ConfigError("missing initial_state", "witness")
        _parse_state(w["initial_state"], d, "witness.initial_state")
    return cfg


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from None
    return parse_config(text, source=str(path))


def time_grid(cfg):
    g = cfg["time_grid"]
    if g["spacing"] == "linear":
        return np.linspace(0.0, g["t_max"], g["n_points"])
    return np.geomspace(g["t_min"], g["t_max"], g["n_points"])


def build(cfg):
    """System, bath, initial state and quadrature settings for a config."""
    b = cfg["bath"]
    if cfg["model"]["name"] == "spin_boson":
        system, bath = spin_boson(b["alpha"], b["T_eff"], b["kind"], b["omega_c"])
    else:
        system, bath = qutrit_boson(b["alpha"], b["T_eff"], cfg["model"]["delta_omega"])
    rho0 = _parse_state(cfg["initial_state"], system.dim, "initial_state")
    quad = QuadratureConfig(**cfg["quadrature"])
    return system, bath, rho0, quad


def _cptp_spot_checks(cfg, system, bath, quad, times, dec):
    method = cfg["method"].replace("-", "_")
    picks = sorted({int(k) for k in (1, len(times) // 2, len(times) - 1)})
    out = []
    for k in picks:
        t = float(times[k])
        if method in CUMULANT_METHODS:
            S = matrix_exp(cumulant_generator(dec, RateKernel(method, bath, quad), t))
        elif method == "davies_global":
            S = matrix_exp(t * davies_global_generator(dec, bath))
        else:
            grouping = group_frequencies(dec, cfg["grouping"]["gap_threshold"])
            S = matrix_exp(t * davies_local_generator(dec, grouping, bath, system.H))
        r = is_cptp(S)
        out.append({"t": t, "is_cptp": r.is_cptp, "min_choi_eigenvalue": r.min_eigenvalue,
                    "trace_defect": r.trace_defect})
    return out


def run(cfg):
    """Propagate a validated config; returns (dynamics, report dict)."""
    started = time.perf_counter()
    system, bath, rho0, quad = build(cfg)
    times = time_grid(cfg)
    dec = bohr_decompose(system)
    log = QuadratureLog()
    kw = dict(quadrature=quad, dec=dec, log=log,
              gap_threshold=cfg["grouping"]["gap_threshold"],
              metadata={"model": cfg["model"]["name"]})
    dyn = propagate(system, cfg["method"], rho0, times, bath, **kw)
    t_prop = time.perf_counter() - started

    report = {
        "config": cfg,
        "frequencies": dec.frequencies.tolist(),
        "diagnostics": [{"t": float(t), **d} for t, d in
                        zip(times, dyn.schrodinger.diagnostics())],
        "quadrature": log.as_dict(),
    }
    report["cptp_checks"] = _cptp_spot_checks(cfg, system, bath, quad, times, dec)
    if cfg["witness"] is not None:
        sigma0 = _parse_state(cfg["witness"]["initial_state"], system.dim, "witness.initial_state")
        other = propagate(system, cfg["method"], sigma0, times, bath, **kw)
        report["witness"] = nonmarkovianity_witness(dyn.schrodinger, other.schrodinger).as_dict()
    report["timings"] = {"propagation_s": t_prop, "total_s": time.perf_counter() - started}
    return dyn, report


def _header(selectors):
    cols = ["t"]
    for r, c in selectors:
        cols += [f"rho_{r}{c}_re", f"rho_{r}{c}_im", f"rho_{r}{c}_abs"]
    return cols


def _rows(series, selectors):
    table = observables(series, [tuple(s) for s in selectors])
    block = np.column_stack([series.times] + [table[f"rho_{r}{c}"] for r, c in selectors])
    return [[NUMBER_FORMAT % x for x in row] for row in block]


def write_series_csv(path, series, selectors):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_header(selectors))
        w.writerows(_rows(series, selectors))


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serialisable: {type(obj).__name__}")


def write_report(path, report):
    Path(path).write_text(json.dumps(report, indent=2, default=_json_default) + "\n")


def _fail(code, message, report_path=None, extra=None):
    print(f"error: {message}", file=sys.stderr)
    if report_path is not None:
        write_report(report_path, {"status": "failed", "exit_code": code, "error": message,
                                   **(extra or {})})
    return code


def cmd_check(args):
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    print(f"{args.config}: ok ({cfg['method']}, {cfg['model']['name']}, "
          f"{cfg['time_grid']['n_points']} points)")
    return EXIT_OK


def cmd_simulate(args):
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    out = Path(args.out or cfg["output"]["dir"])
    out.mkdir(parents=True, exist_ok=True)
    prefix = cfg["output"]["prefix"]
    report_path = Path(args.report) if args.report else out / f"{prefix}_report.json"
    try:
        dyn, report = run(cfg)
    except InvariantViolation as exc:
        return _fail(EXIT_INVARIANT, str(exc), report_path, {"diagnostics": exc.diagnostics})
    except QuadratureError as exc:
        return _fail(EXIT_NUMERICAL, str(exc), report_path,
                     {"worst_interval": exc.interval, "achieved": exc.achieved})
    except (np.linalg.LinAlgError, FloatingPointError, InvalidStateError) as exc:
        return _fail(EXIT_NUMERICAL, str(exc), report_path)
    for series in dyn:
        write_series_csv(out / f"{prefix}_{series.picture}.csv", series, cfg["observables"])
    bad = [c for c in report["cptp_checks"] if not c["is_cptp"]]
    report["status"] = "invariant_violation" if bad else "ok"
    write_report(report_path, report)
    if bad:
        print(f"error: CPTP spot check failed at t={bad[0]['t']}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_compare(args):
    try:
        cfgs = [load_config(p) for p in args.configs]
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    ref = cfgs[0]
    for path, cfg in zip(args.configs[1:], cfgs[1:]):
        for key in ("model", "time_grid", "initial_state", "observables"):
            if cfg[key] != ref[key]:
                return _fail(EXIT_CONFIG, f"{path}: {key} differs from {args.configs[0]}")
    results = []
    for cfg in cfgs:
        try:
            dyn, _ = run(cfg)
        except InvariantViolation as exc:
            return _fail(EXIT_INVARIANT, str(exc))
        except (QuadratureError, np.linalg.LinAlgError, FloatingPointError) as exc:
            return _fail(EXIT_NUMERICAL, str(exc))
        results.append((cfg["method"], getattr(dyn, args.picture)))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method"] + _header(ref["observables"]))
        for method, series in results:
            for row in _rows(series, ref["observables"]):
                w.writerow([method] + row)
    return EXIT_OK


def make_parser():
    p = argparse.ArgumentParser(prog="cumulant-dynamics",
                                description="Open-system dynamics from a JSON run config.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("simulate", help="run one config, write CSV series and a JSON report")
    s.add_argument("config")
    s.add_argument("--out", help="output directory (default: output.dir of the config)")
    s.add_argument("--report", help="report path (default: <out>/<prefix>_report.json)")
    s.set_defaults(func=cmd_simulate)
    c = sub.add_parser("compare", help="overlay several configs in one CSV with a method column")
    c.add_argument("configs", nargs="+")
    c.add_argument("--out", default="compare.csv")
    c.add_argument("--picture", choices=("schrodinger", "interaction"), default="schrodinger")
    c.set_defaults(func=cmd_compare)
    k = sub.add_parser("check", help="validate a config without running it")
    k.add_argument("config")
    k.set_defaults(func=cmd_check)
    return p


def main(argv=None):
    args = make_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
