"""Command-line front end.

Configuration is a single JSON document; see README.md for the schema.
Exit codes: 0 ok, 1 configuration error, 2 root-search shortfall,
3 oracle mismatch, 4 theorem failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import oracle, spectra
from .model import (
    LOADS_MOVING,
    STATIC,
    SYSTEM_MOVING,
    CableSpec,
    LoadSpec,
    MotionSpec,
    ProblemInstance,
    TimeWindow,
    ValidationError,
    validate,
    validate_window,
    wave_speed,
)
from .rootfind import FewerRootsFound, RootSearchConfig, RootSearchError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ROOTS = 2
EXIT_ORACLE = 3
EXIT_THEOREM = 4

SCHEMA = {
    "cable": {"density", "tension", "length"},
    "loads": {"mass", "position"},
    "motion": {"mode", "speed", "coriolis", "factor_mode", "frequency_formula", "length_rate"},
    "solve": {"count", "lambda_max", "oversample", "tol_rel", "max_iter"},
    "window": {"t0", "t1", "steps"},
    "oracle": {"nodes", "threshold"},
    "sweep": {"param", "from", "to", "steps"},
    "verify": {"seed", "trials"},
    "output": {"format", "path"},
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    instance: ProblemInstance
    solve: RootSearchConfig
    window: TimeWindow = TimeWindow()
    oracle_nodes: int = 2000
    oracle_threshold: float = 5e-3
    sweep: dict = field(default_factory=dict)
    seed: int = 0
    trials: int = 50
    format: str = "table"
    path: Optional[str] = None
    raw_instance: Optional[ProblemInstance] = None  # before validation, for sweeps


def _section(doc, name):
    value = doc.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(f"{name}: expected an object")
    unknown = set(value) - SCHEMA[name]
    if unknown:
        raise ConfigError(f"{name}: unknown key(s) {sorted(unknown)}")
    return value


def _typed(section, name, key, kind, default):
    if key not in section:
        return default
    value = section[key]
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{name}.{key}: expected true/false, got {value!r}")
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{name}.{key}: expected an integer, got {value!r}")
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name}.{key}: expected a number, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{name}.{key}: expected a string, got {value!r}")
    return value


def parse_config(doc: dict) -> RunConfig:
    """Strict conversion of a JSON document; unknown keys are errors."""
    if not isinstance(doc, dict):
        raise ConfigError("top level must be an object")
    unknown = set(doc) - set(SCHEMA)
    if unknown:
        raise ConfigError(f"unknown top-level key(s) {sorted(unknown)}")
    if "cable" not in doc:
        raise ConfigError("cable: section is required")

    c = _section(doc, "cable")
    missing = SCHEMA["cable"] - set(c)
    if missing:
        raise ConfigError(f"cable: missing key(s) {sorted(missing)}")
    cable = CableSpec(*(_typed(c, "cable", k, float, None) for k in ("density", "tension", "length")))

    raw_loads = doc.get("loads", [])
    if not isinstance(raw_loads, list):
        raise ConfigError("loads: expected an array")
    loads = []
    for i, item in enumerate(raw_loads):
        name = f"loads[{i}]"
        if not isinstance(item, dict):
            raise ConfigError(f"{name}: expected an object")
        extra = set(item) - SCHEMA["loads"]
        if extra:
            raise ConfigError(f"{name}: unknown key(s) {sorted(extra)}")
        if set(item) != SCHEMA["loads"]:
            raise ConfigError(f"{name}: needs both mass and position")
        loads.append(
            LoadSpec(_typed(item, name, "mass", float, None), _typed(item, name, "position", float, None))
        )

    m = _section(doc, "motion")
    d = MotionSpec()
    motion = MotionSpec(
        mode=_typed(m, "motion", "mode", str, d.mode),
        speed=_typed(m, "motion", "speed", float, d.speed),
        coriolis=_typed(m, "motion", "coriolis", bool, d.coriolis),
        factor_mode=_typed(m, "motion", "factor_mode", str, d.factor_mode),
        frequency_formula=_typed(m, "motion", "frequency_formula", str, d.frequency_formula),
        length_rate=_typed(m, "motion", "length_rate", float, d.length_rate),
    )

    s = _section(doc, "solve")
    d = RootSearchConfig()
    try:
        solve = RootSearchConfig(
            count=_typed(s, "solve", "count", int, d.count),
            lambda_max=_typed(s, "solve", "lambda_max", float, d.lambda_max),
            oversample=_typed(s, "solve", "oversample", int, d.oversample),
            tol_rel=_typed(s, "solve", "tol_rel", float, d.tol_rel),
            max_iter=_typed(s, "solve", "max_iter", int, d.max_iter),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"solve: {exc}") from None

    w = _section(doc, "window")
    window = TimeWindow(
        t0=_typed(w, "window", "t0", float, 0.0),
        t1=_typed(w, "window", "t1", float, 0.0),
        steps=_typed(w, "window", "steps", int, 1),
    )

    o = _section(doc, "oracle")
    sw = _section(doc, "sweep")
    sweep = {
        "param": _typed(sw, "sweep", "param", str, None),
        "from": _typed(sw, "sweep", "from", float, None),
        "to": _typed(sw, "sweep", "to", float, None),
        "steps": _typed(sw, "sweep", "steps", int, None),
    }
    v = _section(doc, "verify")
    out = _section(doc, "output")
    return RunConfig(
        instance=ProblemInstance(cable, tuple(loads), motion),
        solve=solve,
        window=window,
        oracle_nodes=_typed(o, "oracle", "nodes", int, 2000),
        oracle_threshold=_typed(o, "oracle", "threshold", float, 5e-3),
        sweep=sweep,
        seed=_typed(v, "verify", "seed", int, 0),
        trials=_typed(v, "verify", "trials", int, 50),
        format=_typed(out, "output", "format", str, "table"),
        path=_typed(out, "output", "path", str, None),
    )


# --------------------------------------------------------------------------
# output


def _fmt(x, fmt):
    if x is None or (isinstance(x, float) and np.isnan(x)):
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g" if fmt == "csv" else ".6g")


def render(header, rows, fmt):
    """CSV (17 significant digits) or an aligned text table (6 digits)."""
    cells = [[_fmt(x, fmt) if not isinstance(x, str) else x for x in row] for row in rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(cells)
        return buf.getvalue()
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(wd) for h, wd in zip(header, widths))]
    lines += ["  ".join(c.rjust(wd) for c, wd in zip(r, widths)) for r in cells]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# commands; each returns (exit code, text, notes)


def _frozen_time(cfg):
    return cfg.window.t0 if cfg.instance.motion.mode != STATIC else 0.0


def cmd_spectrum(cfg: RunConfig):
    inst = cfg.instance
    K = cfg.solve.count
    a = wave_speed(inst.cable)
    header = ["k", "lambda", "omega"]
    if inst.motion.mode == SYSTEM_MOVING:
        window = validate_window(inst, cfg.window)
        w = _system_frequencies(inst, window.t0, K)
        rows = [(k + 1, w[k] / a, w[k]) for k in range(K)]
        return EXIT_OK, render(header, rows, cfg.format), []
    t = _frozen_time(cfg)
    if inst.motion.mode == LOADS_MOVING:
        validate_window(inst, TimeWindow(t, t, 1))
    try:
        roots = spectra._cable_roots(inst, cfg.solve, t=t)
    except FewerRootsFound as exc:
        rows = [(k + 1, lam, a * lam) for k, lam in enumerate(exc.found)]
        return EXIT_ROOTS, render(header, rows, cfg.format), [f"warning: {exc}"]
    rows = [(k + 1, lam, a * lam) for k, lam in enumerate(roots.roots)]
    return EXIT_OK, render(header, rows, cfg.format), [f"warning: {w}" for w in roots.warnings]


def cmd_sweep(cfg: RunConfig):
    sw = cfg.sweep
    missing = [k for k in ("param", "from", "to", "steps") if sw.get(k) is None]
    if missing:
        raise ConfigError(f"sweep: missing {missing} (config section or --param/--from/--to/--steps)")
    if sw["steps"] < 1:
        raise ConfigError("sweep.steps: must be positive")
    spectra.parse_parameter(sw["param"])
    grid = np.linspace(sw["from"], sw["to"], sw["steps"])
    t = cfg.window.t0
    res = spectra.sweep(cfg.raw_instance, sw["param"], grid, config=cfg.solve, t=t)
    rows = []
    for i, value in enumerate(res.grid):
        for k in range(res.lambdas.shape[1]):
            rows.append((value, k + 1, res.lambdas[i, k], res.frequencies[i, k]))
    notes = [f"gap at {sw['param']}={float(res.grid[i])!r}: {msg}" for i, msg in sorted(res.errors.items())]
    code = EXIT_ROOTS if res.errors else EXIT_OK
    return code, render(["param", "k", "lambda", "omega"], rows, cfg.format), notes


def _system_frequencies(inst, t, K):
    m = inst.motion
    length_fn = spectra.linear_length(inst.length, m.length_rate)
    return spectra.moving_system_frequencies(
        inst.cable, m.speed, range(1, K + 1), m.coriolis, m.frequency_formula, length_fn, t
    )


def cmd_moving(cfg: RunConfig):
    inst = cfg.instance
    mode = inst.motion.mode
    if mode == STATIC:
        raise ConfigError("motion.mode: 'moving' needs 'loads-moving' or 'system-moving'")
    window = validate_window(inst, cfg.window)
    a = wave_speed(inst.cable)
    rows, notes, code = [], [], EXIT_OK
    if mode == SYSTEM_MOVING:
        for t in window.times():
            w = _system_frequencies(inst, float(t), cfg.solve.count)
            rows += [(float(t), k + 1, w[k] / a, w[k]) for k in range(len(w))]
    else:
        for res in spectra.moving_load_spectrum(inst, window, config=cfg.solve):
            rows += [(res.t, k + 1, lam, w) for k, (lam, w) in enumerate(zip(res.lambdas, res.frequencies))]
            if "error" in res.diagnostics:
                notes.append(f"warning at t={res.t!r}: {res.diagnostics['error']}")
                code = EXIT_ROOTS
    return code, render(["t", "k", "lambda", "omega"], rows, cfg.format), notes


def frozen_static_instance(inst: ProblemInstance, t: float) -> ProblemInstance:
    """Static twin of a loads-moving instance at time t (shifted loads, scaled masses)."""
    from .charfn import coupling_factor

    c = coupling_factor(inst)
    loads = [LoadSpec(ld.mass * c, ld.position + inst.motion.speed * t) for ld in inst.loads]
    return validate(ProblemInstance(inst.cable, tuple(loads), MotionSpec()))


def cmd_oracle(cfg: RunConfig):
    inst = cfg.instance
    if inst.motion.mode == SYSTEM_MOVING:
        raise ConfigError("motion.mode: the oracle covers static and loads-moving instances")
    t = _frozen_time(cfg)
    if inst.motion.mode == LOADS_MOVING:
        validate_window(inst, TimeWindow(t, t, 1))
    static = frozen_static_instance(inst, t)
    K = cfg.solve.count
    try:
        transfer = spectra.static_spectrum(static, K, cfg.solve).lambdas
        fd = np.asarray(oracle.fd_spectrum(static, cfg.oracle_nodes, K).roots)
    except oracle.DiscretizationError as exc:
        raise ConfigError(f"oracle.nodes: {exc}") from None
    except FewerRootsFound as exc:
        rows = [(k + 1, x) for k, x in enumerate(exc.found)]
        return EXIT_ROOTS, render(["k", "transfer"], rows, cfg.format), [f"warning: {exc}"]
    delta = fd - transfer
    rel = np.abs(delta) / transfer
    rows = [(k + 1, transfer[k], fd[k], abs(delta[k]), rel[k]) for k in range(K)]
    bad = rel > cfg.oracle_threshold
    notes = [
        f"mismatch: k={k + 1} relative delta {rel[k]:.3g} > {cfg.oracle_threshold:g}"
        for k in np.flatnonzero(bad)
    ]
    code = EXIT_ORACLE if bad.any() else EXIT_OK
    return code, render(["k", "transfer", "fd", "abs_delta", "rel_delta"], rows, cfg.format), notes


def cmd_verify(cfg: RunConfig, interface_sign: float = 1.0):
    if cfg.trials < 1:
        raise ConfigError(f"verify.trials: must be >= 1, got {cfg.trials}")
    report = spectra.theorem_checks(cfg.seed, cfg.trials, interface_sign=interface_sign)
    rows = [(c.name, "pass" if c.passed else "FAIL", c.trials, c.worst_margin) for c in report.checks]
    notes = [
        f"counterexample for {c.name}: {json.dumps(c.counterexample, sort_keys=True)}"
        for c in report.checks
        if not c.passed
    ]
    code = EXIT_OK if report.passed else EXIT_THEOREM
    return code, render(["check", "status", "trials", "worst_margin"], rows, cfg.format), notes


# --------------------------------------------------------------------------
# entry point


def build_parser():
    defaults = (
        "Config defaults: motion.mode=static, motion.speed=0, motion.coriolis=true, "
        "motion.factor_mode=normalized, motion.frequency_formula=corrected, "
        "motion.length_rate=0, solve.count=5, solve.lambda_max=(count+1)*pi/l, "
        "solve.oversample=16, solve.tol_rel=1e-12, solve.max_iter=200, window.t0=0, "
        "window.t1=0, window.steps=1, oracle.nodes=2000, oracle.threshold=5e-3, "
        "verify.seed=0, verify.trials=50, output.format=table."
    )
    parser = argparse.ArgumentParser(
        prog="cableway",
        description="Eigenvalues and natural frequencies of a taut cable with point loads.",
        epilog=defaults,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "spectrum": "first K eigenvalues and frequencies (k, lambda, omega)",
        "sweep": "spectra over a parameter grid, CSV param,k,lambda,omega",
        "moving": "eigenvalues over a time window, CSV t,k,lambda,omega",
        "oracle": "transfer method against the finite-difference oracle",
        "verify": "randomized checks of the eigenvalue theorems",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text, epilog=defaults)
        p.add_argument("--config", required=True, help="path to the JSON config file")
        p.add_argument("--format", choices=("table", "csv"), help="output format (default table)")
        p.add_argument("--output", help="write to this file instead of standard output")
        if name == "sweep":
            p.add_argument("--param", help="speed, mass:i or position:i")
            p.add_argument("--from", dest="start", type=float, help="first grid value")
            p.add_argument("--to", dest="stop", type=float, help="last grid value")
        if name in ("sweep", "moving"):
            p.add_argument("--steps", type=int, help="number of grid points / time samples")
        if name == "verify":
            p.add_argument("--seed", type=int, help="random seed (default 0)")
            p.add_argument("--trials", type=int, help="instances per check (default 50)")
            p.add_argument("--inject-fault", choices=("interface-sign",), help=argparse.SUPPRESS)
    return parser


def _load(args):
    try:
        with open(args.config, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    cfg = parse_config(doc)
    if args.format:
        cfg.format = args.format
    if cfg.format not in ("table", "csv"):
        raise ConfigError(f"output.format: must be table or csv, got {cfg.format!r}")
    if args.output:
        cfg.path = args.output
    if args.command == "sweep":
        for key, attr in (("param", "param"), ("from", "start"), ("to", "stop"), ("steps", "steps")):
            if getattr(args, attr) is not None:
                cfg.sweep[key] = getattr(args, attr)
    if args.command == "moving" and args.steps is not None:
        cfg.window = replace(cfg.window, steps=args.steps)
    if args.command == "verify":
        if args.seed is not None:
            cfg.seed = args.seed
        if args.trials is not None:
            cfg.trials = args.trials
    cfg.raw_instance = cfg.instance
    cfg.instance = validate(cfg.instance)
    return cfg


COMMANDS = {
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "moving": cmd_moving,
    "oracle": cmd_oracle,
}


def run(argv=None, stdout=None, stderr=None):
    """Run the CLI; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        if args.command == "verify":
            sign = -1.0 if args.inject_fault == "interface-sign" else 1.0
            code, text, notes = cmd_verify(cfg, sign)
        else:
            code, text, notes = COMMANDS[args.command](cfg)
    except (ConfigError, ValidationError) as exc:
        print(f"cableway: configuration error: {exc}", file=stderr)
        return EXIT_CONFIG
    except RootSearchError as exc:
        print(f"cableway: root search failed: {exc}", file=stderr)
        return EXIT_ROOTS
    if cfg.format == "csv":
        for note in notes:
            print(f"cableway: {note}", file=stderr)
    else:
        text += "".join(f"# {note}\n" for note in notes)
    if cfg.path:
        with open(cfg.path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
