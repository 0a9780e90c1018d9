"""Spectra for the three motion modes, parameter sweeps and theorem checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from . import charfn
from .model import (
    LOADS_MOVING,
    STATIC,
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
from .rootfind import FewerRootsFound, RootSearchConfig, RootSearchError, find_eigenvalues


@dataclass
class SpectrumResult:
    lambdas: np.ndarray
    frequencies: np.ndarray
    mode: str
    t: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)


@dataclass
class SweepResult:
    parameter: str
    grid: np.ndarray
    lambdas: np.ndarray  # shape (len(grid), K); NaN marks a failed point
    frequencies: np.ndarray
    errors: dict = field(default_factory=dict)


def _solve_config(config, K):
    config = config or RootSearchConfig()
    if K is not None and K != config.count:
        config = replace(config, count=K)
    return config


def _cable_roots(instance, config, t=0.0, coupling=None, interface_sign=1.0):
    """Leading eigenvalues of a (possibly frozen-time) loaded cable."""
    if coupling is None:
        coupling = charfn.coupling_factor(instance)
    b = instance.intervals(t)
    if np.any(b <= 0.0):
        raise ValidationError("window", f"a load lies outside (0, l) at t={t!r}")
    masses = instance.masses
    rho = instance.cable.density
    c = coupling * interface_sign

    def f(lam):
        return charfn._characteristic_product(lam, b, masses, rho, c)

    counter = None
    if c > 0.0:

        def counter(lam):
            return charfn.prufer_count(lam, b, masses, rho, c)

    return find_eigenvalues(f, config, instance.length, counter)


def _result(instance, roots, mode, t=None, **diagnostics):
    a = wave_speed(instance.cable)
    lambdas = np.asarray(roots.roots, dtype=float)
    diagnostics.update(brackets_scanned=roots.brackets_scanned, warnings=list(roots.warnings))
    return SpectrumResult(lambdas, a * lambdas, mode, t, diagnostics)


def static_spectrum(instance: ProblemInstance, K=None, config=None, interface_sign=1.0):
    """Eigenvalues and natural frequencies of a cable with fixed loads.

    ``interface_sign`` exists only for fault injection; physical runs use 1.
    """
    config = _solve_config(config, K)
    roots = _cable_roots(instance, config, coupling=1.0, interface_sign=interface_sign)
    return _result(instance, roots, STATIC)


def moving_load_spectrum(instance, window: TimeWindow, K=None, config=None):
    """Frozen-time spectra at every sample of ``window``.

    A failed sample keeps whatever roots were found and carries the error
    message in ``diagnostics['error']``.
    """
    if instance.motion.mode != LOADS_MOVING:
        raise ValidationError("motion.mode", "moving_load_spectrum needs mode 'loads-moving'")
    window = validate_window(instance, window)
    config = _solve_config(config, K)
    a = wave_speed(instance.cable)
    out = []
    for t in window.times():
        t = float(t)
        try:
            roots = _cable_roots(instance, config, t=t)
        except FewerRootsFound as exc:
            lam = np.asarray(exc.found, dtype=float)
            out.append(SpectrumResult(lam, a * lam, LOADS_MOVING, t, {"error": str(exc)}))
            continue
        out.append(_result(instance, roots, LOADS_MOVING, t))
    return out


def linear_length(l0: float, rate: float) -> Callable[[float], float]:
    """Span length l(t) = l0 + rate * t."""
    return lambda t: l0 + rate * t


def moving_system_frequencies(
    cable: CableSpec,
    v: float,
    k_range,
    coriolis: bool = True,
    formula_mode: str = "corrected",
    length_fn: Optional[Callable[[float], float]] = None,
    t: float = 0.0,
) -> np.ndarray:
    """Natural frequencies of a bare cable whose whole span travels at speed v.

    With the Coriolis term: ``(pi k / l) (a^2 - v^2) / a``. Without it,
    ``(pi k / l) sqrt(a^2 - v^2)`` ("corrected") or
    ``(pi k / l) sqrt((a^2 - v^2) / a)`` ("as-printed").
    """
    a = wave_speed(cable)
    if not 0.0 <= v < a:
        raise ValidationError("motion.speed", f"supercritical speed: need 0 <= v < a={a!r}, got {v!r}")
    length = cable.length if length_fn is None else float(length_fn(t))
    if not length > 0.0:
        raise ValidationError("window", f"span length l(t) is not positive at t={t!r}")
    k = np.asarray(list(k_range), dtype=float)
    base = np.pi * k / length
    if coriolis:
        return base * (a * a - v * v) / a
    if formula_mode == "as-printed":
        return base * math.sqrt((a * a - v * v) / a)
    if formula_mode != "corrected":
        raise ValidationError("motion.frequency_formula", f"unknown formula {formula_mode!r}")
    return base * math.sqrt(a * a - v * v)


def parse_parameter(parameter: str) -> tuple[str, int]:
    """'speed', 'mass:i' or 'position:i' (index defaults to 0)."""
    name, _, index = parameter.partition(":")
    if name not in ("speed", "mass", "position"):
        raise ValidationError("param", f"unknown sweep parameter {parameter!r}")
    try:
        idx = int(index) if index else 0
    except ValueError:
        raise ValidationError("param", f"bad load index in {parameter!r}") from None
    return name, idx


def _apply(instance, name, idx, value):
    if name == "speed":
        motion = instance.motion
        if motion.mode == STATIC:
            motion = replace(motion, mode=LOADS_MOVING)
        return replace(instance, motion=replace(motion, speed=value))
    loads = list(instance.loads)
    if not 0 <= idx < len(loads):
        raise ValidationError("param", f"load index {idx} out of range ({len(loads)} loads)")
    if name == "mass":
        loads[idx] = replace(loads[idx], mass=value)
    else:
        loads[idx] = replace(loads[idx], position=value)
    return instance.with_loads(loads)


def sweep(instance, parameter: str, grid: Sequence[float], K=None, config=None, t=0.0):
    """Spectra over a one-parameter grid.

    ``instance`` is taken before validation so that a zero-mass load can be
    swept back into existence. Each point is validated on its own; failures
    leave a NaN row. The previous point's K-th root (times 1.5) is tried as
    scan ceiling before falling back to the default one.
    """
    name, idx = parse_parameter(parameter)
    config = _solve_config(config, K)
    K = config.count
    grid = np.asarray(grid, dtype=float)
    lambdas = np.full((len(grid), K), np.nan)
    freqs = np.full((len(grid), K), np.nan)
    errors = {}
    previous = None
    for i, value in enumerate(grid):
        try:
            point = validate(_apply(instance, name, idx, float(value)))
            roots = None
            if previous is not None and config.lambda_max is None:
                warm = replace(config, lambda_max=1.5 * previous)
                if warm.lambda_max < config.ceiling(point.length):
                    try:
                        roots = _cable_roots(point, warm, t=t)
                    except FewerRootsFound:
                        roots = None
            if roots is None:
                roots = _cable_roots(point, config, t=t)
        except (ValidationError, RootSearchError) as exc:
            errors[i] = str(exc)
            previous = None
            continue
        lam = np.asarray(roots.roots)
        lambdas[i] = lam
        freqs[i] = wave_speed(point.cable) * lam
        previous = lam[-1]
    return SweepResult(parameter, grid, lambdas, freqs, errors)


# --------------------------------------------------------------------------
# theorem checks


@dataclass
class CheckResult:
    name: str
    passed: bool
    trials: int
    worst_margin: float
    counterexample: Optional[dict] = None


@dataclass
class TheoremReport:
    seed: int
    trials: int
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


EQ_TOL = 1e-9
INEQ_TOL = 1e-10


def _random_cable(rng):
    return CableSpec(
        density=float(rng.uniform(0.5, 2.0)),
        tension=float(rng.uniform(0.5, 4.0)),
        length=float(rng.uniform(0.5, 2.0)),
    )


def _random_mass(rng, cable):
    ratio = 10.0 ** rng.uniform(-2.0, 2.0)
    return float(ratio * cable.density * cable.length)


def _describe(instance):
    return {
        "density": instance.cable.density,
        "tension": instance.cable.tension,
        "length": instance.cable.length,
        "loads": [{"mass": ld.mass, "position": ld.position} for ld in instance.loads],
        "speed": instance.motion.speed,
    }


class _Tracker:
    def __init__(self, name):
        self.name = name
        self.worst = math.inf
        self.counterexample = None
        self.trials = 0

    def record(self, margin, tol, payload):
        if margin < self.worst:
            self.worst = margin
        if margin < -tol and self.counterexample is None:
            self.counterexample = dict(payload, margin=margin)

    def fail(self, payload):
        self.worst = -math.inf
        if self.counterexample is None:
            self.counterexample = payload

    def result(self, tol):
        passed = self.counterexample is None and self.worst >= -tol
        return CheckResult(self.name, passed, self.trials, self.worst, self.counterexample)


def _safe(tracker, instance, fn):
    try:
        return fn()
    except (RootSearchError, ValidationError) as exc:
        tracker.fail({"instance": _describe(instance), "error": str(exc)})
        return None


def theorem_checks(seed: int = 0, trials: int = 100, interface_sign: float = 1.0) -> TheoremReport:
    """Randomized checks of the qualitative eigenvalue statements.

    Margins are relative; equality claims must hold to 1e-9 and inequality
    claims may be violated by at most 1e-10. Each check draws its instances
    from its own child generator so adding trials never reshuffles another
    check.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    children = np.random.SeedSequence(seed).spawn(6)
    rngs = [np.random.default_rng(s) for s in children]
    sign = interface_sign
    cfg = RootSearchConfig()

    # 1: midpoint load leaves every even eigenvalue of the bare cable in place
    t1 = _Tracker("theorem-1 even eigenvalues unchanged by a midpoint load")
    rng = rngs[0]
    for _ in range(trials):
        cable = _random_cable(rng)
        inst = validate(ProblemInstance(cable, (LoadSpec(_random_mass(rng, cable), cable.length / 2),)))
        t1.trials += 1
        res = _safe(t1, inst, lambda: static_spectrum(inst, 10, cfg, sign))
        if res is None:
            continue
        for k in range(1, 6):
            exact = 2 * math.pi * k / cable.length
            err = abs(res.lambdas[2 * k - 1] - exact) / exact
            t1.record(
                -err,
                EQ_TOL,
                {
                    "instance": _describe(inst),
                    "k": 2 * k,
                    "lambda": float(res.lambdas[2 * k - 1]),
                    "expected": exact,
                },
            )

    # 2: any single load lowers the first eigenvalue
    t2 = _Tracker("theorem-2 first eigenvalue below the bare value")
    rng = rngs[1]
    for _ in range(trials):
        cable = _random_cable(rng)
        pos = float(rng.uniform(0.02, 0.98)) * cable.length
        inst = validate(ProblemInstance(cable, (LoadSpec(_random_mass(rng, cable), pos),)))
        t2.trials += 1
        res = _safe(t2, inst, lambda: static_spectrum(inst, 1, cfg, sign))
        if res is None:
            continue
        bare = math.pi / cable.length
        t2.record(
            (bare - res.lambdas[0]) / bare,
            INEQ_TOL,
            {"instance": _describe(inst), "lambda_1": float(res.lambdas[0]), "bare": bare},
        )

    # 3: over a symmetric 21-point position grid the midpoint gives the lowest first eigenvalue
    t3 = _Tracker("theorem-3 midpoint load minimizes the first eigenvalue")
    rng = rngs[2]
    for _ in range(trials):
        cable = _random_cable(rng)
        mass = _random_mass(rng, cable)
        t3.trials += 1
        firsts = []
        for j in range(1, 22):
            inst = validate(ProblemInstance(cable, (LoadSpec(mass, cable.length * j / 22),)))
            res = _safe(t3, inst, lambda: static_spectrum(inst, 1, cfg, sign))
            firsts.append(np.nan if res is None else res.lambdas[0])
        firsts = np.array(firsts)
        if np.isnan(firsts).any():
            continue
        mid = firsts[10]
        j = int(np.argmin(firsts))
        t3.record(
            (firsts[j] - mid) / mid + 0.0,
            INEQ_TOL,
            {
                "cable": _describe(validate(ProblemInstance(cable))),
                "mass": mass,
                "midpoint_lambda_1": float(mid),
                "best_position": cable.length * (j + 1) / 22,
                "best_lambda_1": float(firsts[j]),
            },
        )

    # 4: loads never raise any eigenvalue
    t4 = _Tracker("theorem-4 loaded eigenvalues never exceed bare ones")
    rng = rngs[3]
    for _ in range(trials):
        cable = _random_cable(rng)
        n = int(rng.integers(1, 5))
        pos = np.sort(rng.uniform(0.02, 0.98, size=n)) * cable.length
        loads = tuple(LoadSpec(_random_mass(rng, cable), float(p)) for p in pos)
        try:
            inst = validate(ProblemInstance(cable, loads))
        except ValidationError:
            continue
        t4.trials += 1
        res = _safe(t4, inst, lambda: static_spectrum(inst, 8, cfg, sign))
        if res is None:
            continue
        bare = np.pi * np.arange(1, 9) / cable.length
        margins = (bare - res.lambdas) / bare
        k = int(np.argmin(margins))
        t4.record(
            float(margins[k]),
            INEQ_TOL,
            {
                "instance": _describe(inst),
                "k": k + 1,
                "lambda": float(res.lambdas[k]),
                "bare": float(bare[k]),
            },
        )

    # proposition: a single moving load lowers the eigenvalues as its speed grows
    tp = _Tracker("proposition eigenvalues decrease with load speed")
    rng = rngs[4]
    for _ in range(trials):
        cable = _random_cable(rng)
        a = wave_speed(cable)
        pos = float(rng.uniform(0.02, 0.98)) * cable.length
        load = (LoadSpec(_random_mass(rng, cable), pos),)
        tp.trials += 1
        rows = []
        for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
            inst = validate(ProblemInstance(cable, load, MotionSpec(mode=LOADS_MOVING, speed=frac * a)))

            def run():
                roots = _cable_roots(inst, replace(cfg, count=4), interface_sign=sign)
                return np.asarray(roots.roots)

            lam = _safe(tp, inst, run)
            if lam is None:
                break
            rows.append(lam)
        if len(rows) < 5:
            continue
        rows = np.array(rows)
        margins = (rows[:-1] - rows[1:]) / rows[:-1]
        i, k = np.unravel_index(int(np.argmin(margins)), margins.shape)
        tp.record(
            float(margins[i, k]),
            INEQ_TOL,
            {
                "cable": _describe(validate(ProblemInstance(cable))),
                "load": _describe(inst)["loads"],
                "k": int(k) + 1,
                "speeds": [f * a for f in (0.0, 0.25, 0.5, 0.75, 1.0)],
                "lambdas": rows[:, k].tolist(),
            },
        )

    # whole-span motion: speed lowers and a shrinking span raises the frequencies
    tw = _Tracker("whole-system frequencies fall with speed and rise as the span shrinks")
    rng = rngs[5]
    for _ in range(trials):
        cable = _random_cable(rng)
        a = wave_speed(cable)
        tw.trials += 1
        speeds = np.sort(rng.uniform(0.0, 0.99, size=6)) * a
        shrink = linear_length(cable.length, -float(rng.uniform(0.01, 0.5)) * cable.length)
        for coriolis, formula in ((True, "corrected"), (False, "corrected"), (False, "as-printed")):
            w = np.array([moving_system_frequencies(cable, v, [1, 2, 3], coriolis, formula) for v in speeds])
            dv = (w[:-1] - w[1:]) / w[:-1]
            tw.record(
                float(dv.min()),
                INEQ_TOL,
                {
                    "cable": _describe(validate(ProblemInstance(cable))),
                    "coriolis": coriolis,
                    "formula": formula,
                    "speeds": speeds.tolist(),
                },
            )
            w0 = moving_system_frequencies(cable, speeds[0], [1], coriolis, formula, shrink, 0.0)
            w1 = moving_system_frequencies(cable, speeds[0], [1], coriolis, formula, shrink, 1.0)
            tw.record(
                float((w1[0] - w0[0]) / w0[0]),
                INEQ_TOL,
                {
                    "cable": _describe(validate(ProblemInstance(cable))),
                    "coriolis": coriolis,
                    "formula": formula,
                    "shrinking": True,
                },
            )

    checks = [t.result(EQ_TOL if t is t1 else INEQ_TOL) for t in (t1, t2, t3, t4, tp, tw)]
    return TheoremReport(seed=seed, trials=trials, checks=checks)
