"""Problem description for a taut cable carrying point loads.

Units are whatever the caller uses consistently; nothing is converted.
All types are frozen dataclasses, so a validated instance can be shared
freely between workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

STATIC = "static"
LOADS_MOVING = "loads-moving"
SYSTEM_MOVING = "system-moving"
MODES = (STATIC, LOADS_MOVING, SYSTEM_MOVING)

FACTOR_MODES = ("normalized", "as-printed")
FREQUENCY_FORMULAS = ("corrected", "as-printed")


class ValidationError(ValueError):
    """Raised when a problem description violates a physical constraint.

    ``field`` names the offending input (dotted path) so that callers such
    as the CLI can point at it.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


@dataclass(frozen=True)
class CableSpec:
    density: float
    tension: float
    length: float


@dataclass(frozen=True)
class LoadSpec:
    mass: float
    position: float


@dataclass(frozen=True)
class MotionSpec:
    mode: str = STATIC
    speed: float = 0.0
    coriolis: bool = True
    factor_mode: str = "normalized"
    frequency_formula: str = "corrected"
    length_rate: float = 0.0


@dataclass(frozen=True)
class TimeWindow:
    t0: float = 0.0
    t1: float = 0.0
    steps: int = 1

    def times(self) -> np.ndarray:
        """Sample times, ``steps`` points from t0 to t1 inclusive."""
        if self.steps == 1:
            return np.array([self.t0])
        return np.linspace(self.t0, self.t1, self.steps)


@dataclass(frozen=True)
class ProblemInstance:
    cable: CableSpec
    loads: tuple[LoadSpec, ...] = ()
    motion: MotionSpec = field(default_factory=MotionSpec)

    @property
    def length(self) -> float:
        return self.cable.length

    @property
    def masses(self) -> np.ndarray:
        return np.array([ld.mass for ld in self.loads], dtype=float)

    @property
    def positions(self) -> np.ndarray:
        return np.array([ld.position for ld in self.loads], dtype=float)

    def intervals(self, t: float = 0.0) -> np.ndarray:
        """Lengths of the continuity intervals between consecutive loads.

        For a loads-moving instance the loads are shifted by ``speed * t``.
        """
        pos = self.positions
        if self.motion.mode == LOADS_MOVING:
            pos = pos + self.motion.speed * t
        edges = np.concatenate(([0.0], pos, [self.cable.length]))
        return np.diff(edges)

    def with_loads(self, loads) -> ProblemInstance:
        return replace(self, loads=tuple(loads))


def wave_speed(cable: CableSpec) -> float:
    return math.sqrt(cable.tension / cable.density)


def _positive(value, name):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(name, f"expected a number, got {value!r}") from None
    if not math.isfinite(value) or value <= 0.0:
        raise ValidationError(name, f"must be positive and finite, got {value!r}")
    return value


def _validate_cable(cable: CableSpec) -> CableSpec:
    return CableSpec(
        density=_positive(cable.density, "cable.density"),
        tension=_positive(cable.tension, "cable.tension"),
        length=_positive(cable.length, "cable.length"),
    )


def _validate_motion(motion: MotionSpec, a: float) -> MotionSpec:
    if motion.mode not in MODES:
        raise ValidationError("motion.mode", f"must be one of {MODES}, got {motion.mode!r}")
    if motion.factor_mode not in FACTOR_MODES:
        raise ValidationError(
            "motion.factor_mode", f"must be one of {FACTOR_MODES}, got {motion.factor_mode!r}"
        )
    if motion.frequency_formula not in FREQUENCY_FORMULAS:
        raise ValidationError(
            "motion.frequency_formula",
            f"must be one of {FREQUENCY_FORMULAS}, got {motion.frequency_formula!r}",
        )
    speed = float(motion.speed)
    if not math.isfinite(speed) or speed < 0.0:
        raise ValidationError("motion.speed", f"must be non-negative and finite, got {speed!r}")
    if motion.mode == SYSTEM_MOVING and speed >= a:
        raise ValidationError(
            "motion.speed", f"supercritical speed: v={speed!r} must be below wave speed a={a!r}"
        )
    rate = float(motion.length_rate)
    if not math.isfinite(rate):
        raise ValidationError("motion.length_rate", "must be finite")
    return replace(motion, speed=speed, length_rate=rate, coriolis=bool(motion.coriolis))


def validate(instance: ProblemInstance) -> ProblemInstance:
    """Check every invariant and return a normalized copy.

    Zero-mass loads are dropped (their interface map is the identity).
    Positions must lie strictly inside (0, l) and be strictly increasing;
    coincident loads are rejected rather than merged.
    """
    cable = _validate_cable(instance.cable)
    a = wave_speed(cable)
    motion = _validate_motion(instance.motion, a)

    loads = []
    previous = 0.0
    for i, load in enumerate(instance.loads):
        name = f"loads[{i}]"
        try:
            mass = float(load.mass)
            pos = float(load.position)
        except (TypeError, ValueError):
            raise ValidationError(name, "mass and position must be numbers") from None
        if not math.isfinite(mass) or mass < 0.0:
            raise ValidationError(f"{name}.mass", f"must be non-negative and finite, got {mass!r}")
        if not math.isfinite(pos) or not 0.0 < pos < cable.length:
            raise ValidationError(
                f"{name}.position", f"must lie strictly inside (0, {cable.length!r}), got {pos!r}"
            )
        if i > 0 and pos <= previous:
            raise ValidationError(
                f"{name}.position",
                f"positions must be strictly increasing; {pos!r} follows {previous!r}",
            )
        previous = pos
        if mass > 0.0:
            loads.append(LoadSpec(mass=mass, position=pos))

    return ProblemInstance(cable=cable, loads=tuple(loads), motion=motion)


def validate_window(instance: ProblemInstance, window: TimeWindow) -> TimeWindow:
    """Check a time window against an already validated instance."""
    t0, t1 = float(window.t0), float(window.t1)
    if not (math.isfinite(t0) and math.isfinite(t1)) or t1 < t0:
        raise ValidationError("window", f"need finite t0 <= t1, got t0={t0!r}, t1={t1!r}")
    steps = window.steps
    if isinstance(steps, bool) or not isinstance(steps, (int, np.integer)) or steps < 1:
        raise ValidationError("window.steps", f"must be a positive integer, got {steps!r}")
    motion = instance.motion
    length = instance.cable.length
    if motion.mode == LOADS_MOVING and instance.loads:
        # positions are linear in t, so the end points bound the excursion
        for t in (t0, t1):
            shifted = instance.positions + motion.speed * t
            if shifted.min() <= 0.0 or shifted.max() >= length:
                raise ValidationError(
                    "window", f"a load leaves the open cable interval (0, {length!r}) at t={t!r}"
                )
    if motion.mode == SYSTEM_MOVING:
        for t in (t0, t1):
            if length + motion.length_rate * t <= 0.0:
                raise ValidationError("window", f"span length l(t) is not positive at t={t!r}")
    return TimeWindow(t0=t0, t1=t1, steps=int(steps))
