"""Normal fundamental systems for piecewise first-order linear boundary problems.

A system ``z' = A(y, lam) z`` of even dimension N = 2m lives on breakpoints
``y_0 < ... < y_n``. On every interval the fundamental matrix starts from the
identity and is integrated with fixed-step classical RK4; between intervals
the state passes through a linear interface map. Half of the components
vanish at each end, so the m admissible starting columns are propagated to
``y_n`` and the determinant of their vanishing-component block is the
characteristic function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import charfn
from .model import ProblemInstance
from .rootfind import RootList, RootSearchConfig, find_eigenvalues

DEFAULT_STEPS = 1000


@dataclass(frozen=True)
class FirstOrderSystem:
    """Piecewise linear first-order system with split two-point conditions.

    ``coefficient_field(y, lam)`` must return the N x N coefficient matrix;
    it may also receive a 1-D array of ``y`` and return shape (len(y), N, N),
    which is much faster. ``interface_maps[i](lam)`` maps the state from
    interval i to interval i+1 at ``breakpoints[i+1]``.
    """

    dimension: int
    breakpoints: tuple[float, ...]
    coefficient_field: Callable
    interface_maps: tuple[Callable, ...] = ()
    left_zero_indices: tuple[int, ...] = (0,)
    right_zero_indices: tuple[int, ...] = (0,)

    def __post_init__(self):
        N = self.dimension
        if N < 2 or N % 2:
            raise ValueError(f"dimension must be even and positive, got {N}")
        m = N // 2
        for name in ("left_zero_indices", "right_zero_indices"):
            idx = getattr(self, name)
            if len(idx) != m or len(set(idx)) != m or not all(0 <= i < N for i in idx):
                raise ValueError(f"{name} must hold {m} distinct indices in [0, {N})")
        y = np.asarray(self.breakpoints, dtype=float)
        if y.ndim != 1 or len(y) < 2 or np.any(np.diff(y) <= 0):
            raise ValueError("breakpoints must be strictly increasing with at least two entries")
        if len(self.interface_maps) != len(y) - 2:
            raise ValueError(
                f"need {len(y) - 2} interface maps for {len(y) - 1} intervals, got {len(self.interface_maps)}"
            )

    @property
    def n_intervals(self) -> int:
        return len(self.breakpoints) - 1


def _field_at(system, ys, lam):
    N = system.dimension
    try:
        a = np.asarray(system.coefficient_field(ys, lam), dtype=float)
        return np.broadcast_to(a, (len(ys), N, N))
    except (TypeError, ValueError):
        return np.array([system.coefficient_field(float(y), lam) for y in ys], dtype=float)


def _chain_product(mats):
    """mats[-1] @ ... @ mats[0] by pairwise reduction."""
    while len(mats) > 1:
        odd = mats[-1:] if len(mats) % 2 else None
        mats = mats[1 : len(mats) - (len(mats) % 2) : 2] @ mats[0 : len(mats) - 1 : 2]
        if odd is not None:
            mats = np.concatenate([mats, odd])
    return mats[0]


def integrate_fundamental(system, interval_index, lam, steps=DEFAULT_STEPS):
    """Fundamental matrix of one interval evaluated at its right end.

    Classical RK4 with ``steps`` equal steps; since the equation is linear
    each step is a fixed matrix and the steps are multiplied together.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    y0 = system.breakpoints[interval_index]
    y1 = system.breakpoints[interval_index + 1]
    h = (y1 - y0) / steps
    nodes = y0 + h * 0.5 * np.arange(2 * steps + 1)
    nodes[-1] = y1
    A = _field_at(system, nodes, lam)
    A1, A2, A3 = A[0:-1:2], A[1::2], A[2::2]
    eye = np.eye(system.dimension)
    K1 = A1
    K2 = A2 @ (eye + 0.5 * h * K1)
    K3 = A2 @ (eye + 0.5 * h * K2)
    K4 = A3 @ (eye + h * K3)
    steps_mats = eye + (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4)
    return _chain_product(steps_mats)


def _determinant_scalar(system, lam, steps):
    N = system.dimension
    free = [j for j in range(N) if j not in system.left_zero_indices]
    Z = np.eye(N)[:, free]
    for i in range(system.n_intervals):
        if i > 0:
            Z = np.asarray(system.interface_maps[i - 1](lam), dtype=float) @ Z
        Z = integrate_fundamental(system, i, lam, steps) @ Z
    return float(np.linalg.det(Z[list(system.right_zero_indices), :]))


def determinant_D(system, lam, steps_per_interval=DEFAULT_STEPS):
    """Characteristic determinant; accepts a scalar or an array of ``lam``."""
    lam_arr = np.asarray(lam, dtype=float)
    if lam_arr.ndim == 0:
        return _determinant_scalar(system, float(lam_arr), steps_per_interval)
    flat = [_determinant_scalar(system, float(x), steps_per_interval) for x in lam_arr.ravel()]
    return np.array(flat).reshape(lam_arr.shape)


def eigenvalues_general(
    system,
    config: RootSearchConfig,
    steps_per_interval=DEFAULT_STEPS,
    length: Optional[float] = None,
) -> RootList:
    length = length or (system.breakpoints[-1] - system.breakpoints[0])
    return find_eigenvalues(lambda x: determinant_D(system, x, steps_per_interval), config, length)


def _cable_field(y, lam):
    a = np.zeros(np.shape(y) + (2, 2))
    a[..., 0, 1] = 1.0
    a[..., 1, 0] = -lam * lam
    return a


def cable_system(instance: ProblemInstance, coupling: float = 1.0, t: float = 0.0):
    """The loaded cable as a 2-dimensional first-order system (state X, X')."""
    b = instance.intervals(t)
    breakpoints = tuple(np.concatenate(([0.0], np.cumsum(b[:-1]), [instance.length])))
    rho = instance.cable.density

    def interface(m):
        return lambda lam: charfn.load_interface(lam, m, rho, coupling)

    return FirstOrderSystem(
        dimension=2,
        breakpoints=breakpoints,
        coefficient_field=_cable_field,
        interface_maps=tuple(interface(m) for m in instance.masses),
        left_zero_indices=(0,),
        right_zero_indices=(0,),
    )


def merged_system(system: FirstOrderSystem, keep: Sequence[int]) -> FirstOrderSystem:
    """Drop interior breakpoints whose interface is the identity.

    ``keep`` lists the indices of interior breakpoints to retain.
    """
    keep = sorted(keep)
    y = system.breakpoints
    return FirstOrderSystem(
        dimension=system.dimension,
        breakpoints=(y[0], *(y[i + 1] for i in keep), y[-1]),
        coefficient_field=system.coefficient_field,
        interface_maps=tuple(system.interface_maps[i] for i in keep),
        left_zero_indices=system.left_zero_indices,
        right_zero_indices=system.right_zero_indices,
    )
