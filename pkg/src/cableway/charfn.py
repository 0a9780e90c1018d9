"""Fundamental functions, transfer maps and characteristic functions.

The state carried along the cable is ``(X, X')``. Inside a continuity
interval of length ``b`` it is propagated by

    [[cos(lam b), sin(lam b)/lam], [-lam sin(lam b), cos(lam b)]]

and across a point mass ``m`` the displacement is continuous while the
slope drops by ``coupling * m * lam**2 / rho`` times the displacement.
Eigenvalues are the positive zeros of ``X(l)`` for the start state (0, 1).

Every function accepts a scalar or an array of ``lam`` values.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .model import LOADS_MOVING, ProblemInstance, wave_speed


class FundamentalPair(NamedTuple):
    s_value: np.ndarray
    t_value: np.ndarray


def _sinc_length(lam, b):
    """sin(lam*b)/lam, equal to b at lam == 0."""
    # np.sinc(x) = sin(pi x)/(pi x)
    return b * np.sinc(np.asarray(lam, dtype=float) * b / np.pi)


def normal_fundamental_pair(lam, b) -> FundamentalPair:
    lam = np.asarray(lam, dtype=float)
    return FundamentalPair(np.cos(lam * b), _sinc_length(lam, b))


def interval_transfer(lam, b) -> np.ndarray:
    """2x2 transfer matrix of a load-free stretch (shape ``lam.shape + (2, 2)``)."""
    lam = np.asarray(lam, dtype=float)
    c = np.cos(lam * b)
    s = np.sin(lam * b)
    out = np.empty(lam.shape + (2, 2))
    out[..., 0, 0] = c
    out[..., 0, 1] = _sinc_length(lam, b)
    out[..., 1, 0] = -lam * s
    out[..., 1, 1] = c
    return out


def load_interface(lam, m, rho, coupling=1.0) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    out = np.zeros(lam.shape + (2, 2))
    out[..., 0, 0] = 1.0
    out[..., 1, 1] = 1.0
    out[..., 1, 0] = -coupling * m * lam**2 / rho
    return out


def coupling_factor(instance: ProblemInstance) -> float:
    """Inertial coupling applied to every load for the instance's motion mode."""
    motion = instance.motion
    if motion.mode != LOADS_MOVING:
        return 1.0
    a = wave_speed(instance.cable)
    v = motion.speed
    if motion.factor_mode == "as-printed":
        return a * a + v * v
    return 1.0 + (v / a) ** 2


def _characteristic_product(lam, intervals, masses, rho, coupling):
    lam = np.asarray(lam, dtype=float)
    state = np.zeros(lam.shape + (2,))
    state[..., 1] = 1.0
    for i, b in enumerate(intervals):
        if i > 0:
            state = np.einsum("...ij,...j->...i", load_interface(lam, masses[i - 1], rho, coupling), state)
        state = np.einsum("...ij,...j->...i", interval_transfer(lam, b), state)
    return state[..., 0]


def characteristic_static(lam, instance: ProblemInstance):
    """X(l) built from explicit 2x2 matrix products."""
    return _characteristic_product(lam, instance.intervals(), instance.masses, instance.cable.density, 1.0)


def characteristic_recurrence(lam, instance: ProblemInstance):
    """X(l) from the scalar two-term recurrence over the load sequence."""
    lam = np.asarray(lam, dtype=float)
    rho = instance.cable.density
    b = instance.intervals()
    masses = instance.masses
    psi1 = np.zeros_like(lam)
    psi2 = np.ones_like(lam)
    n = len(b)
    for i in range(n - 1):
        s, t = normal_fundamental_pair(lam, b[i])
        m = masses[i]
        psi1, psi2 = (
            psi1 * s + psi2 * t,
            (-psi1 * (rho * lam**2 * t + m * lam**2 * s) + psi2 * (rho * s - m * lam**2 * t)) / rho,
        )
    s, t = normal_fundamental_pair(lam, b[n - 1])
    return psi1 * s + psi2 * t


def closed_form_two_mass(lam, m1, m2, b1, b2, b3, rho):
    lam = np.asarray(lam, dtype=float)
    length = b1 + b2 + b3
    sin = np.sin
    return (
        _sinc_length(lam, length)
        - m1 / rho * sin(lam * b1) * sin(lam * (b2 + b3))
        - m2 / rho * sin(lam * (b1 + b2)) * sin(lam * b3)
        + m1 * m2 * lam / rho**2 * sin(lam * b1) * sin(lam * b2) * sin(lam * b3)
    )


def characteristic_moving_loads(lam, instance: ProblemInstance, t: float):
    """Frozen-time characteristic function with loads at ``l_i + v t``."""
    b = instance.intervals(t)
    if np.any(b <= 0.0):
        raise ValueError(f"a load lies outside (0, l) at t={t!r}")
    return _characteristic_product(lam, b, instance.masses, instance.cable.density, coupling_factor(instance))


def prufer_count(lam, intervals, masses, rho, coupling=1.0):
    """Number of eigenvalues strictly below ``lam``.

    Tracks the angle of ``(X, X'/lam)``: it advances by ``lam*b`` on each
    interval and a point mass pushes it forward without leaving its current
    strip of width pi. Eigenvalue k sits where the final angle equals k*pi.
    Only valid for non-negative ``coupling * masses``.
    """
    lam = np.asarray(lam, dtype=float)
    theta = np.zeros_like(lam)
    for i, b in enumerate(intervals):
        if i > 0:
            g = coupling * masses[i - 1] * lam / rho
            k = np.floor(theta / np.pi)
            phi = theta - k * np.pi
            sp, cp = np.sin(phi), np.cos(phi)
            theta = k * np.pi + np.where(phi == 0.0, 0.0, np.arctan2(sp, cp - g * sp))
        theta = theta + lam * b
    return np.maximum(np.ceil(theta / np.pi) - 1.0, 0.0).astype(int)
