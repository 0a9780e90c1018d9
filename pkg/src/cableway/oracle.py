"""Finite-difference check on the transfer-method spectrum.

The cable is cut into M equal cells. Stiffness is the fixed-end three-point
second difference scaled by T/h, mass is rho*h per node (half at the two
ends) and each point load is shared between its two neighbouring nodes in
proportion to proximity. With a diagonal mass the generalized problem
``K u = w^2 M u`` is congruent to a symmetric tridiagonal matrix, whose
lowest eigenvalues are found by Sturm-sequence bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ProblemInstance, wave_speed
from .rootfind import RootList


class DiscretizationError(ValueError):
    pass


@dataclass(frozen=True)
class DiscretizedProblem:
    nodes: np.ndarray
    h: float
    stiffness_diag: np.ndarray  # interior nodes only
    stiffness_off: np.ndarray
    mass: np.ndarray  # all M+1 nodes, boundary entries included

    @property
    def interior_mass(self) -> np.ndarray:
        return self.mass[1:-1]

    def stiffness_matrix(self) -> np.ndarray:
        """Dense interior stiffness, for inspection and tests."""
        return np.diag(self.stiffness_diag) + np.diag(self.stiffness_off, 1) + np.diag(self.stiffness_off, -1)


def discretize(instance: ProblemInstance, M: int) -> DiscretizedProblem:
    if M < 10:
        raise DiscretizationError(f"need at least 10 cells, got M={M}")
    length = instance.length
    rho = instance.cable.density
    T = instance.cable.tension
    h = length / M
    nodes = np.linspace(0.0, length, M + 1)

    positions = instance.positions
    for p, q in zip(positions[:-1], positions[1:]):
        between = math.ceil(q / h - 1e-12) - math.floor(p / h + 1e-12) - 1
        if between < 2:
            raise DiscretizationError(f"M={M} leaves fewer than 2 nodes between loads at {p!r} and {q!r}")

    mass = np.full(M + 1, rho * h)
    mass[0] = mass[-1] = 0.5 * rho * h
    for m, p in zip(instance.masses, positions):
        s = p / h
        j = min(int(math.floor(s)), M - 1)
        w = s - j
        if abs(w) < 1e-12:
            mass[j] += m
        elif abs(w - 1.0) < 1e-12:
            mass[j + 1] += m
        else:
            mass[j] += (1.0 - w) * m
            mass[j + 1] += w * m

    n = M - 1
    return DiscretizedProblem(
        nodes=nodes,
        h=h,
        stiffness_diag=np.full(n, 2.0 * T / h),
        stiffness_off=np.full(n - 1, -T / h),
        mass=mass,
    )


def sturm_count(diag, off, shifts):
    """Number of eigenvalues below each shift of the symmetric tridiagonal (diag, off)."""
    shifts = np.asarray(shifts, dtype=float)
    scale = max(np.abs(diag).max(), np.abs(off).max() if len(off) else 0.0)
    pivmin = np.finfo(float).tiny * max(1.0, scale * scale)
    off2 = off * off
    q = diag[0] - shifts
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count = (q < 0).astype(int)
    for i in range(1, len(diag)):
        q = diag[i] - shifts - off2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0
    return count


def lowest_eigenvalues(diag, off, K, tol_rel=1e-13, max_iter=100, upper=None, sections=63):
    """K smallest eigenvalues of a positive definite symmetric tridiagonal matrix.

    Multisection on the Sturm count: every pass places ``sections`` shifts in
    each bracket, so one sweep of the recurrence narrows all K brackets by a
    factor ``sections + 1``.
    """
    n = len(diag)
    if K > n:
        raise ValueError(f"requested {K} eigenvalues of a {n}x{n} matrix")
    if upper is None:
        radius = np.abs(np.concatenate(([0.0], off))) + np.abs(np.concatenate((off, [0.0])))
        upper = np.full(K, float(np.max(diag + radius)))
    lo = np.zeros(K)
    hi = np.array(upper, dtype=float)
    target = np.arange(1, K + 1)
    frac = np.arange(1, sections + 1) / (sections + 1)
    for _ in range(max_iter):
        if np.all(hi - lo <= tol_rel * hi):
            break
        shifts = lo[:, None] + (hi - lo)[:, None] * frac
        above = sturm_count(diag, off, shifts.ravel()).reshape(K, sections) >= target[:, None]
        # first shift reaching the target count bounds from above
        first = np.where(above.any(axis=1), above.argmax(axis=1), sections)
        rows = np.arange(K)
        new_hi = np.where(first < sections, shifts[rows, np.minimum(first, sections - 1)], hi)
        new_lo = np.where(first > 0, shifts[rows, np.maximum(first - 1, 0)], lo)
        lo, hi = new_lo, new_hi
    return 0.5 * (lo + hi)


def fd_spectrum(instance: ProblemInstance, M: int, K: int) -> RootList:
    """Lowest K eigenvalues (as lambda = omega / a) of the discretized cable."""
    prob = discretize(instance, M)
    inv_sqrt = 1.0 / np.sqrt(prob.interior_mass)
    diag = prob.stiffness_diag * inv_sqrt**2
    off = prob.stiffness_off * inv_sqrt[:-1] * inv_sqrt[1:]
    # added mass only lowers eigenvalues, so the load-free grid values bound them
    k = np.arange(1, K + 1)
    rho, T = instance.cable.density, instance.cable.tension
    bare = 4.0 * T / (rho * prob.h**2) * np.sin(k * np.pi / (2 * M)) ** 2
    omega2 = lowest_eigenvalues(diag, off, K, upper=bare * (1 + 1e-9) + 1e-300)
    lambdas = np.sqrt(omega2) / wave_speed(instance.cable)
    return RootList(roots=[float(x) for x in lambdas], brackets_scanned=0)
