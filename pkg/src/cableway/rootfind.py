"""Bracketing scan plus bisection for the leading zeros of a characteristic function."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

EPS = np.finfo(float).eps


class RootSearchError(RuntimeError):
    pass


class FewerRootsFound(RootSearchError):
    def __init__(self, requested: int, found: list[float], lambda_max: float):
        self.requested = requested
        self.found = list(found)
        self.lambda_max = lambda_max
        super().__init__(f"found {len(found)} of {requested} roots below lambda_max={lambda_max:g}")


class NoSignChange(RootSearchError):
    pass


class InvalidBracket(RootSearchError):
    pass


@dataclass(frozen=True)
class RootSearchConfig:
    count: int = 5
    lambda_max: Optional[float] = None
    oversample: int = 16
    tol_rel: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.lambda_max is not None and not self.lambda_max > 0:
            raise ValueError("lambda_max must be positive")
        if self.oversample < 1:
            raise ValueError("oversample must be >= 1")
        if not self.tol_rel > 10 * EPS:
            raise ValueError("tol_rel must exceed 10 * machine epsilon")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    def ceiling(self, length: float) -> float:
        """Scan ceiling; by default one bare-cable spacing past the K-th bare root.

        Point loads only lower eigenvalues, so this always brackets K roots
        of a loaded static cable.
        """
        if self.lambda_max is not None:
            return self.lambda_max
        return (self.count + 1) * math.pi / length


@dataclass
class RootList:
    roots: list[float]
    brackets_scanned: int = 0
    warnings: list[str] = field(default_factory=list)


def _evaluate(f, grid):
    try:
        values = np.asarray(f(grid), dtype=float)
    except TypeError:
        values = None
    if values is None or values.shape != grid.shape:
        values = np.array([float(f(x)) for x in grid])
    return values


def refine_root(f, lo, hi, tol_rel=1e-12, max_iter=200, flo=None, fhi=None) -> float:
    """Bisection on a sign-change bracket; returns the final midpoint."""
    flo = float(f(lo)) if flo is None else flo
    fhi = float(f(hi)) if fhi is None else fhi
    if flo == 0.0:
        return float(lo)
    if fhi == 0.0:
        return float(hi)
    if not (math.isfinite(flo) and math.isfinite(fhi)) or flo * fhi > 0.0:
        raise InvalidBracket(f"f({lo!r})={flo!r} and f({hi!r})={fhi!r} do not bracket a root")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol_rel * abs(mid) or mid in (lo, hi):
            break
        fmid = float(f(mid))
        if fmid == 0.0:
            return mid
        if (fmid < 0.0) == (flo < 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _isolate(count, k, lo, hi, tol_rel, max_iter):
    """Shrink [lo, hi] until it holds exactly the k-th eigenvalue.

    ``count(x)`` is the number of eigenvalues strictly below x. Returns the
    bracket and whether isolation succeeded before the bracket collapsed.
    """
    for _ in range(max_iter):
        if int(count(lo)) == k - 1 and int(count(hi)) == k:
            return lo, hi, True
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol_rel * abs(mid):
            break
        if int(count(mid)) >= k:
            hi = mid
        else:
            lo = mid
    return lo, hi, False


def find_eigenvalues(
    f: Callable,
    config: RootSearchConfig,
    length: float,
    count: Optional[Callable] = None,
) -> RootList:
    """First ``config.count`` positive zeros of ``f`` in increasing order.

    The grid step is ``pi / (length * oversample)``. Without ``count`` each
    sign change on the grid yields one root. With an eigenvalue counting
    function ``count(x)`` (number of eigenvalues below ``x``) every cell is
    checked against the count, so clustered pairs inside one cell are split
    instead of being lost.
    """
    K = config.count
    ceiling = config.ceiling(length)
    step = math.pi / (length * config.oversample)
    ncell = max(1, math.ceil(ceiling / step))
    grid = np.append(np.arange(ncell) * step, ceiling)
    # lambda = 0 is never a root; start just right of it
    grid[0] = min(step * 1e-6, 0.5 * grid[1])
    values = _evaluate(f, grid)
    if not np.all(np.isfinite(values)):
        raise NoSignChange("characteristic function is not finite on the scan grid")
    if not np.any(values):
        raise NoSignChange("characteristic function vanishes on the whole scan grid")

    roots: list[float] = []
    warnings: list[str] = []
    tiny = 1e-9 * length

    if count is not None:
        counts = np.asarray(count(grid), dtype=int)
        for j in range(len(grid) - 1):
            lo, hi = grid[j], grid[j + 1]
            for k in range(counts[j] + 1, counts[j + 1] + 1):
                if len(roots) >= K:
                    break
                if counts[j + 1] - counts[j] == 1 and values[j] * values[j + 1] < 0.0:
                    a, b, fa, fb = lo, hi, values[j], values[j + 1]
                else:
                    a, b, ok = _isolate(count, k, lo, hi, config.tol_rel, config.max_iter)
                    fa, fb = float(f(a)), float(f(b))
                    if not ok or fa * fb > 0.0:
                        warnings.append(
                            f"root {k} near {0.5 * (a + b):.12g} could not be isolated (multiple root)"
                        )
                        roots.append(0.5 * (a + b))
                        continue
                roots.append(refine_root(f, a, b, config.tol_rel, config.max_iter, fa, fb))
            if len(roots) >= K:
                break
    else:
        for j in range(len(grid) - 1):
            fa, fb = values[j], values[j + 1]
            if fa == 0.0:
                roots.append(float(grid[j]))
            elif fa * fb < 0.0:
                roots.append(refine_root(f, grid[j], grid[j + 1], config.tol_rel, config.max_iter, fa, fb))
            elif abs(fa) < tiny and j > 0:
                warnings.append(
                    f"|f| = {abs(fa):.3g} at lambda = {grid[j]:.12g} without a sign change "
                    "(possible double root)"
                )
            if len(roots) >= K:
                break
        if len(roots) < K and values[-1] == 0.0:
            roots.append(float(grid[-1]))

    if len(roots) < K:
        raise FewerRootsFound(K, roots, ceiling)
    return RootList(
        roots=[float(r) for r in roots[:K]],
        brackets_scanned=len(grid) - 1,
        warnings=warnings,
    )
