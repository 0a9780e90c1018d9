import math

import pytest

from cableway.model import CableSpec, LoadSpec, MotionSpec, ProblemInstance, validate

_ACCEPTANCE = []


def scalar_bisect(g, lo, hi, iters=200):
    """Plain bisection on a scalar function; independent of cableway.rootfind."""
    glo = g(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm < 0.0) == (glo < 0.0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def midpoint_root(c, lo=1e-9, hi=math.pi / 2):
    """lambda = 2x with cot(x) = c x, i.e. the midpoint-load equation on a unit cable."""
    x = scalar_bisect(lambda x: math.cos(x) - c * x * math.sin(x), lo, hi)
    return 2.0 * x


def make(length=1.0, loads=(), density=1.0, tension=1.0, motion=None):
    return validate(
        ProblemInstance(
            CableSpec(density, tension, length),
            tuple(LoadSpec(m, p) for m, p in loads),
            motion or MotionSpec(),
        )
    )


@pytest.fixture
def bare_pi():
    return make(length=math.pi)


@pytest.fixture
def midpoint():
    return make(loads=[(1.0, 0.5)])


@pytest.fixture
def two_mass():
    return make(loads=[(1.0, 1 / 3), (1.0, 2 / 3)])


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion outcome for the terminal summary."""
    entry = {"name": request.node.name, "passed": False, "detail": ""}
    _ACCEPTANCE.append(entry)

    def note(detail):
        entry["detail"] = detail

    yield note
    rep = getattr(request.node, "rep_call", None)
    entry["passed"] = bool(rep and rep.passed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for e in _ACCEPTANCE:
        status = "PASS" if e["passed"] else "FAIL"
        terminalreporter.write_line(f"{status}  {e['name']}  {e['detail']}")
