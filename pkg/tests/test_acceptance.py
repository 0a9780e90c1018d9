"""Acceptance criteria; each test prints one PASS/FAIL line in the terminal summary."""

import io
import json
import math
import time

import numpy as np
import pytest

from cableway import charfn, genfund
from cableway.cli import run
from cableway.model import CableSpec
from cableway.oracle import fd_spectrum
from cableway.spectra import moving_system_frequencies, static_spectrum, theorem_checks

from conftest import make, midpoint_root


def test_criterion_1_bare_cable_exact(criterion, bare_pi):
    start = time.perf_counter()
    lam = np.array(static_spectrum(bare_pi, K=10).lambdas)
    elapsed = time.perf_counter() - start
    err = np.max(np.abs(lam - np.arange(1, 11)) / np.arange(1, 11))
    criterion(f"max rel err {err:.2e}, {elapsed:.3f} s")
    assert err <= 1e-10
    assert elapsed < 1.0


def test_criterion_2_one_mass_closed_form(criterion, midpoint):
    start = time.perf_counter()
    lam = static_spectrum(midpoint, K=2).lambdas
    elapsed = time.perf_counter() - start
    ref = midpoint_root(1.0)
    e1, e2 = abs(lam[0] - ref), abs(lam[1] - 2 * math.pi)
    criterion(f"lambda1 err {e1:.1e}, lambda2 err {e2:.1e}, {elapsed:.3f} s")
    assert e1 <= 1e-9 and e2 <= 1e-9
    assert elapsed < 1.0


def _rel(a, b):
    return np.abs(a - b) / np.maximum(np.abs(a), np.abs(b))


def test_criterion_3_method_equivalence(criterion):
    m1, m2, b1, b2, b3 = 0.7, 2.3, 0.35, 0.8, 0.6
    inst = make(length=b1 + b2 + b3, loads=[(m1, b1), (m2, b1 + b2)], density=1.3, tension=1.9)
    # grid offset so no point sits on a shared zero
    lam = np.linspace(0.05, 15.0, 200) + 1e-3
    start = time.perf_counter()
    f_mat = charfn.characteristic_static(lam, inst)
    f_rec = charfn.characteristic_recurrence(lam, inst)
    f_cf = charfn.closed_form_two_mass(lam, m1, m2, b1, b2, b3, 1.3)
    f_gf = genfund.determinant_D(genfund.cable_system(inst), lam, steps_per_interval=2000)
    elapsed = time.perf_counter() - start
    analytic = max(_rel(f_mat, f_rec).max(), _rel(f_mat, f_cf).max(), _rel(f_rec, f_cf).max())
    numeric = max(_rel(f_gf, f).max() for f in (f_mat, f_rec, f_cf))
    criterion(f"analytic {analytic:.1e}, genfund {numeric:.1e}, {elapsed:.2f} s")
    assert analytic <= 1e-12
    assert numeric <= 1e-6
    assert elapsed < 10.0


def _random_instance(rng):
    length = rng.uniform(0.5, 2.0)
    density, tension = rng.uniform(0.5, 2.0), rng.uniform(0.5, 4.0)
    n = int(rng.integers(1, 5))
    while True:
        pos = np.sort(rng.uniform(0.05, 0.95, n)) * length
        if n == 1 or np.min(np.diff(pos)) > 0.02 * length:
            break
    masses = density * length * 10 ** rng.uniform(-2, 2, n)
    return make(length, list(zip(masses, pos)), density, tension)


def test_criterion_4_oracle_agreement(criterion):
    rng = np.random.default_rng(20240)
    instances = [_random_instance(rng) for _ in range(20)]
    start = time.perf_counter()
    worst = 0.0
    for inst in instances:
        transfer = np.array(static_spectrum(inst, K=5).lambdas)
        fd = np.array(fd_spectrum(inst, 2000, 5).roots)
        worst = max(worst, float(np.max(np.abs(fd - transfer) / transfer)))
    elapsed = time.perf_counter() - start
    criterion(f"worst rel delta {worst:.2e} over 20 instances, {elapsed:.1f} s")
    assert worst <= 5e-3
    assert elapsed < 30.0


def test_criterion_5_theorem_suite(criterion):
    start = time.perf_counter()
    report = theorem_checks(seed=0, trials=100)
    elapsed = time.perf_counter() - start
    failed = [c.name for c in report.checks if not c.passed]
    criterion(f"{len(report.checks) - len(failed)}/{len(report.checks)} checks, {elapsed:.1f} s")
    assert not failed, failed
    assert elapsed < 60.0


A2 = CableSpec(density=1.0, tension=4.0, length=math.pi)


def test_criterion_6_moving_system_spot_checks(criterion):
    cor = moving_system_frequencies(A2, 1.0, [1], coriolis=True)[0]
    fixed = moving_system_frequencies(A2, 1.0, [1], coriolis=False)[0]
    printed = moving_system_frequencies(A2, 1.0, [1], coriolis=False, formula_mode="as-printed")[0]
    criterion(f"coriolis {float(cor)!r}, corrected {float(fixed)!r}, as-printed {float(printed)!r}")
    assert cor == 1.5
    assert abs(fixed - math.sqrt(3.0)) <= 1e-12
    assert abs(printed - math.sqrt(1.5)) <= 1e-12


def test_criterion_6_rest_reduction(criterion):
    k = np.arange(1, 6)
    expected = np.pi * k * 2.0 / math.pi
    modes = {
        "coriolis": moving_system_frequencies(A2, 0.0, k, coriolis=True),
        "corrected": moving_system_frequencies(A2, 0.0, k, coriolis=False),
        "as-printed": moving_system_frequencies(A2, 0.0, k, coriolis=False, formula_mode="as-printed"),
    }
    errs = {name: float(np.max(np.abs(w - expected))) for name, w in modes.items()}
    criterion(", ".join(f"{n} {e:.1e}" for n, e in errs.items()))
    assert all(e <= 1e-12 for e in errs.values()), errs


def test_criterion_7_heavy_mass(criterion):
    m = 1e4
    inst = make(loads=[(m, 0.5)])
    transfer = static_spectrum(inst, K=1).lambdas[0] * math.sqrt(m)
    fd = fd_spectrum(inst, 2000, 1).roots[0] * math.sqrt(m)
    criterion(f"transfer {transfer:.6f}, fd {fd:.6f}")
    assert abs(transfer - 2.0) <= 0.02
    assert abs(fd - 2.0) <= 0.02


def _order(e1, e2):
    return math.log2(e1 / e2)


def test_criterion_8_convergence_orders(criterion):
    inst = make(loads=[(1.0, 0.5)])
    system = genfund.cable_system(inst)
    lam = 7.0
    exact = charfn.interval_transfer(lam, 0.5)
    rk = [np.max(np.abs(genfund.integrate_fundamental(system, 0, lam, n) - exact)) for n in (20, 40)]
    rk_order = _order(*rk)

    bare = make(length=math.pi)
    fd = [abs(fd_spectrum(bare, M, 1).roots[0] - 1.0) for M in (200, 400)]
    fd_order = _order(*fd)
    criterion(f"rk4 order {rk_order:.3f}, fd order {fd_order:.3f}")
    assert abs(rk_order - 4.0) <= 0.3
    assert abs(fd_order - 2.0) <= 0.3


CONFIG = {
    "cable": {"density": 1.0, "tension": 2.0, "length": 1.5},
    "loads": [{"mass": 0.8, "position": 0.4}, {"mass": 1.7, "position": 1.1}],
    "motion": {"mode": "loads-moving", "speed": 0.3},
    "solve": {"count": 4},
    "window": {"t0": 0.0, "t1": 0.5, "steps": 4},
    "sweep": {"param": "mass:1", "from": 0.1, "to": 3.0, "steps": 5},
    "oracle": {"nodes": 400, "threshold": 1.0},
    "verify": {"seed": 7, "trials": 3},
}


@pytest.mark.parametrize("command", ["spectrum", "sweep", "moving", "oracle", "verify"])
@pytest.mark.parametrize("fmt", ["csv", "table"])
def test_criterion_9_determinism(criterion, tmp_path, command, fmt):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(CONFIG))
    outputs = []
    for _ in range(2):
        out, err = io.StringIO(), io.StringIO()
        code = run([command, "--config", str(path), "--format", fmt], stdout=out, stderr=err)
        outputs.append((code, out.getvalue().encode(), err.getvalue().encode()))
    criterion(f"exit {outputs[0][0]}, {len(outputs[0][1])} bytes")
    assert outputs[0][0] == 0
    assert outputs[0] == outputs[1]
