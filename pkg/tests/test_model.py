import math

import pytest

from cableway.model import (
    LOADS_MOVING,
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


@pytest.mark.parametrize("rho, T, a", [(1.0, 1.0, 1.0), (1.0, 4.0, 2.0), (2.45, 9.8, 2.0)])
def test_wave_speed(rho, T, a):
    assert wave_speed(CableSpec(rho, T, 1.0)) == pytest.approx(a, rel=1e-15)


def test_bare_instance_has_one_interval():
    inst = validate(ProblemInstance(CableSpec(1, 1, 1)))
    assert inst.intervals().tolist() == [1.0]


def test_midpoint_split():
    inst = validate(ProblemInstance(CableSpec(1, 1, 1), (LoadSpec(1, 0.5),)))
    assert inst.intervals().tolist() == [0.5, 0.5]


def test_intervals_sum_to_length():
    inst = validate(ProblemInstance(CableSpec(1, 1, 2.5), (LoadSpec(1, 0.3), LoadSpec(2, 1.7))))
    b = inst.intervals()
    assert (b > 0).all()
    assert b.sum() == pytest.approx(2.5, rel=1e-15)


def test_supercritical_system_speed_rejected():
    inst = ProblemInstance(CableSpec(1, 1, 1), motion=MotionSpec(mode=SYSTEM_MOVING, speed=1.5))
    with pytest.raises(ValidationError, match="supercritical"):
        validate(inst)


def test_critical_speed_is_also_rejected():
    inst = ProblemInstance(CableSpec(1, 1, 1), motion=MotionSpec(mode=SYSTEM_MOVING, speed=1.0))
    with pytest.raises(ValidationError):
        validate(inst)


@pytest.mark.parametrize(
    "cable, field",
    [
        (CableSpec(-1, 1, 1), "cable.density"),
        (CableSpec(1, 0, 1), "cable.tension"),
        (CableSpec(1, 1, math.inf), "cable.length"),
        (CableSpec(1, 1, math.nan), "cable.length"),
    ],
)
def test_nonpositive_parameters_name_the_field(cable, field):
    with pytest.raises(ValidationError) as info:
        validate(ProblemInstance(cable))
    assert info.value.field == field


@pytest.mark.parametrize(
    "loads",
    [
        (LoadSpec(1, 0.0),),
        (LoadSpec(1, 1.0),),
        (LoadSpec(1, 1.2),),
        (LoadSpec(1, 0.6), LoadSpec(1, 0.4)),
        (LoadSpec(1, 0.5), LoadSpec(2, 0.5)),
        (LoadSpec(-1, 0.5),),
    ],
)
def test_bad_loads_rejected(loads):
    with pytest.raises(ValidationError):
        validate(ProblemInstance(CableSpec(1, 1, 1), loads))


def test_zero_mass_dropped():
    inst = validate(ProblemInstance(CableSpec(1, 1, 1), (LoadSpec(0, 0.2), LoadSpec(1, 0.5))))
    assert inst.loads == (LoadSpec(1.0, 0.5),)


def test_validate_is_idempotent():
    raw = ProblemInstance(
        CableSpec(2, 3, 4),
        (LoadSpec(0, 1.0), LoadSpec(1, 2.0), LoadSpec(3, 3.5)),
        MotionSpec(mode=LOADS_MOVING, speed=0.2),
    )
    once = validate(raw)
    assert validate(once) == once


def test_window_rejects_load_leaving_cable():
    inst = validate(
        ProblemInstance(CableSpec(1, 1, 1), (LoadSpec(1, 0.5),), MotionSpec(mode=LOADS_MOVING, speed=1))
    )
    validate_window(inst, TimeWindow(0, 0.4, 5))
    with pytest.raises(ValidationError, match="leaves"):
        validate_window(inst, TimeWindow(0, 0.6, 5))
    with pytest.raises(ValidationError):
        validate_window(inst, TimeWindow(-0.6, 0, 5))


def test_window_shape_checks():
    inst = validate(ProblemInstance(CableSpec(1, 1, 1)))
    with pytest.raises(ValidationError):
        validate_window(inst, TimeWindow(1, 0, 3))
    with pytest.raises(ValidationError):
        validate_window(inst, TimeWindow(0, 1, 0))
    assert TimeWindow(0, 1, 3).times().tolist() == [0.0, 0.5, 1.0]


def test_window_rejects_vanishing_span():
    inst = validate(
        ProblemInstance(CableSpec(1, 4, 1), motion=MotionSpec(mode=SYSTEM_MOVING, speed=1, length_rate=-1))
    )
    validate_window(inst, TimeWindow(0, 0.5, 3))
    with pytest.raises(ValidationError):
        validate_window(inst, TimeWindow(0, 1.0, 3))
