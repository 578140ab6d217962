import math

import pytest

from flagflow._dopri import Stepper
from flagflow.errors import StepUnderflowError


def run_to(stepper, t_end):
    while stepper.t < t_end:
        stepper.advance(t_end - stepper.t)
    return stepper


def test_rotation_exact():
    s = run_to(Stepper(lambda a, b: (-b, a), 1.0, 0.0, rtol=1e-10, atol=1e-12), 2 * math.pi)
    assert s.t == pytest.approx(2 * math.pi, abs=1e-15)
    assert (s.a, s.b) == pytest.approx((1.0, 0.0), abs=1e-8)


def test_logistic_exact():
    # a' = a (1 - a), b' = -b
    s = run_to(Stepper(lambda a, b: (a * (1 - a), -b), 0.1, 2.0, rtol=1e-11, atol=1e-13), 5.0)
    exact = 1 / (1 + 9 * math.exp(-5.0))
    assert s.a == pytest.approx(exact, rel=1e-9)
    assert s.b == pytest.approx(2 * math.exp(-5.0), rel=1e-9)


def test_dense_output_inside_step():
    s = Stepper(lambda a, b: (-b, a), 1.0, 0.0, rtol=1e-6, atol=1e-9)
    s.advance(0.5)
    t0 = s.t - s.h_last
    for theta in (0.0, 0.25, 0.5, 0.75, 1.0):
        t = t0 + theta * s.h_last
        assert s.dense(theta) == pytest.approx((math.cos(t), math.sin(t)), abs=1e-6)
    assert s.dense(1.0) == pytest.approx((s.a, s.b), abs=1e-15)


def test_reset_keeps_time():
    s = Stepper(lambda a, b: (1.0, 0.0), 0.0, 0.0, rtol=1e-8, atol=1e-10)
    s.advance(0.3)
    t = s.t
    s.reset(lambda a, b: (0.0, 2.0), 5.0, 5.0)
    run_to(s, t + 0.1)
    assert s.t == pytest.approx(t + 0.1) and s.b == pytest.approx(5.2)


def test_finite_time_blowup_underflows():
    s = Stepper(lambda a, b: (a * a, 0.0), 1.0, 0.0, rtol=1e-9, atol=1e-12)
    with pytest.raises(StepUnderflowError):
        run_to(s, 2.0)
    assert s.t == pytest.approx(1.0, abs=1e-3)
