"""The composite unit-interval quadrature rule."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from copulamix.quadrature import GAUSS_ORDER, unit_rule


def test_rule_lives_strictly_inside_the_interval():
    t, w = unit_rule()
    assert t.min() > 0.0 and t.max() < 1.0
    assert (w > 0.0).all()
    assert w.sum() == pytest.approx(1.0, abs=1e-15)


def test_polynomials_integrate_exactly():
    t, w = unit_rule()
    for k in range(0, 2 * GAUSS_ORDER - 1):
        assert w @ t**k == pytest.approx(1.0 / (k + 1), rel=1e-14)


def test_endpoint_singularities_are_graded_away():
    t, w = unit_rule()
    assert w @ np.log(t) == pytest.approx(-1.0, abs=1e-12)
    assert w @ (1.0 / np.sqrt(t)) == pytest.approx(2.0, rel=1e-5)


def test_breakpoints_split_kinked_integrands():
    a = 0.37
    t, w = unit_rule((a,))
    # |t - a| integrates to (a^2 + (1-a)^2) / 2 once the kink is a panel edge
    assert w @ np.abs(t - a) == pytest.approx((a * a + (1 - a) ** 2) / 2, abs=1e-14)
    step = (t >= a).astype(float)
    assert w @ step == pytest.approx(1.0 - a, abs=1e-14)


def test_breakpoints_outside_the_interval_are_ignored():
    t0, w0 = unit_rule()
    t1, w1 = unit_rule((-0.5, 0.0, 1.0, 2.0))
    assert np.array_equal(t0, t1) and np.array_equal(w0, w1)


def test_rules_are_cached():
    assert unit_rule((0.25,)) is unit_rule((0.25,))


@given(st.floats(min_value=1e-6, max_value=1 - 1e-6))
def test_any_single_breakpoint_keeps_total_mass(a):
    t, w = unit_rule((a,))
    assert w.sum() == pytest.approx(1.0, abs=1e-13)
    assert t.min() > 0.0 and t.max() < 1.0
