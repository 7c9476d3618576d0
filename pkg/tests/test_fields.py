from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sumtrans.exceptions import InvalidParameterError
from sumtrans.fields import (FieldPiece, finiteness_count, make_discrete_field,
                             make_log_weight_field, make_piecewise_field, make_sampled_field,
                             make_zero_field, validate_field)


def test_zero_field():
    fld = make_zero_field()
    assert fld.eval(0.3) == 0.0
    assert np.all(fld.eval(np.linspace(0, 1, 5)) == 0.0)
    assert finiteness_count(fld) == math.inf
    assert fld.upper_bound == 0.0


class TestDiscrete:
    def test_eval(self):
        fld = make_discrete_field([0.2, 0.8], [1.0, -2.0])
        assert fld.eval(0.2) == 1.0
        assert fld.eval(0.8) == -2.0
        assert fld.eval(0.5) == -math.inf

    def test_hints_are_conservative(self):
        inner = make_discrete_field([0.2, 0.8])
        assert inner.hints == {"inf_plus": True, "inf_minus": True,
                               "cusp_plus": True, "cusp_minus": True}
        ends = make_discrete_field([0.0, 0.5, 1.0])
        assert not any(ends.hints.values())

    def test_census_weights_endpoints(self):
        assert finiteness_count(make_discrete_field([0.0, 1.0])) == 1.0
        assert finiteness_count(make_discrete_field([0.0, 1.0]), weighted=False) == 2.0
        assert validate_field(make_discrete_field([0.0, 0.5, 1.0]), 1).passed
        assert not validate_field(make_discrete_field([0.0, 0.5, 1.0]), 2).passed

    @pytest.mark.parametrize("pts", [[], [0.5, 0.5], [0.6, 0.2], [-0.1, 0.5], [0.5, 1.2]])
    def test_rejects_bad_points(self, pts):
        with pytest.raises(InvalidParameterError):
            make_discrete_field(pts)

    def test_rejects_nonfinite_values(self):
        with pytest.raises(InvalidParameterError):
            make_discrete_field([0.1, 0.2], [0.0, -math.inf])


class TestLogWeight:
    def test_constant(self):
        fld = make_log_weight_field(2.0)
        assert fld.eval(0.7) == pytest.approx(math.log(2.0))
        assert not fld.hints["inf_plus"]

    def test_callable(self):
        fld = make_log_weight_field(lambda t: t * (1 - t))
        assert fld.eval(0.25) == pytest.approx(math.log(0.1875))
        assert fld.eval(0.0) == -math.inf
        assert fld.hints["inf_plus"] and fld.hints["inf_minus"]

    def test_jacobi(self):
        fld = make_log_weight_field({"kind": "jacobi", "a": 2, "b": 0.5})
        t = 0.3
        assert fld.eval(t) == pytest.approx(2 * math.log(t) + 0.5 * math.log(1 - t))
        assert fld.slope(t) == pytest.approx(2 / t - 0.5 / (1 - t))
        assert fld.hints["inf_plus"] and fld.hints["inf_minus"]

    def test_step_is_upper_semicontinuous(self):
        fld = make_log_weight_field({"kind": "step", "breaks": [0.6], "values": [1.0, 0.5]})
        assert fld.eval(0.6) == 0.0
        assert fld.eval(0.6 + 1e-12) == pytest.approx(math.log(0.5))
        assert fld.eval(0.2) == 0.0

    def test_step_zero_piece_is_minus_inf(self):
        fld = make_log_weight_field({"kind": "step", "breaks": [0.5], "values": [0.0, 1.0]})
        assert fld.eval(0.25) == -math.inf
        assert fld.eval(0.5) == 0.0
        assert fld.hints["inf_plus"]

    @pytest.mark.parametrize("w", [-1.0, 0.0, {"kind": "nope"},
                                   {"kind": "step", "breaks": [0.5], "values": [1.0]},
                                   {"kind": "jacobi", "a": -1}])
    def test_rejects_bad_weights(self, w):
        with pytest.raises(InvalidParameterError):
            make_log_weight_field(w)

    def test_negative_callable(self):
        with pytest.raises(InvalidParameterError):
            make_log_weight_field(lambda t: t - 0.5)


class TestSampled:
    def test_nearest_cells(self):
        fld = make_sampled_field([0.0, 0.5, 1.0], [0.0, 1.0, -1.0])
        assert fld.eval(0.2) == 0.0
        assert fld.eval(0.3) == 1.0
        assert fld.eval(0.25) == 1.0  # larger neighbour at the midpoint
        assert fld.eval(0.9) == -1.0
        assert fld.grid_limited

    def test_rejects_unsorted(self):
        with pytest.raises(InvalidParameterError):
            make_sampled_field([0.5, 0.1], [0.0, 0.0])


class TestPiecewise:
    def test_points_override(self):
        fld = make_piecewise_field([(0.0, 1.0, lambda t: -t)], points=[(0.5, 3.0)])
        assert fld.eval(0.5) == 3.0
        assert fld.eval(0.25) == pytest.approx(-0.25)

    def test_open_ends(self):
        fld = make_piecewise_field([FieldPiece(0.2, 0.4, lambda t: 0 * t, None, False, True)])
        assert fld.eval(0.2) == -math.inf
        assert fld.eval(0.4) == 0.0

    def test_auto_hints(self):
        fld = make_piecewise_field([(0.0, 1.0, lambda t: np.log(t))])
        assert fld.hints["inf_plus"] and not fld.hints["inf_minus"]

    def test_numeric_slope(self):
        fld = make_piecewise_field([(0.0, 1.0, lambda t: -(t - 0.3) ** 2)])
        assert fld.slope(0.5) == pytest.approx(-0.4, abs=1e-6)

    def test_upper_bound(self):
        fld = make_piecewise_field([(0.0, 1.0, lambda t: -(t - 0.3) ** 2)])
        assert fld.upper_bound == pytest.approx(0.0, abs=1e-12)

    def test_rejects_outside(self):
        with pytest.raises(InvalidParameterError):
            make_piecewise_field([(0.5, 1.5, lambda t: t)])


def test_validate_field_needs_positive_n():
    with pytest.raises(InvalidParameterError):
        validate_field(make_zero_field(), 0)


@given(pts=st.lists(st.floats(0.0, 1.0), min_size=1, max_size=12, unique=True))
@settings(max_examples=50, deadline=None)
def test_census_property(pts):
    pts = sorted(pts)
    fld = make_discrete_field(pts)
    ends = sum(1 for p in pts if p in (0.0, 1.0))
    assert finiteness_count(fld) == len(pts) - 0.5 * ends
    assert finiteness_count(fld, weighted=False) == len(pts)
