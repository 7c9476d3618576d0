from __future__ import annotations

import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from sumtrans.estimators import (BojanovExtremal, DifferenceMap, HermiteFejerInterpolator,
                                 LagrangeInterpolator, TrigInterpolator)
from sumtrans.exceptions import InvalidParameterError
from sumtrans.fields import make_log_weight_field
from sumtrans.kernels import make_sine_kernel
from sumtrans.solver import SolveConfig


class TestDifferenceMap:
    def test_round_trip(self):
        Y = np.array([[0.2, 0.5], [0.1, 0.9], [0.4, 0.45]])
        dm = DifferenceMap().fit(Y)
        D = dm.transform(Y)
        assert D.shape == (3, 2)
        assert np.allclose(dm.inverse_transform(D), Y, atol=1e-8)
        assert len(dm.reports_) == 3

    def test_fit_transform(self):
        Y = [[0.3, 0.6]]
        assert np.allclose(DifferenceMap().fit_transform(Y), DifferenceMap().fit(Y).transform(Y))

    def test_params_and_clone(self):
        fld = make_log_weight_field({"kind": "jacobi", "a": 1, "b": 1})
        dm = DifferenceMap(kernels=make_sine_kernel(1.0, 1.0), field=fld, tol=1e-11,
                           solve_config={"max_iters": 50})
        params = dm.get_params()
        assert params["tol"] == 1e-11 and params["field"] is fld
        twin = clone(dm)
        assert twin.get_params()["solve_config"] == {"max_iters": 50}
        twin.set_params(tol=1e-9)
        assert twin.tol == 1e-9
        twin.fit([[0.3, 0.7]])
        assert twin.admissibility_.admissible

    def test_interval_maxima(self):
        m = DifferenceMap().fit([[0.5]]).interval_maxima([[0.5]])
        assert np.allclose(m, [[math.log(0.5), math.log(0.5)]])

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            DifferenceMap().transform([[0.5]])

    def test_wrong_width(self):
        dm = DifferenceMap().fit([[0.2, 0.6]])
        with pytest.raises(InvalidParameterError):
            dm.transform([[0.5]])

    def test_rejects_unordered_or_nan(self):
        with pytest.raises(InvalidParameterError):
            DifferenceMap().fit([[0.6, 0.2]])
        with pytest.raises(ValueError):
            DifferenceMap().fit([[np.nan, 0.2]])

    def test_solve_config_object(self):
        dm = DifferenceMap(solve_config=SolveConfig(residual_tol=1e-12)).fit([[0.5]])
        y = dm.inverse_transform([[0.4]])
        assert dm.transform(y)[0, 0] == pytest.approx(0.4, abs=1e-12)


def test_lagrange_estimator():
    est = LagrangeInterpolator(power=2.0).fit([0.0, 1.0], [1.0, 4.0])
    assert est.nodes_[0] == pytest.approx(1 / 3)
    assert est.C_ == pytest.approx(9.0)
    assert np.allclose(est.predict([0.0, 1.0]), [1.0, 4.0])
    with pytest.raises(NotFittedError):
        LagrangeInterpolator().predict([0.5])


def test_trig_estimator():
    est = TrigInterpolator(a=1.0, nu=1.0).fit([0.25, 0.75], [1.0, 1.0])
    assert est.nodes_[0] == pytest.approx(0.5)
    assert np.allclose(est.predict([0.25, 0.75]), 1.0)


def test_hermite_fejer_estimator():
    est = HermiteFejerInterpolator().fit([1.0, 1.0, 1.0])
    assert est.C_ == pytest.approx(8.0, abs=1e-7)
    assert np.allclose(est.predict(est.z_), 1.0, atol=1e-9)
    with pytest.raises(InvalidParameterError):
        HermiteFejerInterpolator().fit([1.0])


def test_bojanov_estimator():
    est = BojanovExtremal(nu=(1, 1, 1), interval=(-1.0, 1.0)).fit()
    assert est.minimax_ == pytest.approx(0.25)
    vals = est.predict(est.t_points_)
    assert np.allclose(np.abs(vals), 0.25, atol=1e-9)
    assert np.all(np.sign(vals[:-1]) != np.sign(vals[1:]))
    assert "nu" in clone(est).get_params()
