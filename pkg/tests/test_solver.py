from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import chebyshev_mbar, chebyshev_nodes_unit
from problems import FAMILIES, random_problem
from sumtrans.exceptions import InvalidParameterError, InvalidProblemError
from sumtrans.fields import make_discrete_field, make_log_weight_field, make_zero_field
from sumtrans.gallery import get_example
from sumtrans.kernels import (make_log_kernel, make_reciprocal_kernel, make_sine_kernel,
                              make_sqrt_kernel)
from sumtrans.landscape import classify, interval_maxima
from sumtrans.solver import (SolveConfig, check_admissible, initial_point,
                             solve_equioscillation, solve_phi)


class TestAdmissibility:
    def test_log_zero(self):
        adm = check_admissible([make_log_kernel(2.0)], make_zero_field())
        assert adm.admissible and adm.theorem == "positive-pm" and adm.c == 8.0

    def test_periodic_needs_endpoint_condition(self):
        k = [make_sine_kernel(1.0, 1.0)]
        assert not check_admissible(k, make_zero_field()).admissible
        fld = make_log_weight_field({"kind": "jacobi", "a": 1, "b": 0})
        adm = check_admissible(k, fld)
        assert adm.admissible and adm.theorem == "periodic"

    def test_non_singular_refused(self):
        assert not check_admissible([make_sqrt_kernel()], make_zero_field()).admissible

    def test_census_refused(self):
        fld = make_discrete_field([0.5])
        assert not check_admissible([make_log_kernel()], fld).admissible

    def test_interpolation_field_accepted(self):
        # finite at exactly x_0 = 0 and x_1 = 1: still solvable
        fld = make_discrete_field([0.0, 1.0])
        assert check_admissible([make_log_kernel()], fld).admissible

    @pytest.mark.parametrize("key", ["8.2", "8.3"])
    def test_examples_refused(self, key):
        ex = get_example(key)
        assert not check_admissible(ex.kernels, ex.field).admissible
        with pytest.raises(InvalidProblemError):
            solve_phi(ex.kernels, ex.field, [0.0])

    def test_reciprocal_with_cusp_field_accepted(self):
        fld = make_log_weight_field(lambda t: t)
        assert check_admissible([make_reciprocal_kernel()], fld).admissible


class TestSolve:
    def test_single_log(self):
        rep = solve_phi([make_log_kernel()], make_zero_field(), [0.0])
        assert rep.converged
        assert rep.y_solution.nodes[0] == pytest.approx(0.5, abs=1e-12)

    def test_history_strictly_decreasing(self):
        k = [make_log_kernel()] * 3
        rep = solve_phi(k, make_zero_field(), [1.0, -2.0, 0.5])
        h = rep.residual_history
        assert all(b < a for a, b in zip(h, h[1:]))
        assert h[-1] == pytest.approx(rep.residual)
        assert rep.residual <= 1e-10

    def test_far_target(self):
        k = [make_log_kernel()] * 2
        rep = solve_phi(k, make_zero_field(), [10.0, -10.0])
        assert rep.converged
        assert np.allclose(rep.phi, [10.0, -10.0], atol=1e-10)

    def test_max_iters_status(self):
        rep = solve_phi([make_log_kernel()] * 2, make_zero_field(), [10.0, -10.0],
                        SolveConfig(max_iters=2))
        assert rep.status == "max-iters"
        assert not rep.converged

    def test_y0(self):
        rep = solve_phi([make_log_kernel()] * 2, make_zero_field(), [0.0, 0.0], y0=[0.4, 0.6])
        assert rep.converged

    def test_bad_inputs(self):
        k = [make_log_kernel()] * 2
        with pytest.raises(InvalidParameterError):
            solve_phi(k, make_zero_field(), [0.0])
        with pytest.raises(InvalidParameterError):
            solve_phi(k, make_zero_field(), [0.0, math.inf])
        fld = make_discrete_field([0.0, 0.5, 1.0])
        with pytest.raises(InvalidParameterError):
            solve_phi(k, fld, [0.0, 0.0], y0=[0.1, 0.2])

    @pytest.mark.parametrize("kwargs", [{"residual_tol": 0.0}, {"max_iters": 0},
                                        {"damping": 1.5}, {"jacobian_mode": "magic"},
                                        {"fd_h": -1.0}])
    def test_config_validation(self, kwargs):
        with pytest.raises(InvalidParameterError):
            SolveConfig(**kwargs)

    def test_example81_solve(self):
        ex = get_example("8.1")
        rep = solve_phi(ex.kernels, ex.field, [math.log(0.6)])
        assert rep.converged
        assert rep.y_solution.nodes[0] == pytest.approx(0.5, abs=1e-9)

    def test_to_dict(self):
        import json
        rep = solve_phi([make_log_kernel()], make_zero_field(), [0.3])
        d = rep.to_dict()
        json.dumps(d)
        assert d["status"] == "converged"


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_chebyshev(n):
    rep = solve_equioscillation([make_log_kernel()] * n, make_zero_field())
    assert rep.converged
    assert np.allclose(rep.y_solution.nodes, chebyshev_nodes_unit(n), atol=1e-7)
    assert rep.m_bar == pytest.approx(chebyshev_mbar(n), abs=1e-9)
    assert np.allclose(rep.maxima.m, rep.m_bar, atol=1e-9)


@pytest.mark.parametrize("family", FAMILIES)
def test_initial_point_regular(family):
    rng = np.random.default_rng(7)
    for _ in range(5):
        _, kernels, fld, _ = random_problem(rng, family=family)
        y0 = initial_point(kernels, fld)
        assert classify(fld, kernels, y0).regular


@given(seed=st.integers(0, 2**32 - 1), family=st.sampled_from(FAMILIES))
@settings(max_examples=40, deadline=None)
def test_round_trip(seed, family):
    rng = np.random.default_rng(seed)
    _, kernels, fld, y = random_problem(rng, family=family)
    d = interval_maxima(kernels, fld, y, brackets=False).phi
    rep = solve_phi(kernels, fld, d)
    assert rep.converged, rep.message
    assert np.max(np.abs(rep.y_solution.nodes - y)) <= 1e-7
