from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sumtrans.exceptions import DomainError, InvalidKernelError, InvalidParameterError
from sumtrans.kernels import (check_pm, make_example81_kernel, make_log_kernel,
                              make_piecewise_kernel, make_reciprocal_kernel, make_sine_kernel,
                              make_sqrt_kernel)


def periodized_gap(kernel, grid=20001):
    """min over (0,1) of K'(t) - K'(t-1), computed from closed forms by the caller."""
    t = np.linspace(0, 1, grid)[1:-1]
    return np.min([kernel.d_minus(s) - kernel.d_minus(s - 1) for s in t[::50]])


class TestLogKernel:
    def test_values(self):
        k = make_log_kernel(2.0)
        assert k.eval(0.5) == pytest.approx(2 * math.log(0.5))
        assert k.eval(-0.25) == pytest.approx(2 * math.log(0.25))
        assert k.eval(0.0) == -math.inf

    def test_metadata(self):
        k = make_log_kernel(1.5)
        assert k.singular and k.strictly_concave
        assert k.pm_constant == pytest.approx(6.0)
        assert k.endpoint_values[1] == -math.inf
        assert k.endpoint_values[2] == 0.0

    def test_one_sided_derivatives(self):
        k = make_log_kernel()
        assert k.d_minus(0.25) == pytest.approx(4.0)
        assert k.d_plus(-0.5) == pytest.approx(-2.0)

    def test_derivative_excluded_at_singularity(self):
        with pytest.raises(DomainError):
            make_log_kernel().d_minus(0.0)

    def test_outside_domain(self):
        with pytest.raises(DomainError):
            make_log_kernel().eval(1.5)

    @pytest.mark.parametrize("nu", [0.0, -1.0])
    def test_rejects_nonpositive_nu(self, nu):
        with pytest.raises(InvalidParameterError):
            make_log_kernel(nu)

    def test_pm_is_sharp(self):
        k = make_log_kernel()
        assert check_pm(k, 4.0)
        assert not check_pm(k, 4.1)


class TestSineKernel:
    def test_values(self):
        k = make_sine_kernel(1.0, 0.5)
        assert k.eval(0.5) == pytest.approx(math.log(math.sin(math.pi / 4)))

    def test_full_period_endpoints(self):
        k = make_sine_kernel(1.0, 1.0)
        assert k.endpoint_values == (-math.inf, -math.inf, -math.inf)
        assert k.pm_constant == 0.0

    @given(nu=st.floats(0.2, 5.0), a=st.floats(0.05, 0.95))
    @settings(max_examples=25, deadline=None)
    def test_pm_constant_formula(self, nu, a):
        k = make_sine_kernel(nu, a)
        expected = 2 * nu * a * math.pi / math.tan(a * math.pi / 2)
        assert k.pm_constant == pytest.approx(expected, rel=1e-12)
        assert check_pm(k, k.pm_constant)

    @pytest.mark.parametrize("a", [0.0, 1.5])
    def test_rejects_bad_frequency(self, a):
        with pytest.raises(InvalidParameterError):
            make_sine_kernel(1.0, a)


@given(nu=st.floats(0.1, 10.0))
@settings(max_examples=25, deadline=None)
def test_log_pm_constant_matches_definition(nu):
    k = make_log_kernel(nu)
    # nu (1/t - 1/(t - 1)) = nu / (t (1 - t)) has minimum 4 nu at t = 1/2
    assert periodized_gap(k) >= 4 * nu - 1e-9
    assert periodized_gap(k) <= 4 * nu + 1e-3 * nu


@given(t=st.floats(-0.999, 0.999).filter(lambda s: abs(s) > 1e-3),
       h=st.floats(1e-4, 1e-3))
@settings(max_examples=60, deadline=None)
def test_log_kernel_concave_on_each_side(t, h):
    k = make_log_kernel()
    lo, hi = (t - h, t + h)
    if lo * hi <= 0 or abs(lo) >= 1 or abs(hi) >= 1:
        return
    assert k.eval(t) >= 0.5 * (k.eval(lo) + k.eval(hi)) - 1e-12


def test_sqrt_kernel_not_singular():
    k = make_sqrt_kernel()
    assert not k.singular
    assert k.pm_constant is None
    assert k.eval(0.25) == pytest.approx(0.5)


def test_reciprocal_kernel():
    k = make_reciprocal_kernel()
    assert k.singular
    assert k.endpoint_values == (-math.inf, -math.inf, -math.inf)
    assert k.eval(0.5) == pytest.approx(-4.0)
    assert k.eval(-0.25) == pytest.approx(-1 / (0.25 * 0.75))


class TestExample81Kernel:
    def test_periodic_extension(self):
        k = make_example81_kernel()
        for s in (-0.9, -0.5, -0.2, -0.05):
            assert k.eval(s) == pytest.approx(k.eval(s + 1.0))

    def test_branch_values(self):
        k = make_example81_kernel()
        assert k.eval(0.5) == pytest.approx(math.log(0.5))
        assert k.eval(0.8) == pytest.approx(math.log(0.4))
        assert k.eval(2 / 3) == pytest.approx(math.log(2 / 3))

    def test_breakpoints(self):
        k = make_example81_kernel()
        assert any(abs(b - 2 / 3) < 1e-12 for b in k.breakpoints)
        assert any(abs(b + 1 / 3) < 1e-12 for b in k.breakpoints)

    def test_kink_slopes(self):
        k = make_example81_kernel()
        assert k.d_minus(2 / 3) == pytest.approx(1.5)
        assert k.d_plus(2 / 3) == pytest.approx(-3.0)


class TestPiecewiseValidation:
    def _log(self):
        f = lambda t: np.log(np.abs(t))  # noqa: E731
        df = lambda t: 1.0 / t  # noqa: E731
        return f, df

    def test_gap(self):
        f, df = self._log()
        with pytest.raises(InvalidKernelError):
            make_piecewise_kernel([(-1, 0, f, df), (0.1, 1, f, df)])

    def test_straddle(self):
        f, df = self._log()
        with pytest.raises(InvalidKernelError):
            make_piecewise_kernel([(-1, 0.5, f, df), (0.5, 1, f, df)])

    def test_junction_mismatch(self):
        f, df = self._log()
        g = lambda t: np.log(np.abs(t)) + 1.0  # noqa: E731
        with pytest.raises(InvalidKernelError):
            make_piecewise_kernel([(-1, 0, f, df), (0, 0.5, f, df), (0.5, 1, g, df)])

    def test_valid(self):
        f, df = self._log()
        k = make_piecewise_kernel([(-1, 0, f, df), (0, 1, f, df)], strictly_concave=True,
                                  pm_constant=4.0)
        assert k.singular
        assert k.eval(0.5) == pytest.approx(math.log(0.5))
