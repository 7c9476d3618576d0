from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oracles import discrete_maxima, oracle_maxima
from sumtrans.exceptions import DomainError, InvalidParameterError, NotRegularError
from sumtrans.fields import (make_discrete_field, make_log_weight_field, make_piecewise_field,
                             make_sampled_field, make_zero_field)
from sumtrans.kernels import make_log_kernel, make_reciprocal_kernel, make_sine_kernel
from sumtrans.landscape import (NodeSystem, classify, eval_F, interval_maxima,
                                interval_maxima_batch, phi)


def node_vectors(max_n=5, gap=1e-3):
    """Strictly increasing node vectors in (0, 1) with a minimum gap."""
    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_n))
        ys = draw(st.lists(st.floats(gap, 1 - gap), min_size=n, max_size=n))
        ys = np.sort(np.asarray(ys))
        ext = np.concatenate([[0.0], ys, [1.0]])
        assume(np.all(np.diff(ext) > gap))
        return ys
    return build()


class TestNodeSystem:
    def test_read_only(self):
        y = NodeSystem([0.2, 0.4])
        with pytest.raises(ValueError):
            y.nodes[0] = 0.1

    @pytest.mark.parametrize("bad", [[], [0.5, 0.2], [-0.1], [1.2], [math.nan]])
    def test_validation(self, bad):
        with pytest.raises(InvalidParameterError):
            NodeSystem(bad)

    def test_extended_and_strict(self):
        y = NodeSystem([0.2, 0.2])
        assert y.extended().tolist() == [0.0, 0.2, 0.2, 1.0]
        assert not y.strict()
        assert y.n == 2


class TestEvalF:
    def test_log_product(self):
        k = make_log_kernel()
        v = eval_F([k, k], make_zero_field(), [0.2, 0.7], 0.5)
        assert v == pytest.approx(math.log(0.3 * 0.2))

    def test_singular_at_node(self):
        assert eval_F([make_log_kernel()], make_zero_field(), [0.5], 0.5) == -math.inf

    def test_outside(self):
        with pytest.raises(DomainError):
            eval_F([make_log_kernel()], make_zero_field(), [0.5], 1.5)

    def test_size_mismatch(self):
        with pytest.raises(InvalidParameterError):
            eval_F([make_log_kernel()], make_zero_field(), [0.2, 0.4], 0.5)


class TestIntervalMaxima:
    def test_single_node_closed_form(self):
        rep = interval_maxima([make_log_kernel()], make_zero_field(), [0.3])
        assert np.allclose(rep.m, [math.log(0.3), math.log(0.7)])
        assert rep.argmax.tolist() == [0.0, 1.0]
        assert rep.phi[0] == pytest.approx(math.log(0.7 / 0.3))
        assert rep.regular and rep.unique.all()

    def test_jacobi_interior_maximum(self):
        # w = t(1-t), one node at 1/2: max of t(1-t)(1/2 - t) on [0, 1/2]
        fld = make_log_weight_field({"kind": "jacobi", "a": 1, "b": 1})
        rep = interval_maxima([make_log_kernel()], fld, [0.5])
        z = (3 - math.sqrt(3)) / 6
        assert rep.argmax[0] == pytest.approx(z, abs=1e-8)
        assert rep.m[0] == pytest.approx(math.log(z * (1 - z) * (0.5 - z)), abs=1e-12)

    def test_singular_interval(self):
        fld = make_discrete_field([0.0, 0.5, 1.0])
        rep = interval_maxima([make_log_kernel()] * 2, fld, [0.1, 0.2])
        assert rep.m[1] == -math.inf
        assert not rep.regular
        assert rep.phi[0] == -math.inf and rep.phi[1] == math.inf
        assert rep.phi_defined.all()
        with pytest.raises(NotRegularError) as err:
            phi([make_log_kernel()] * 2, fld, [0.1, 0.2])
        assert err.value.index == 1

    def test_sampled_field_cell_maximum(self):
        # the middle cell [1/4, 3/4] carries J = 1 and contains t = 0.45 where
        # |sin(pi (t - 0.95))| = 1
        fld = make_sampled_field([0.0, 0.5, 1.0], [0.0, 1.0, 0.0])
        rep = interval_maxima([make_sine_kernel(1.0, 1.0)], fld, [0.95])
        assert rep.grid_limited
        assert rep.m[0] == pytest.approx(1.0, abs=1e-12)
        assert rep.argmax[0] == pytest.approx(0.45, abs=1e-6)

    def test_brackets_contain_argmax(self):
        k = make_log_kernel()
        rep = interval_maxima([k, k], make_zero_field(), [0.3, 0.6])
        for j in range(3):
            lo, hi = rep.brackets[j]
            assert lo - 1e-15 <= rep.argmax[j] <= hi + 1e-15

    def test_reciprocal_tie(self):
        # at y = (5 + sqrt 5)/10 the maxima over I_0 at t = 0 and t = y - 1/2 tie
        from sumtrans.gallery import example83_field
        y = (5 + math.sqrt(5)) / 10
        rep = interval_maxima([make_reciprocal_kernel()], example83_field(), [y])
        assert rep.m[0] == pytest.approx(-4.0, abs=1e-9)
        lo, hi = rep.brackets[0]
        assert lo <= 1e-12 and hi >= y - 0.5 - 1e-6
        assert not rep.unique[0]

    def test_to_dict_encodes_infinities(self):
        fld = make_discrete_field([0.0, 0.5, 1.0])
        d = interval_maxima([make_log_kernel()] * 2, fld, [0.1, 0.2]).to_dict()
        assert d["m"][1] == "-inf"
        assert d["regular"] is False

    def test_batch_matches_single(self):
        k = make_log_kernel()
        ys = [[0.2, 0.5], [0.1, 0.9], [0.33, 0.34]]
        batch = interval_maxima_batch([k, k], make_zero_field(), ys)
        for y, rep in zip(ys, batch):
            single = interval_maxima([k, k], make_zero_field(), y)
            assert np.array_equal(rep.m, single.m)


class TestClassify:
    def test_regular(self):
        assert classify(make_zero_field(), [make_log_kernel()], [0.5]).regular

    def test_degenerate(self):
        c = classify(make_zero_field(), [make_log_kernel()] * 2, [0.5, 0.5])
        assert c.status == "degenerate"

    def test_singular_index(self):
        fld = make_discrete_field([0.0, 0.5, 1.0])
        c = classify(fld, [make_log_kernel()] * 2, [0.6, 0.7])
        assert str(c) == "singular(1)"


# ------------------------------------------------------------------ properties

@given(y=node_vectors(), data=st.data())
@settings(max_examples=40, deadline=None)
def test_maxima_match_grid_oracle(y, data):
    n = y.size
    nu = np.asarray(data.draw(st.lists(st.floats(0.5, 3.0), min_size=n, max_size=n)))
    a = data.draw(st.sampled_from([0.0, 0.5, 1.0, 2.0]))
    b = data.draw(st.sampled_from([0.0, 1.0, 1.5]))
    fld = make_log_weight_field({"kind": "jacobi", "a": a, "b": b})
    kernels = [make_log_kernel(v) for v in nu]
    rep = interval_maxima(kernels, fld, y)

    def logw(t):
        with np.errstate(divide="ignore"):
            return (a * np.log(t) if a else 0.0) + (b * np.log1p(-t) if b else 0.0)

    ref = oracle_maxima(y, nu, logw)
    # the oracle is a lower bound up to its own refinement accuracy
    assert np.all(rep.m >= ref - 1e-9)
    assert np.allclose(rep.m, ref, atol=1e-7)
    assert np.allclose(rep.phi, np.diff(rep.m))


@given(y=node_vectors(max_n=4, gap=1e-3), data=st.data())
@settings(max_examples=40, deadline=None)
def test_discrete_maxima_exact(y, data):
    pts = np.unique(np.round(np.asarray(
        data.draw(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=10))), 6))
    assume(not np.any(np.isin(y, pts)))
    vals = np.asarray(data.draw(st.lists(st.floats(-3, 3), min_size=pts.size,
                                         max_size=pts.size)))
    fld = make_discrete_field(pts, vals)
    kernels = [make_log_kernel() for _ in y]
    rep = interval_maxima(kernels, fld, y)
    ref = discrete_maxima(pts, vals, y, np.ones(y.size))
    fin = np.isfinite(ref)
    assert np.array_equal(np.isfinite(rep.m), fin)
    assert np.allclose(rep.m[fin], ref[fin], atol=1e-12)
    assert classify(fld, kernels, y).regular == bool(fin.all())


@given(y=node_vectors(max_n=4), c=st.floats(-5, 5), t=st.floats(0, 1))
@settings(max_examples=40, deadline=None)
def test_sup_property_and_field_shift(y, c, t):
    kernels = [make_sine_kernel(1.0, 0.7) for _ in y]
    base = make_zero_field()
    shifted = make_log_weight_field(math.exp(c))
    r0 = interval_maxima(kernels, base, y)
    r1 = interval_maxima(kernels, shifted, y)
    assert np.allclose(r1.m, r0.m + c, atol=1e-12)
    assert np.allclose(r1.phi, r0.phi, atol=1e-12)
    ext = np.concatenate([[0.0], y, [1.0]])
    j = min(int(np.searchsorted(ext, t, side="right")) - 1, y.size)
    assert eval_F(kernels, base, y, t) <= r0.m[j] + 1e-12
    for j in range(y.size + 1):
        assert eval_F(kernels, base, y, r0.argmax[j]) == pytest.approx(r0.m[j], abs=1e-12)


def test_piecewise_field_with_isolated_point():
    # an isolated high value inside an interval dominates the maximum
    fld = make_piecewise_field([(0.0, 1.0, lambda t: 0 * t)], points=[(0.1, 5.0)])
    rep = interval_maxima([make_log_kernel()], fld, [0.5])
    assert rep.m[0] == pytest.approx(5.0 + math.log(0.4))
    assert rep.argmax[0] == pytest.approx(0.1)
