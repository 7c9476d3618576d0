from __future__ import annotations

import json
import math

import numpy as np
import pytest

from sumtrans.config import (ProblemConfig, compile_expression, config_hash, factor_kernel,
                             field_from_record, kernel_from_record, kernels_from_config,
                             load_config, parse_weight)
from sumtrans.exceptions import InvalidParameterError


class TestExpressions:
    def test_power_and_functions(self):
        f = compile_expression("t^2 + sqrt(t) - log(1 + t)")
        t = np.array([0.25, 1.0])
        assert np.allclose(f(t), t ** 2 + np.sqrt(t) - np.log1p(t))

    def test_constants(self):
        assert compile_expression("sin(pi * t)")(np.array([0.5]))[0] == pytest.approx(1.0)

    def test_scalar_broadcast(self):
        assert compile_expression("2")(np.zeros(3)).tolist() == [2.0, 2.0, 2.0]

    @pytest.mark.parametrize("bad", ["__import__('os')", "t.real", "(lambda: 1)()",
                                     "open('x')", "x + 1", "t if t else 1", "'a'", "",
                                     "t[0]", "1 +"])
    def test_rejects_unsafe_or_malformed(self, bad):
        with pytest.raises(InvalidParameterError):
            compile_expression(bad)


class TestRecords:
    @pytest.mark.parametrize("rec,value", [
        ({"kind": "log", "nu": 2}, 2 * math.log(0.5)),
        ({"kind": "sine", "a": 0.5}, math.log(math.sin(math.pi / 4))),
        ({"kind": "sqrt"}, math.sqrt(0.5)),
        ({"kind": "reciprocal"}, -4.0),
        ({"kind": "example81"}, math.log(0.5)),
        ({"kind": "example83"}, -4.0),
        ("log", math.log(0.5)),
    ])
    def test_kernel_records(self, rec, value):
        assert kernel_from_record(rec).eval(0.5) == pytest.approx(value)

    def test_piecewise_kernel_record(self):
        rec = {"kind": "piecewise", "strictly_concave": True, "pm_constant": 4,
               "pieces": [{"lo": -1, "hi": 0, "f": "log(-t)"},
                          {"lo": 0, "hi": 1, "f": "log(t)", "df": "1/t"}]}
        k = kernel_from_record(rec)
        assert k.singular and k.pm_constant == 4.0
        assert k.d_minus(0.5) == pytest.approx(2.0)
        assert k.d_minus(-0.5) == pytest.approx(-2.0, abs=1e-6)

    @pytest.mark.parametrize("rec", [{"kind": "nope"}, {"nu": 1}, 3, {"kind": "log", "nu": "x"}])
    def test_bad_kernel_records(self, rec):
        with pytest.raises(InvalidParameterError):
            kernel_from_record(rec)

    def test_kernels_from_config(self):
        assert len(kernels_from_config({"kind": "log"}, 3)) == 3
        assert len(kernels_from_config([{"kind": "log"}], 2)) == 2
        with pytest.raises(InvalidParameterError):
            kernels_from_config([{"kind": "log"}] * 2, 3)
        with pytest.raises(InvalidParameterError):
            kernels_from_config(None, 0)

    @pytest.mark.parametrize("rec,t,value", [
        ({"kind": "zero"}, 0.3, 0.0),
        ({"kind": "discrete", "points": [0.2, 0.4], "values": [1, 2]}, 0.4, 2.0),
        ({"kind": "logweight", "w": "t*(1-t)"}, 0.5, math.log(0.25)),
        ({"kind": "logweight", "w": 2}, 0.5, math.log(2)),
        ({"kind": "logweight", "w": {"kind": "jacobi", "a": 1, "b": 0}}, 0.5, math.log(0.5)),
        ({"kind": "piecewise", "pieces": [{"lo": 0, "hi": 1, "f": "-t"}],
          "points": [[0.5, 3]]}, 0.5, 3.0),
        ({"kind": "sampled", "t": [0, 1], "values": [0, 1]}, 0.9, 1.0),
        ({"kind": "example81"}, 0.5, 0.0),
        ({"kind": "example82"}, 0.75, 1.0),
        ({"kind": "example83"}, 0.0, 1.0),
    ])
    def test_field_records(self, rec, t, value):
        assert field_from_record(rec).eval(t) == pytest.approx(value)

    def test_bad_field(self):
        with pytest.raises(InvalidParameterError):
            field_from_record({"kind": "weird"})

    def test_weight_spec(self):
        assert parse_weight("2.5") == 2.5
        assert parse_weight(None) is None
        assert callable(parse_weight("t^2"))


class TestFactorKernel:
    def test_power(self):
        assert factor_kernel("t^2").pm_constant == 8.0
        assert factor_kernel("|t|").pm_constant == 4.0
        assert factor_kernel("t").eval(0.5) == pytest.approx(math.log(0.5))

    def test_general_expression(self):
        k = factor_kernel("t*(2-abs(t))")
        assert k.eval(0.5) == pytest.approx(math.log(0.75))
        assert k.singular


class TestProblemConfig:
    def test_infers_n(self):
        cfg = ProblemConfig.from_dict({"target": [0.1, 0.2]})
        assert cfg.n == 2
        assert len(cfg.build_kernels()) == 2

    @pytest.mark.parametrize("d", [{"n": 0}, {"n": 2, "target": [1.0]}, {"n": "2"},
                                   {"n": 3, "kernels": [{"kind": "log"}] * 2},
                                   {"bogus": 1}, {"solver": {"nope": 1}}, [1, 2]])
    def test_validation(self, d):
        with pytest.raises(InvalidParameterError):
            ProblemConfig.from_dict(d)

    def test_solver_overrides(self):
        cfg = ProblemConfig.from_dict({"n": 1, "solver": {"max_iters": 7}})
        assert cfg.solve_config(seed=3).max_iters == 7

    def test_load(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps({"n": 1, "kernels": [{"kind": "log"}], "target": [0.0]}))
        assert load_config(p).target == [0.0]
        bad = tmp_path / "bad.json"
        bad.write_text("{nope")
        with pytest.raises(InvalidParameterError):
            load_config(bad)
        with pytest.raises(InvalidParameterError):
            load_config(tmp_path / "missing.json")

    def test_hash_is_order_independent(self):
        assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})
        assert config_hash({"a": 1}) != config_hash({"a": 2})
