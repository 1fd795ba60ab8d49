from fractions import Fraction

import mpmath
import pytest

from esrel.lfunc import (
    InstabilityError,
    LValueResult,
    eigen_remainder,
    mobius_recombination,
    petersson_norm,
    shifted_conv_direct,
    thm14_invert,
    tr_m,
    verify_cor_1_5,
)
from esrel.poincare import poincare_cuspful

NORM_TARGET = 1.0353e-6


def test_zero_shift_vanishes():
    res = shifted_conv_direct(0, N=10**4)
    assert res.value == 0 and res.method == "direct_sum"


def test_direct_sum_guards():
    with pytest.raises(ValueError):
        shifted_conv_direct(1, N=3)
    with pytest.raises(ValueError):
        shifted_conv_direct(1, weight=16, N=10**4)


def test_direct_sum_small_cutoff_is_near():
    res = shifted_conv_direct(1, N=10**5)
    assert abs(res.value + 33.383) < 0.5


def test_norm_of_delta():
    n = petersson_norm(12)
    assert abs(n / NORM_TARGET - 1) < 1e-4


def test_norm_weight_16_positive_and_stable():
    n = petersson_norm(16)
    assert n > 0
    assert abs(n - petersson_norm(16, cutoff=500)) < 1e-8 * n


def test_norm_rejects_dimension_two():
    with pytest.raises(ValueError):
        petersson_norm(24)
    with pytest.raises(ValueError):
        tr_m(1, weight=24)


def test_norm_instability(monkeypatch):
    import esrel.lfunc as lf

    calls = iter([(mpmath.mpf(2), 0.0), (mpmath.mpf(3), 0.0)])
    monkeypatch.setattr(lf, "holomorphic_first_coefficient", lambda *a, **k: next(calls))
    with pytest.raises(InstabilityError):
        lf.petersson_norm(12)


def test_eigencoefficient_exact():
    assert eigen_remainder(1, 5) == Fraction(-82104, 691)


def test_inversion_values():
    one = thm14_invert(1)
    two = thm14_invert(2)
    assert abs(one.value + 33.383) < 1e-2
    assert abs(two.value - 266.439) < 1e-2
    assert one.method == "thm14_inversion" and one.s == 11
    assert one.reported_error < 1e-6


def test_tr_m_values():
    assert abs(tr_m(1) - Fraction(-65520, 691)) < 1e-2
    with mpmath.workprec(192):
        alpha = poincare_cuspful(12, 1, 2).cusp_coeffs[0]
        assert abs(tr_m(1, m=2) - (72 - (alpha - mpmath.mpf(1746612) / 691))) < 1e-20
        assert abs(tr_m(2) - tr_m(1) * -24) < 1e-20


def test_rebuilt_traces_small():
    rep = verify_cor_1_5(1, n_max=4)
    assert rep.status, rep.first_failure
    assert rep.details["max_relative_error"] < 1e-10


def test_mobius_recombination():
    rep = mobius_recombination(2)
    assert rep.status, rep.first_failure


def test_result_serializes():
    d = LValueResult("Delta", 1, 11, -33.38, "direct_sum", 0.1).to_dict()
    assert d["method"] == "direct_sum" and d["reported_error"] == 0.1
