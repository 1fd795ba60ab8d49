import json
import logging

import mpmath
import pytest

from esrel.cmtrace import (
    RoundingError,
    TraceCache,
    TraceRecord,
    cm_point,
    eval_j1,
    eval_jm,
    trace_bits,
    trace_tm,
)
from esrel.quadforms import QuadForm, enumerate_reduced, hurwitz_H, stabilizer_order


def test_cm_points():
    mpmath.mp.prec = 100
    assert abs(cm_point(QuadForm(1, 1, 1)) - mpmath.mpc(-0.5, mpmath.sqrt(3) / 2)) < 1e-25
    assert abs(cm_point(QuadForm(1, 0, 1)) - 1j) < 1e-25
    assert abs(cm_point(QuadForm(2, 1, 2)) - mpmath.mpc(-0.25, mpmath.sqrt(15) / 4)) < 1e-25
    mpmath.mp.prec = 53
    with pytest.raises(ValueError):
        cm_point(QuadForm(1, 2, 1))


def test_j_at_elliptic_points():
    with mpmath.workprec(160):
        rho = mpmath.mpc(mpmath.mpf(1) / 2, mpmath.sqrt(3) / 2)
        assert abs(eval_j1(rho, 128) + 744) < 1e-20
        assert abs(eval_j1(mpmath.mpc(0, 1), 128) - 984) < 1e-20
    assert eval_jm(0, 1j) == 1


def test_height_cutoff():
    with pytest.raises(ValueError):
        eval_jm(1, mpmath.mpc(0, 0.5))


def test_eval_jm_matches_hecke_sum():
    # j_2(i) from the polynomial j^2 - 1488 j + 159768 at j(i) = 1728
    val = eval_jm(2, mpmath.mpc(0, 1), 128)
    assert abs(val - (1728**2 - 1488 * 1728 + 159768)) < 1e-15


@pytest.mark.parametrize(
    "m,d,value",
    [(1, 3, -248), (1, 4, 492), (1, 15, -192513), (2, 0, 6), (3, -4, 0), (2, -4, -2), (6, -9, -3), (1, 5, 0)],
)
def test_trace_examples(m, d, value):
    rec = trace_tm(m, d)
    assert rec.value == value
    assert rec.err < 1e-4


def test_t0_is_hurwitz():
    for d in range(0, 300):
        assert trace_tm(0, d).value == hurwitz_H(d)


def test_t0_negative_warns(caplog):
    with caplog.at_level(logging.WARNING):
        assert trace_tm(0, -4).value == 0
    assert "no convention" in caplog.text


def test_representative_independence():
    # a non-reduced translate of each class gives the same trace at the same precision
    d, bits = 191, trace_bits(1, 191)
    with mpmath.workprec(bits + 16):
        total = mpmath.mpf(0)
        for q in enumerate_reduced(d):
            tau = cm_point(q.act(1, 2, 0, 1), bits + 16)  # tau - 2
            total += eval_j1(tau + 2, bits).real / stabilizer_order(q)
        assert abs(total - trace_tm(1, d).value) < mpmath.mpf(2) ** (-bits + 8) * abs(total) + 1e-6


def test_cache_file_roundtrip(tmp_path):
    path = tmp_path / "traces.ndjson"
    cache = TraceCache(path)
    rec = trace_tm(2, 23, cache=cache)
    assert cache.get(2, 23) == rec
    reread = TraceCache(path)
    assert reread.get(2, 23).value == rec.value
    line = path.read_text().splitlines()[0]
    assert json.loads(line)["t"] == str(rec.value)
    assert TraceRecord.from_json(line) == rec


def test_rounding_error_surfaces(monkeypatch):
    import esrel.cmtrace as cm

    monkeypatch.setattr(cm, "_numeric_trace", lambda m, d, bits: mpmath.mpf("0.5"))
    with pytest.raises(RoundingError):
        cm.trace_tm(1, 7, cache=TraceCache())


@pytest.mark.parametrize("m", [1, 2, 3])
def test_integrality_small_range(m):
    for d in range(3, 300):
        if d % 4 in (0, 3):
            rec = trace_tm(m, d)
            assert rec.value.denominator == 1
            assert rec.err < 1e-4


def test_first_trace_sum_identity():
    from math import isqrt

    for n in range(1, 51):
        b = isqrt(4 * n + 1)
        assert sum(trace_tm(1, 4 * n - r * r).value for r in range(-b, b + 1)) == 0
