from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from esrel.qseries import (
    PrecisionError,
    QSeries,
    delta,
    derivative_D,
    eisenstein,
    faber_jm,
    hecke_Tm,
    j_invariant,
    rc_bracket,
    series_arith,
    standard_form,
    tau_numbers,
    theta,
    u_operator,
)

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=12)


@st.composite
def series(draw, max_len=8):
    n = draw(st.integers(1, max_len))
    val = draw(st.integers(-3, 3))
    coeffs = draw(st.lists(fractions, min_size=n, max_size=n))
    return QSeries(coeffs, val, val + n)


def test_difference_of_squares():
    a = QSeries([1, 1], 0, 3)
    b = QSeries([1, -1], 0, 3)
    assert series_arith(a, b, "mul") == QSeries([1, 0, -1], 0, 3)


def test_geometric_inverse():
    inv = series_arith(QSeries([1, -1], 0, 4), op="invert")
    assert inv.coefficients() == [1, 1, 1, 1]
    assert inv.precision == 4


def test_invert_zero_raises():
    with pytest.raises(ZeroDivisionError):
        QSeries([0, 0], 0, 2).invert()


def test_precision_lookup_rules():
    f = QSeries([1, 2], 0, 2)
    assert f[-5] == 0
    with pytest.raises(PrecisionError):
        f[2]


def test_eisenstein_identity():
    assert eisenstein(4, 50) ** 3 - eisenstein(6, 50) ** 2 == delta(50).scale(1728)


def test_standard_coefficients():
    assert eisenstein(6, 5)[1] == -504
    assert j_invariant(5)[1] == 196884
    assert delta(5)[2] == -24
    assert standard_form("theta", 10)[4] == 2


def test_standard_form_rejects_bad_weight():
    with pytest.raises(ValueError):
        standard_form("E_3", 10)
    with pytest.raises(ValueError):
        eisenstein(2, 10)


def test_hecke_builds_j2():
    j = j_invariant(12)
    j2 = hecke_Tm(j - 744, 0, 2).scale(2)
    expected = j * j - j.scale(1488) + 159768
    assert j2 == expected
    assert hecke_Tm(j, 0, 1) is j


def test_faber_coefficients():
    assert faber_jm(3, 3)[1] == 2592899910
    assert faber_jm(2, 3)[1] == 42987520
    j1 = faber_jm(1, 4)
    assert (j1[-1], j1[0], j1[1], j1[2]) == (1, 0, 196884, 21493760)
    assert faber_jm(0, 5) == QSeries.constant(1, 5)


def test_hecke_needs_precision():
    with pytest.raises(PrecisionError):
        hecke_Tm(QSeries([], 0, 0), 12, 2)


def test_derivative():
    d = derivative_D(faber_jm(1, 3))
    assert (d[-1], d[0], d[1]) == (-1, 0, 196884)
    assert derivative_D(QSeries.constant(7, 5)).is_zero()
    assert derivative_D(QSeries.monomial(3, 6), 2) == QSeries.monomial(3, 6, 9)


def test_u_operator():
    assert u_operator(theta(20), 4)[1] == 2
    assert u_operator(faber_jm(1, 6), 2)[1] == 21493760
    f = QSeries(list(range(1, 13)), 0, 12)
    assert u_operator(f, 4).coefficients() == [1, 5, 9]


def test_bracket_order_zero_is_product():
    f, g = eisenstein(4, 10), theta(10)
    assert rc_bracket(f, 4, g, Fraction(1, 2), 0) == f * g


def test_bracket_order_one():
    f, g = eisenstein(4, 10), eisenstein(6, 10)
    # r = 0 gives k f Dg, r = 1 gives -l Df g
    expected = f * derivative_D(g).scale(4) - derivative_D(f).scale(6) * g
    assert rc_bracket(f, 4, g, 6, 1) == expected


def test_bracket_rejects_bad_weight():
    with pytest.raises(ValueError):
        rc_bracket(theta(5), 0, theta(5), 1, 1)


def test_tau_numbers():
    taus = tau_numbers(30)
    d = delta(31)
    assert all(taus[n] == d[n] for n in range(1, 31))
    assert tau_numbers(10)[10] == -115920


def test_json_roundtrip():
    f = faber_jm(2, 5).scale(Fraction(1, 3))
    assert QSeries.from_json(f.to_json()) == f


@settings(max_examples=60, deadline=None)
@given(series(), series(), series())
def test_multiplication_ring_laws(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)


@settings(max_examples=60, deadline=None)
@given(series(), series())
def test_leibniz(a, b):
    assert derivative_D(a * b) == derivative_D(a) * b + a * derivative_D(b)


@settings(max_examples=40, deadline=None)
@given(series(max_len=6), st.integers(1, 3))
def test_power_matches_repeated_product(a, k):
    out = a
    for _ in range(k - 1):
        out = out * a
    assert a**k == out


@settings(max_examples=40, deadline=None)
@given(st.lists(fractions, min_size=40, max_size=40))
def test_u_composition(coeffs):
    f = QSeries(coeffs, 0, 40)
    assert u_operator(u_operator(f, 2), 3) == u_operator(f, 6)


@settings(max_examples=40, deadline=None)
@given(series(max_len=6), series(max_len=6), st.integers(0, 3))
def test_bracket_antisymmetry(a, b, nu):
    lhs = rc_bracket(a, 4, b, 4, nu)
    rhs = rc_bracket(b, 4, a, 4, nu).scale((-1) ** nu)
    assert lhs == rhs


@pytest.mark.parametrize("m,n", [(2, 3), (3, 5), (2, 5)])
def test_hecke_multiplicative(m, n):
    f = delta(m * n * 8 + 1) * eisenstein(4, m * n * 8 + 1)
    a = hecke_Tm(hecke_Tm(f, 16, m), 16, n)
    b = hecke_Tm(hecke_Tm(f, 16, n), 16, m)
    c = hecke_Tm(f, 16, m * n)
    assert a == b == c


@pytest.mark.parametrize("prec", [10, 40, 120])
def test_eisenstein_identity_at_several_precisions(prec):
    assert eisenstein(4, prec) ** 3 - eisenstein(6, prec) ** 2 == delta(prec).scale(1728)
