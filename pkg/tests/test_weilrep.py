import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from esrel.arith import xgcd
from esrel.weilrep import (
    I,
    ONE,
    MetaplecticElement,
    S_TILDE,
    T_TILDE,
    Zeta8,
    Zeta8Matrix,
    epsilon_d,
    kloosterman_half,
    kloosterman_int,
    kronecker,
    mp_mul,
    rho_from_word,
    rho_matrix,
    rho_S,
    rho_T,
    verify_weil_kloosterman,
    weil_kloosterman_scan,
)


def test_zeta8_arithmetic():
    z = Zeta8.zeta_power(1)
    assert z * z * z * z == Zeta8(-1)
    assert I * I == Zeta8(-1)
    x = Zeta8(Fraction(1, 2), 3, -1, Fraction(2, 7))
    assert x * x.inverse() == ONE
    assert abs(complex(x.conjugate()) - complex(x).conjugate()) < 1e-12


def test_generator_values():
    assert rho_T() == Zeta8Matrix.of(1, 0, 0, I)
    assert rho_matrix(T_TILDE.gamma) == rho_T()
    assert rho_matrix(S_TILDE) == rho_S()
    minus_i = Zeta8Matrix.identity() * (-I)
    assert rho_S() ** 2 == minus_i
    assert rho_matrix(mp_mul(S_TILDE, S_TILDE)) == minus_i


def test_relations():
    s, t = rho_S(), rho_T()
    assert s**4 == -Zeta8Matrix.identity()
    assert (s * t) ** 3 == s**2


def test_dual_is_conjugate():
    for g in [(2, 1, 7, 4), (1, 0, 4, 1), (3, 1, 2, 1)]:
        r = rho_matrix(g)
        assert r.transpose().inverse() == r.conjugate()


def test_odd_c_formula_example():
    g = MetaplecticElement((2, 1, 1, 1))
    pre = epsilon_d(1) / Zeta8(1, 0, 1, 0) * kronecker(2, 1)
    expected = Zeta8Matrix.of(1, I, Zeta8.i_power(2), -Zeta8.i_power(3)) * pre
    assert rho_matrix(g) == expected


def _random_element(rng, bound=50):
    while True:
        a, c = rng.randint(-bound, bound), rng.randint(-bound, bound)
        g, x, y = xgcd(a, c)
        if g == 1:
            # a d - b c = 1 with d = x, b = -y
            return MetaplecticElement((a, -y, c, x), rng.choice((1, -1)))


def test_closed_formula_matches_word_oracle():
    rng = random.Random(20240501)
    for _ in range(500):
        g = _random_element(rng)
        r = rho_matrix(g)
        assert r == rho_from_word(g)
        assert r.is_unitary()


def test_homomorphism():
    rng = random.Random(7)
    for _ in range(100):
        x, y = _random_element(rng, 12), _random_element(rng, 12)
        assert rho_matrix(mp_mul(x, y)) == rho_matrix(x) * rho_matrix(y)


def test_kronecker_symbol():
    assert kronecker(2, 7) == 1
    assert kronecker(2, 3) == -1
    assert kronecker(-1, 3) == -1
    assert kronecker(4, 6) == 0
    assert kronecker(5, -1) == 1 and kronecker(-5, -1) == -1
    with pytest.raises(ValueError):
        epsilon_d(4)


def test_kloosterman_examples():
    assert abs(kloosterman_half("3/2", 0, 0, 4) - mpmath.mpc(1, -1)) < 1e-30
    # two-term hand sum: d = 1 gives e(1/2) = -1, d = 3 gives (4/3) i e(3/2) = -i
    assert abs(kloosterman_half("1/2", 1, 1, 4) - mpmath.mpc(-1, -1)) < 1e-30
    assert kloosterman_int(1, 1, 1) == 1
    assert kloosterman_int(1, 1, 2) == 1
    for c in (5, 12, 30):
        assert abs(kloosterman_int(0, 0, c) - len([d for d in range(c) if __import__("math").gcd(d, c) == 1])) < 1e-30
    with pytest.raises(ValueError):
        kloosterman_half("3/2", 1, 1, 6)
    with pytest.raises(ValueError):
        kloosterman_half(1, 1, 1, 8)


@settings(max_examples=80, deadline=None)
@given(st.integers(-30, 30), st.integers(-30, 30), st.integers(1, 50))
def test_kloosterman_identities(m, n, c4):
    c = 4 * c4
    with mpmath.workprec(128):
        k32 = kloosterman_half("3/2", m, n, c)
        assert abs(kloosterman_half("7/2", m, n, c) - k32) < 1e-25
        assert abs(k32 - mpmath.mpc(0, -1) * kloosterman_half("1/2", -m, -n, c)) < 1e-25


def test_weil_identity_smallest_case():
    ok, res = verify_weil_kloosterman(0, 0, 0, 0, 1)
    assert ok and res < 1e-25


def test_weil_identity_rejects_bad_congruence():
    with pytest.raises(ValueError):
        verify_weil_kloosterman(0, 1, 0, 0, 3)


def test_completion_shift_covariance():
    # changing the completion of (c, d) multiplies rho by powers of rho(T) on either side
    t = rho_T()
    for c in (3, 6, 8, 15):
        for d in range(1, c):
            if __import__("math").gcd(c, d) != 1:
                continue
            _, x, y = xgcd(d, c)
            base = rho_matrix(MetaplecticElement((x, -y, c, d)))
            for j in range(-2, 3):
                for l in range(-2, 3):
                    a, b = x + j * c, -y + j * d
                    g = (a, b + l * a, c, d + l * c)
                    assert rho_matrix(MetaplecticElement(g)) == t**j * base * t**l


def test_small_scan():
    scan = weil_kloosterman_scan(mn_max=4, c_max=12)
    assert scan["max_residual"] < 1e-20
