"""Weil representation of ``Mp_2(Z)`` on ``C^2`` and half-integral weight Kloosterman sums.

Matrix entries are exact elements of ``Q(zeta_8)``; ``1/sqrt(2i) = (1 - i)/2``
already lies in ``Q(i)``, so no square-root bookkeeping is needed.  Kloosterman
sums are evaluated in ``mpmath`` at a caller-chosen precision.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp

from .arith import inverse_mod, units_mod, xgcd

__all__ = [
    "Zeta8",
    "Zeta8Matrix",
    "MetaplecticElement",
    "epsilon_d",
    "kronecker",
    "rho_T",
    "rho_S",
    "rho_matrix",
    "rho_from_word",
    "mp_mul",
    "kloosterman_half",
    "kloosterman_int",
    "verify_weil_kloosterman",
    "weil_kloosterman_scan",
]


# -- Q(zeta_8) ----------------------------------------------------------------


class Zeta8:
    """``a0 + a1 z + a2 z^2 + a3 z^3`` with ``z = exp(2 pi i / 8)``, ``z^4 = -1``."""

    __slots__ = ("c",)

    def __init__(self, a0=0, a1=0, a2=0, a3=0):
        self.c = (Fraction(a0), Fraction(a1), Fraction(a2), Fraction(a3))

    @classmethod
    def zeta_power(cls, k: int) -> "Zeta8":
        k %= 8
        sign = -1 if k >= 4 else 1
        cs = [0, 0, 0, 0]
        cs[k % 4] = sign
        return cls(*cs)

    @classmethod
    def i_power(cls, k: int) -> "Zeta8":
        return cls.zeta_power(2 * k)

    def __add__(self, other):
        other = _z8(other)
        return Zeta8(*(x + y for x, y in zip(self.c, other.c)))

    __radd__ = __add__

    def __neg__(self):
        return Zeta8(*(-x for x in self.c))

    def __sub__(self, other):
        return self + (-_z8(other))

    def __rsub__(self, other):
        return _z8(other) - self

    def __mul__(self, other):
        other = _z8(other)
        out = [Fraction(0)] * 4
        for i, x in enumerate(self.c):
            if not x:
                continue
            for j, y in enumerate(other.c):
                if not y:
                    continue
                k = i + j
                if k >= 4:
                    out[k - 4] -= x * y
                else:
                    out[k] += x * y
        return Zeta8(*out)

    __rmul__ = __mul__

    def galois(self, k: int) -> "Zeta8":
        """Image under ``z -> z^k`` for odd ``k``."""
        out = Zeta8()
        for j, x in enumerate(self.c):
            if x:
                out = out + Zeta8.zeta_power(j * k) * x
        return out

    def conjugate(self) -> "Zeta8":
        return self.galois(7)

    def inverse(self) -> "Zeta8":
        num = self.galois(3) * self.galois(5) * self.galois(7)
        norm = (self * num).c[0]
        if norm == 0:
            raise ZeroDivisionError("inverse of zero in Q(zeta_8)")
        return num * (1 / norm)

    def __truediv__(self, other):
        return self * _z8(other).inverse()

    def __eq__(self, other):
        try:
            other = _z8(other)
        except TypeError:
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def is_zero(self) -> bool:
        return not any(self.c)

    def to_mpc(self) -> mpmath.mpc:
        z = mpmath.expjpi(mpmath.mpf(1) / 4)
        return sum(
            (mpmath.mpf(x.numerator) / x.denominator * z**j for j, x in enumerate(self.c) if x),
            mpmath.mpc(0),
        )

    def __complex__(self) -> complex:
        z = cmath.exp(1j * cmath.pi / 4)
        return sum(float(x) * z**j for j, x in enumerate(self.c))

    def __repr__(self) -> str:
        return "Zeta8(" + ", ".join(str(x) for x in self.c) + ")"


def _z8(x) -> Zeta8:
    if isinstance(x, Zeta8):
        return x
    if isinstance(x, (int, Fraction)):
        return Zeta8(x)
    raise TypeError(f"cannot coerce {type(x).__name__} into Q(zeta_8)")


ONE = Zeta8(1)
I = Zeta8.i_power(1)


@dataclass(frozen=True)
class Zeta8Matrix:
    entries: tuple[tuple[Zeta8, Zeta8], tuple[Zeta8, Zeta8]]

    @classmethod
    def of(cls, a, b, c, d) -> "Zeta8Matrix":
        return cls(((_z8(a), _z8(b)), (_z8(c), _z8(d))))

    @classmethod
    def identity(cls) -> "Zeta8Matrix":
        return cls.of(1, 0, 0, 1)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __mul__(self, other):
        if isinstance(other, Zeta8Matrix):
            e, f = self.entries, other.entries
            return Zeta8Matrix(
                tuple(
                    tuple(e[i][0] * f[0][j] + e[i][1] * f[1][j] for j in range(2))
                    for i in range(2)
                )
            )
        s = _z8(other)
        return Zeta8Matrix(tuple(tuple(x * s for x in row) for row in self.entries))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __pow__(self, k: int) -> "Zeta8Matrix":
        if k < 0:
            return self.inverse() ** (-k)
        out = Zeta8Matrix.identity()
        for _ in range(k):
            out = out * self
        return out

    def conjugate(self) -> "Zeta8Matrix":
        return Zeta8Matrix(tuple(tuple(x.conjugate() for x in row) for row in self.entries))

    def transpose(self) -> "Zeta8Matrix":
        e = self.entries
        return Zeta8Matrix(((e[0][0], e[1][0]), (e[0][1], e[1][1])))

    def conj_transpose(self) -> "Zeta8Matrix":
        return self.conjugate().transpose()

    def det(self) -> Zeta8:
        e = self.entries
        return e[0][0] * e[1][1] - e[0][1] * e[1][0]

    def inverse(self) -> "Zeta8Matrix":
        e = self.entries
        inv_det = self.det().inverse()
        return Zeta8Matrix.of(e[1][1], -e[0][1], -e[1][0], e[0][0]) * inv_det

    def is_unitary(self) -> bool:
        return self * self.conj_transpose() == Zeta8Matrix.identity()

    def to_mpc(self):
        return [[x.to_mpc() for x in row] for row in self.entries]


# -- symbols ------------------------------------------------------------------


def epsilon_d(d: int) -> Zeta8:
    """``1`` for ``d = 1 mod 4`` and ``i`` for ``d = 3 mod 4``."""
    if d % 2 == 0:
        raise ValueError("epsilon_d needs odd d")
    return ONE if d % 4 == 1 else I


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol ``(a / n)``."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -1
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * _jacobi(a, n)


# -- metaplectic group ----------------------------------------------------------


@dataclass(frozen=True)
class MetaplecticElement:
    """``(gamma, sign * sqrt(c tau + d))`` with the principal square root."""

    gamma: tuple[int, int, int, int]
    sign: int = 1

    def __post_init__(self):
        a, b, c, d = self.gamma
        if a * d - b * c != 1:
            raise ValueError("gamma must have determinant 1")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def phi(self, tau: complex) -> complex:
        _, _, c, d = self.gamma
        return self.sign * cmath.sqrt(complex(c * tau + d))

    def act(self, tau: complex) -> complex:
        a, b, c, d = self.gamma
        return (a * tau + b) / (c * tau + d)


_TAU0 = complex(0.1234, 1.3579)

T_TILDE = MetaplecticElement((1, 1, 0, 1))
S_TILDE = MetaplecticElement((0, -1, 1, 0))


def mp_mul(x: MetaplecticElement, y: MetaplecticElement) -> MetaplecticElement:
    a1, b1, c1, d1 = x.gamma
    a2, b2, c2, d2 = y.gamma
    g = (a1 * a2 + b1 * c2, a1 * b2 + b1 * d2, c1 * a2 + d1 * c2, c1 * b2 + d1 * d2)
    val = x.phi(y.act(_TAU0)) * y.phi(_TAU0)
    ref = cmath.sqrt(complex(g[2] * _TAU0 + g[3]))
    return MetaplecticElement(g, 1 if (val / ref).real > 0 else -1)


def rho_T() -> Zeta8Matrix:
    return Zeta8Matrix.of(1, 0, 0, I)


def rho_S() -> Zeta8Matrix:
    # 1/sqrt(2i) = 1/(1+i) = (1-i)/2
    s = Zeta8(Fraction(1, 2), 0, Fraction(-1, 2), 0)
    return Zeta8Matrix.of(s, s, s, -s)


def rho_matrix(g: MetaplecticElement | tuple[int, int, int, int]) -> Zeta8Matrix:
    """Closed formula for ``rho(g)`` (three cases by ``c`` mod 4, ``c >= 0``)."""
    if not isinstance(g, MetaplecticElement):
        g = MetaplecticElement(tuple(g))
    a, b, c, d = g.gamma
    if c < 0:
        out = rho_matrix(MetaplecticElement((-a, -b, -c, -d))) * I
    elif c % 2 == 1:
        pre = epsilon_d(c) * Zeta8(Fraction(1, 2), 0, Fraction(-1, 2), 0) * kronecker(a, c)
        out = Zeta8Matrix.of(
            1, Zeta8.i_power(c * d), Zeta8.i_power(a * c), -Zeta8.i_power((a + d) * c)
        ) * pre
    elif c % 4 == 2:
        pre = epsilon_d(a).inverse() * kronecker(c, a)
        out = Zeta8Matrix.of(0, Zeta8.i_power(a * b), 1, 0) * pre
    else:
        pre = epsilon_d(a).inverse() * kronecker(c, a)
        out = Zeta8Matrix.of(1, 0, 0, Zeta8.i_power(a * b)) * pre
    return out if g.sign == 1 else -out


def rho_from_word(g: MetaplecticElement) -> Zeta8Matrix:
    """``rho(g)`` assembled from ``rho(T)`` and ``rho(S)`` along a Euclidean word.

    Independent of :func:`rho_matrix`; used as its oracle.
    """
    cur = g
    word = Zeta8Matrix.identity()  # rho of the generator product applied so far
    rt, rs = rho_T(), rho_S()
    while cur.gamma[2] != 0:
        a, b, c, d = cur.gamma
        k = -(d // c)
        if k:
            tk = MetaplecticElement((1, k, 0, 1))
            cur = mp_mul(cur, tk)
            word = word * rt**k
        cur = mp_mul(cur, S_TILDE)
        word = word * rs
    a, b, c, d = cur.gamma
    if a == 1:
        base = rt**b
    else:
        # (-I)~ T~^{-b} has the principal branch sqrt(-1) = i
        base = rs * rs * rt ** (-b)
    if cur.sign == -1:
        base = -base
    return base * word.inverse()


# -- Kloosterman sums -------------------------------------------------------------


@lru_cache(maxsize=256)
def _roots(c: int, bits: int) -> tuple:
    with mp.workprec(bits + 10):
        return tuple(mpmath.expjpi(mpmath.mpf(2 * k) / c) for k in range(c))


@lru_cache(maxsize=256)
def _half_terms(c: int, two_k: int) -> tuple:
    # (d, dbar, (c/d) eps_d^{2k}) as a power of i, or None when the symbol vanishes
    out = []
    for d in units_mod(c):
        chi = kronecker(c, d)
        if chi == 0:
            continue
        e = (two_k % 4) if d % 4 == 3 else 0
        ipow = (e + (2 if chi < 0 else 0)) % 4
        out.append((d, inverse_mod(d, c), ipow))
    return tuple(out)


_IPOW = (1, 1j, -1, -1j)


def kloosterman_half(k, m: int, n: int, c: int, bits: int = 128) -> mpmath.mpc:
    """``K_k(m, n, c) = sum_{d (c)*} (c/d) eps_d^{2k} e((m dbar + n d)/c)`` for ``4 | c``."""
    k = Fraction(k)
    two_k = 2 * k
    if two_k.denominator != 1 or two_k.numerator % 2 == 0:
        raise ValueError("k must be a half-odd integer")
    if c <= 0 or c % 4:
        raise ValueError("c must be a positive multiple of 4")
    roots = _roots(c, bits)
    with mp.workprec(bits + 10):
        acc = mpmath.mpc(0)
        for d, dbar, ipow in _half_terms(c, int(two_k)):
            acc += roots[(m * dbar + n * d) % c] * _IPOW[ipow]
        return acc


def kloosterman_int(m: int, n: int, c: int, bits: int = 128) -> mpmath.mpf:
    """Classical ``S(m, n; c) = sum_{d (c)*} e((m dbar + n d)/c)`` (a real number)."""
    if c <= 0:
        raise ValueError("c must be positive")
    counts: dict[int, int] = {}
    for d in units_mod(c):
        r = (m * inverse_mod(d, c) + n * d) % c
        counts[r] = counts.get(r, 0) + 1
    with mp.workprec(bits + 10):
        return mpmath.fsum(cnt * mpmath.cospi(mpmath.mpf(2 * r) / c) for r, cnt in counts.items())


@lru_cache(maxsize=512)
def _completions(c: int, bits: int) -> tuple:
    out = []
    for d in units_mod(c):
        if c == 1:
            d = 0
        g, x, y = xgcd(d, c)  # d x + c y = 1 -> a = x, b = -y
        gamma = (x, -y, c, d)
        with mp.workprec(bits + 10):
            out.append((gamma, rho_matrix(MetaplecticElement(gamma)).to_mpc()))
    return tuple(out)


def _weil_lhs(m: int, n: int, c: int, bits: int):
    # (1 + (4/c))/4 is 1/2 for odd c and 1/4 for even c
    return kloosterman_half(Fraction(3, 2), m, n, 4 * c, bits) * (1 + kronecker(4, c)) / 4


def _weil_rhs(alpha: int, beta: int, m: int, n: int, c: int, bits: int):
    roots = _roots(4 * c, bits)
    with mp.workprec(bits + 10):
        acc = mpmath.mpc(0)
        for (a, _b, _c, d), rho in _completions(c, bits):
            acc += rho[alpha][beta] * roots[(m * a + n * d) % (4 * c)]
        return acc


def verify_weil_kloosterman(alpha: int, beta: int, m: int, n: int, c: int, bits: int = 128):
    """Compare ``(1 + (4/c))/4 * K_{3/2}(m, n, 4c)`` with the Weil-representation sum.

    Returns ``(ok, residual)`` with ``ok`` meaning ``residual < 1e-20``.
    """
    if alpha not in (0, 1) or beta not in (0, 1):
        raise ValueError("alpha, beta must be 0 or 1")
    if (m + alpha) % 4 or (n + beta) % 4:
        raise ValueError("need m = -alpha and n = -beta mod 4")
    with mp.workprec(bits):
        lhs = _weil_lhs(m, n, c, bits)
        rhs = _weil_rhs(alpha, beta, m, n, c, bits)
        res = float(abs(lhs - rhs))
    return res < 1e-20, res


def weil_kloosterman_scan(mn_max: int = 8, c_max: int = 50, bits: int = 128) -> dict:
    """Exhaustive check over ``alpha, beta``, ``|m|, |n| <= mn_max``, ``c <= c_max``."""
    worst = 0.0
    worst_at = None
    count = 0
    for alpha in (0, 1):
        for beta in (0, 1):
            for m in range(-mn_max, mn_max + 1):
                if (m + alpha) % 4:
                    continue
                for n in range(-mn_max, mn_max + 1):
                    if (n + beta) % 4:
                        continue
                    for c in range(1, c_max + 1):
                        _, res = verify_weil_kloosterman(alpha, beta, m, n, c, bits)
                        count += 1
                        if res > worst:
                            worst, worst_at = res, (alpha, beta, m, n, c)
    return {"cases": count, "max_residual": worst, "worst_case": worst_at}
