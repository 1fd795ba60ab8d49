"""Exact truncated Laurent series in ``q`` and the operators acting on them.

A :class:`QSeries` stores the coefficients of ``q^n`` for
``valuation <= n < precision`` as :class:`fractions.Fraction` values.  The
``precision`` is an exclusive bound: everything at or above it is unknown, and
asking for such a coefficient is an error rather than a silent zero.

Products are formed by clearing denominators and multiplying packed integers
(Kronecker substitution through GMP), which keeps the level-one constructions
(``Delta``, ``j`` and the ``j_m``) fast at a few thousand terms.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt, lcm
from numbers import Rational
from typing import Iterable, Mapping

import gmpy2
import numpy as np

from .arith import divisors

__all__ = [
    "QSeries",
    "PrecisionError",
    "series_arith",
    "standard_form",
    "eisenstein",
    "delta",
    "j_invariant",
    "theta",
    "hecke_Tm",
    "faber_jm",
    "derivative_D",
    "u_operator",
    "rc_bracket",
    "sigma_table",
    "tau_numbers",
]


class PrecisionError(ValueError):
    """Raised when a coefficient beyond the known window is requested."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"exact rational expected, got {type(x).__name__}")


# -- packed integer convolution ---------------------------------------------

_LEAF = 32


def _pack(xs: list, bits: int) -> gmpy2.mpz:
    if len(xs) <= _LEAF:
        acc = gmpy2.mpz(0)
        for x in reversed(xs):
            acc = (acc << bits) + x
        return acc
    h = len(xs) // 2
    return _pack(xs[:h], bits) + (_pack(xs[h:], bits) << (bits * h))


def _unpack(v: gmpy2.mpz, count: int, bits: int, out: list) -> None:
    # v holds signed digits |d_i| < 2**(bits-1)
    if count <= _LEAF:
        half = gmpy2.mpz(1) << (bits - 1)
        full = gmpy2.mpz(1) << bits
        mask = full - 1
        for _ in range(count):
            d = v & mask
            if d >= half:
                d -= full
            out.append(int(d))
            v = (v - d) >> bits
        return
    h = count // 2
    sh = bits * h
    low = v & ((gmpy2.mpz(1) << sh) - 1)
    if low >> (sh - 1):
        low -= gmpy2.mpz(1) << sh
    _unpack(low, h, bits, out)
    _unpack((v - low) >> sh, count - h, bits, out)


def _int_convolve(xs: list[int], ys: list[int], n_out: int) -> list[int]:
    """First ``n_out`` terms of the Cauchy product of two integer sequences."""
    xs = xs[:n_out]
    ys = ys[:n_out]
    if not xs or not ys:
        return [0] * n_out
    bx = max(abs(x) for x in xs).bit_length()
    by = max(abs(y) for y in ys).bit_length()
    if bx == 0 or by == 0:
        return [0] * n_out
    bits = bx + by + min(len(xs), len(ys)).bit_length() + 2
    prod = _pack([gmpy2.mpz(x) for x in xs], bits) * _pack([gmpy2.mpz(y) for y in ys], bits)
    prod &= (gmpy2.mpz(1) << (bits * n_out)) - 1
    if n_out and prod >> (bits * n_out - 1):
        prod -= gmpy2.mpz(1) << (bits * n_out)
    out: list[int] = []
    _unpack(prod, n_out, bits, out)
    return out


def _clear(cs: Iterable[Fraction]) -> tuple[list[int], int]:
    cs = list(cs)
    den = 1
    for c in cs:
        den = lcm(den, c.denominator)
    return [c.numerator * (den // c.denominator) for c in cs], den


# -- the series type ---------------------------------------------------------


class QSeries:
    """Truncated Laurent series ``sum_{valuation <= n < precision} c_n q^n``."""

    __slots__ = ("valuation", "precision", "_c")
    __hash__ = None  # equality is "agrees at common precision"

    def __init__(self, coeffs, valuation: int = 0, precision: int | None = None):
        if isinstance(coeffs, Mapping):
            items = {int(k): _frac(v) for k, v in coeffs.items()}
            if precision is None:
                raise ValueError("precision is required for dict input")
            if items:
                valuation = min(valuation, min(items))
            for k in items:
                if k >= precision:
                    raise ValueError(f"exponent {k} outside precision {precision}")
            cs = [Fraction(0)] * max(precision - valuation, 0)
            for k, v in items.items():
                cs[k - valuation] = v
        else:
            cs = [_frac(c) for c in coeffs]
            if precision is None:
                precision = valuation + len(cs)
            if len(cs) > precision - valuation:
                cs = cs[: max(precision - valuation, 0)]
            else:
                cs.extend([Fraction(0)] * (precision - valuation - len(cs)))
        self.valuation = int(valuation)
        self.precision = int(precision)
        self._c = tuple(cs)

    # -- access ----------------------------------------------------------------

    @classmethod
    def _raw(cls, cs, valuation: int, precision: int) -> "QSeries":
        obj = cls.__new__(cls)
        obj.valuation = valuation
        obj.precision = precision
        obj._c = tuple(cs)
        return obj

    @classmethod
    def monomial(cls, n: int, precision: int, coeff=1) -> "QSeries":
        if n >= precision:
            raise PrecisionError("monomial lies beyond the precision bound")
        return cls([coeff], n, precision)

    @classmethod
    def constant(cls, c, precision: int) -> "QSeries":
        return cls([c], 0, precision)

    def __getitem__(self, n: int) -> Fraction:
        if n >= self.precision:
            raise PrecisionError(f"coefficient of q^{n} unknown (precision {self.precision})")
        if n < self.valuation:
            return Fraction(0)
        return self._c[n - self.valuation]

    def coefficients(self, start: int | None = None, stop: int | None = None) -> list[Fraction]:
        start = self.valuation if start is None else start
        stop = self.precision if stop is None else stop
        return [self[n] for n in range(start, stop)]

    def items(self):
        for i, c in enumerate(self._c):
            if c:
                yield self.valuation + i, c

    def order(self) -> int | None:
        """Exponent of the first nonzero coefficient, ``None`` for ``O(q^prec)``."""
        for i, c in enumerate(self._c):
            if c:
                return self.valuation + i
        return None

    def principal_part(self) -> dict[int, Fraction]:
        return {n: c for n, c in self.items() if n < 0}

    def truncate(self, precision: int) -> "QSeries":
        if precision > self.precision:
            raise PrecisionError("cannot raise the precision of a series")
        if precision <= self.valuation:
            return QSeries._raw((), precision, precision)
        return QSeries._raw(self._c[: precision - self.valuation], self.valuation, precision)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self._c)

    def is_zero(self) -> bool:
        return not any(self._c)

    def __repr__(self) -> str:
        terms = []
        for n, c in self.items():
            if len(terms) == 6:
                terms.append("...")
                break
            terms.append(f"{c}*q^{n}")
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O(q^{self.precision})"

    # -- arithmetic ------------------------------------------------------------

    def _coerce(self, other) -> "QSeries":
        if isinstance(other, QSeries):
            return other
        if self.precision <= 0:
            raise PrecisionError("constant term beyond precision")
        return QSeries.constant(_frac(other), self.precision)

    def __add__(self, other) -> "QSeries":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        lo = min(self.valuation, other.valuation)
        hi = min(self.precision, other.precision)
        if hi <= lo:
            return QSeries._raw((), hi, hi)
        return QSeries._raw([self[n] + other[n] for n in range(lo, hi)], lo, hi)

    __radd__ = __add__

    def __neg__(self) -> "QSeries":
        return QSeries._raw([-c for c in self._c], self.valuation, self.precision)

    def __sub__(self, other) -> "QSeries":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "QSeries":
        return (-self) + other

    def scale(self, c) -> "QSeries":
        c = _frac(c)
        return QSeries._raw([c * x for x in self._c], self.valuation, self.precision)

    def shift(self, k: int) -> "QSeries":
        """Multiply by ``q^k``."""
        return QSeries._raw(self._c, self.valuation + k, self.precision + k)

    def __mul__(self, other) -> "QSeries":
        if isinstance(other, QSeries):
            return _mul(self, other)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other) -> "QSeries":
        return self.__mul__(other)

    def __truediv__(self, other) -> "QSeries":
        if isinstance(other, QSeries):
            return _mul(self, other.invert())
        return self.scale(1 / _frac(other))

    def __pow__(self, k: int) -> "QSeries":
        if not isinstance(k, int):
            raise TypeError("integer exponent required")
        if k < 0:
            return self.invert() ** (-k)
        if k == 0:
            v = self.order()
            if v is None:
                raise PrecisionError("0**0 of an unknown series")
            return QSeries.constant(1, self.precision - v)
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def invert(self) -> "QSeries":
        v = self.order()
        if v is None:
            raise ZeroDivisionError("inverse of a series with no known nonzero term")
        rel = self.precision - v
        a = [self[v + i] for i in range(rel)]
        inv = _invert_unit(a, rel)
        return QSeries._raw(inv, -v, rel - v)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            try:
                other = self._coerce(other)
            except TypeError:
                return NotImplemented
        hi = min(self.precision, other.precision)
        lo = min(self.valuation, other.valuation)
        return all(self[n] == other[n] for n in range(lo, hi))

    def first_difference(self, other: "QSeries") -> int | None:
        hi = min(self.precision, other.precision)
        lo = min(self.valuation, other.valuation)
        for n in range(lo, hi):
            if self[n] != other[n]:
                return n
        return None

    # -- serialization -----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "valuation": self.valuation,
            "precision": self.precision,
            "coeffs": {str(n): f"{c.numerator}/{c.denominator}" for n, c in self.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Mapping) -> "QSeries":
        return cls(
            {int(k): Fraction(v) for k, v in data["coeffs"].items()},
            int(data["valuation"]),
            int(data["precision"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "QSeries":
        return cls.from_dict(json.loads(text))


def _mul(a: QSeries, b: QSeries) -> QSeries:
    va, vb = a.order(), b.order()
    if va is None or vb is None:
        # one factor is O(q^p); the product is known only up to p + order(other)
        pa = a.precision + (vb if vb is not None else b.precision)
        pb = b.precision + (va if va is not None else a.precision)
        p = min(pa, pb)
        return QSeries._raw((), p, p)
    prec = min(a.precision + vb, b.precision + va)
    n_out = prec - va - vb
    if n_out <= 0:
        raise PrecisionError("product has an empty coefficient window")
    xs, dx = _clear(a._c[va - a.valuation:])
    ys, dy = _clear(b._c[vb - b.valuation:])
    raw = _int_convolve(xs, ys, n_out)
    den = dx * dy
    return QSeries._raw([Fraction(c, den) for c in raw], va + vb, prec)


def _invert_unit(a: list[Fraction], n: int) -> list[Fraction]:
    """Inverse of a power series with ``a[0] != 0`` to ``n`` terms (Newton)."""
    inv = [1 / a[0]]
    k = 1
    while k < n:
        k2 = min(2 * k, n)
        f = QSeries._raw(a[:k2], 0, k2)
        g = QSeries._raw(inv, 0, k2)
        e = _mul(f, g)  # 1 + O(q^k)
        corr = _mul(g, QSeries._raw([-c for c in e._c[k:]], k, k2))
        inv = inv + [corr[i] for i in range(k, k2)]
        k = k2
    return inv[:n]


def series_arith(a: QSeries, b: QSeries | None = None, op: str = "add", k: int | None = None) -> QSeries:
    """Dispatch form of the arithmetic operators (``add``, ``mul``, ``pow``, ``invert``)."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "pow":
        return a ** int(k)
    if op == "invert":
        return a.invert()
    raise ValueError(f"unknown op {op!r}")


# -- standard forms ----------------------------------------------------------


def sigma_table(k: int, n_max: int) -> list[int]:
    """``[sigma_k(0) := 0, sigma_k(1), ..., sigma_k(n_max)]`` by a divisor sieve."""
    out = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        dk = d**k
        for m in range(d, n_max + 1, d):
            out[m] += dk
    return out


def _bernoulli(n: int) -> Fraction:
    # Akiyama-Tanigawa
    a = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    return a[0] if n != 1 else Fraction(-1, 2)


class _Grow:
    """Keeps the longest expansion computed so far and truncates on demand."""

    def __init__(self, build):
        self.build = build
        self.cache: dict = {}

    def __call__(self, key, precision: int) -> QSeries:
        have = self.cache.get(key)
        if have is None or have.precision < precision:
            have = self.build(key, max(precision, 2 * have.precision if have else precision))
            self.cache[key] = have
        return have.truncate(precision)


def _build_eisenstein(weight: int, precision: int) -> QSeries:
    c = -Fraction(2 * weight) / _bernoulli(weight)
    sig = sigma_table(weight - 1, max(precision - 1, 0))
    cs = [Fraction(1)] + [c * sig[n] for n in range(1, precision)]
    return QSeries._raw(cs[:precision], 0, precision)


_eis = _Grow(_build_eisenstein)


def eisenstein(weight: int, precision: int) -> QSeries:
    """Normalized level-one Eisenstein series ``E_weight = 1 + O(q)``."""
    if weight < 4 or weight % 2:
        raise ValueError("Eisenstein series need even weight >= 4")
    if precision < 1:
        raise PrecisionError("precision must be >= 1")
    return _eis(weight, precision)


def _build_eta24(_key, n: int) -> QSeries:
    # prod (1-q^k)^24 via n F_n = -24 sum_{k=1}^n sigma_1(k) F_{n-k}
    sig = sigma_table(1, n)
    f = [0] * n
    f[0] = 1
    for m in range(1, n):
        s = 0
        for k in range(1, m + 1):
            s += sig[k] * f[m - k]
        f[m] = -24 * s // m
    return QSeries._raw([Fraction(x) for x in f], 0, n)


_eta24 = _Grow(_build_eta24)


def delta(precision: int) -> QSeries:
    """``Delta = q prod (1 - q^n)^24``."""
    if precision < 1:
        raise PrecisionError("precision must be >= 1")
    return _eta24("eta24", max(precision - 1, 1)).shift(1).truncate(precision)


def _build_j(_key, precision: int) -> QSeries:
    # j = E4^3 / Delta; E4^3 needs precision + 1 terms
    e4 = eisenstein(4, precision + 1)
    return (e4**3) * delta(precision + 2).invert()


_jser = _Grow(_build_j)


def j_invariant(precision: int) -> QSeries:
    """``j = q^-1 + 744 + 196884 q + ...`` known for exponents ``< precision``."""
    if precision < 0:
        raise PrecisionError("precision must be >= 0")
    return _jser("j", precision)


def theta(precision: int) -> QSeries:
    """Jacobi theta ``sum_{n in Z} q^{n^2}``."""
    if precision < 1:
        raise PrecisionError("precision must be >= 1")
    cs = [Fraction(0)] * precision
    for n in range(isqrt(precision - 1) + 1):
        cs[n * n] += 1 if n == 0 else 2
    return QSeries._raw(cs, 0, precision)


def standard_form(name: str, precision: int) -> QSeries:
    """Look up ``E4``, ``E6``, ..., ``Delta``, ``j`` or ``theta`` by name."""
    key = name.replace("_", "").lower()
    if key.startswith("e") and key[1:].isdigit():
        return eisenstein(int(key[1:]), precision)
    if key == "delta":
        return delta(precision)
    if key == "j":
        return j_invariant(precision)
    if key == "theta":
        return theta(precision)
    raise ValueError(f"unknown form {name!r}")


# -- operators ---------------------------------------------------------------


def hecke_Tm(f: QSeries, weight: int, m: int) -> QSeries:
    """Weight-``weight`` Hecke operator on a level-one q-expansion.

    ``(T_m f)_n = sum_{d | (m, n)} d^(weight-1) a(mn/d^2)``; negative ``n``
    (principal parts) are handled by the same rule.
    """
    if m < 1:
        raise ValueError("m must be positive")
    if weight < 0 or weight % 2:
        raise ValueError("weight must be even and non-negative")
    if m == 1:
        return f
    if f.precision < 1:
        raise PrecisionError("insufficient input precision for T_m")
    prec = (f.precision - 1) // m + 1
    v = f.valuation
    lo = min(v * m, -((-v) // m)) if v < 0 else -((-v) // m)
    w1 = weight - 1
    out = []
    for n in range(lo, prec):
        s = Fraction(0)
        for d in divisors(gcd(m, n) if n else m):
            s += Fraction(d) ** w1 * f[m * n // (d * d)]
        out.append(s)
    return QSeries._raw(out, lo, prec)


def faber_jm(m: int, precision: int) -> QSeries:
    """``j_0 = 1`` and ``j_m = m T_m (j - 744)``: principal part ``q^-m``, no constant."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if m == 0:
        return QSeries.constant(1, precision)
    j1 = j_invariant(m * (precision - 1) + 1) - 744
    return hecke_Tm(j1, 0, m).scale(m).truncate(precision)


def derivative_D(f: QSeries, order: int = 1) -> QSeries:
    """``D = q d/dq`` applied ``order`` times."""
    if order < 0:
        raise ValueError("order must be non-negative")
    return QSeries._raw(
        [c * (f.valuation + i) ** order for i, c in enumerate(f._c)], f.valuation, f.precision
    )


def u_operator(f: QSeries, m: int) -> QSeries:
    """Atkin ``U_m``: the coefficient of ``q^n`` becomes that of ``q^(mn)``."""
    if m < 1:
        raise ValueError("m must be positive")
    lo = -((-f.valuation) // m)
    prec = (f.precision - 1) // m + 1
    return QSeries._raw([f[m * n] for n in range(lo, prec)], lo, prec)


def _rising(x: Fraction, n: int) -> Fraction:
    out = Fraction(1)
    for i in range(n):
        out *= x + i
    return out


def _fact(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def rc_bracket(f: QSeries, k, g: QSeries, l, nu: int) -> QSeries:
    """Rankin-Cohen bracket ``[f, g]_nu`` for weights ``k`` and ``l``.

    The Gamma quotients reduce to rising factorials, so half-integral weights
    give exact rational coefficients.
    """
    k, l = _frac(k), _frac(l)
    if k <= 0 or l <= 0:
        raise ValueError("weights must be positive")
    if nu < 0:
        raise ValueError("nu must be non-negative")
    total = None
    for r in range(nu + 1):
        s = nu - r
        c = _rising(k + r, s) * _rising(l + s, r) / (_fact(r) * _fact(s))
        if r % 2:
            c = -c
        term = (derivative_D(f, r) * derivative_D(g, s)).scale(c)
        total = term if total is None else total + term
    return total


# -- Ramanujan tau in bulk ----------------------------------------------------


@lru_cache(maxsize=4)
def tau_numbers(n_max: int) -> tuple[int, ...]:
    """``(0, tau(1), ..., tau(n_max))`` from ``Delta/q = (eta^3/q^(1/8))^8``.

    Jacobi's ``prod (1-q^n)^3 = sum (-1)^k (2k+1) q^(k(k+1)/2)`` is sparse; its
    eighth power is formed as one packed-integer product chain in GMP.
    """
    n = n_max  # coefficients of q^0 .. q^(n_max-1) of Delta/q
    if n < 1:
        return (0,)
    a = [0] * n
    k = 0
    while k * (k + 1) // 2 < n:
        a[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    # |tau(m)| <= d(m) m^(11/2) < 2^(6 log2(m) + 12)
    bits = max(64, int(6 * np.log2(max(n, 2))) + 24)
    modulus = gmpy2.mpz(1) << (bits * n)
    half = modulus >> 1

    def trunc(v):
        v = v & (modulus - 1)
        return v - modulus if v >= half else v

    x = _pack([gmpy2.mpz(c) for c in a], bits)
    x2 = trunc(x * x)
    x4 = trunc(x2 * x2)
    x8 = trunc(x4 * x4)
    out: list[int] = []
    _unpack(x8, n, bits, out)
    return (0, *out)
