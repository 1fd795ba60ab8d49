"""Weakly holomorphic Poincare series ``P_{k,-h} = q^-h + sum c_{k,-h}(n) q^n``.

Every such series splits as an exact rational part and a cusp component.  The
exact part is the unique weakly holomorphic form with principal part ``q^-h``,
constant term 0 and vanishing ``q^1 .. q^d`` coefficients (``d = dim S_k``);
the cusp component is fixed by the Kloosterman-Bessel values of
``c_{k,-h}(1), ..., c_{k,-h}(d)`` and expressed in the echelon basis of
:func:`esrel.modforms.miller_basis`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp

from .arith import units_mod
from .modforms import cusp_dim, eisenstein_monomial, miller_basis
from .qseries import QSeries, delta, eisenstein, hecke_Tm, j_invariant

__all__ = [
    "PoincareForm",
    "ConvergenceError",
    "EXACT_WEIGHTS",
    "bessel",
    "poincare_exact",
    "poincare_cuspful",
    "poincare_form",
    "exact_part",
    "closed_form",
    "kloosterman_bessel_coefficient",
    "holomorphic_first_coefficient",
]

EXACT_WEIGHTS = (4, 6, 8, 10, 14)
DEFAULT_CUTOFF = 1000
DEFAULT_BITS = 192

# P_{k,-1} = E_{k'} (j - shift) from the closed forms for cusp-free weights
_CLOSED_SHIFT = {4: 984, 6: 240, 8: 1224, 10: 480, 14: 720}


class ConvergenceError(ArithmeticError):
    """A Kloosterman-Bessel series did not settle within tolerance."""


@dataclass(frozen=True)
class PoincareForm:
    weight: int
    index: int  # -h
    exact_part: QSeries
    cusp_coeffs: tuple = field(default=())
    tail_bound: float = 0.0

    @property
    def precision(self) -> int:
        return self.exact_part.precision

    def coefficient(self, n: int, bits: int = DEFAULT_BITS):
        """``c_{k,-h}(n)``: exact Fraction when there is no cusp component, else ``mpf``."""
        base = self.exact_part[n]
        if not self.cusp_coeffs or n <= 0:
            return base
        space = miller_basis(self.weight, max(self.precision, cusp_dim(self.weight) + 1))
        with mp.workprec(bits):
            total = mpmath.mpf(base.numerator) / base.denominator
            for c, f in zip(self.cusp_coeffs, space.basis):
                a = f[n]
                if a:
                    total += c * a.numerator / a.denominator
            return total


# -- Bessel functions by power series ---------------------------------------------


def bessel(kind: str, order, x, bits: int = 256) -> mpmath.mpf:
    """``J_order(x)`` or ``I_order(x)`` by direct summation of the power series.

    The series is summed until the next term, times the geometric bound on the
    remaining ratios, drops below ``2^-bits`` relative to the running total.
    The alternating ``J`` series loses about ``x / ln 2`` bits to cancellation,
    which limits the regime to ``x <= bits / 5``.
    """
    if kind not in ("J", "I"):
        raise ValueError("kind must be 'J' or 'I'")
    if isinstance(order, Fraction):
        with mp.workprec(bits + 64):
            order = mpmath.mpf(order.numerator) / order.denominator
    with mp.workprec(bits + 32):
        nu = mpmath.mpf(order)
        x = mpmath.mpf(x)
        if nu < 0:
            raise ValueError("order must be non-negative")
        if x <= 0:
            raise ValueError("x must be positive")
        if x > mpmath.mpf(bits) / 5:
            raise ValueError(f"x = {mpmath.nstr(x, 6)} outside the series regime for {bits} bits")
    loss = int(float(x) * 1.45) + 8 if kind == "J" else 8
    with mp.workprec(bits + loss + 32):
        nu = mpmath.mpf(order)
        x = mpmath.mpf(x)
        half_sq = (x / 2) ** 2
        sign = -1 if kind == "J" else 1
        term = (x / 2) ** nu / mpmath.gamma(nu + 1)
        total = term
        eps = mpmath.mpf(2) ** (-bits - 8)
        m = 0
        while True:
            m += 1
            term = term * half_sq / (m * (nu + m)) * sign
            total += term
            ratio = half_sq / ((m + 1) * (nu + m + 1))
            if ratio < 0.5 and abs(term) * ratio / (1 - ratio) <= eps * abs(total):
                break
        return +total


# -- exact parts ----------------------------------------------------------------


def _gauge_generator(weight: int, precision: int) -> tuple[QSeries, int]:
    """``Delta^l E_{k'}`` of order exactly ``d = dim S_weight``, with that order."""
    kp = weight % 12
    if kp == 2:
        kp = 14
    ell = (weight - kp) // 12
    g = eisenstein_monomial(kp, precision)
    if ell:
        g = g * delta(precision) ** ell
    return g, ell


@lru_cache(maxsize=128)
def exact_part(weight: int, h: int, precision: int) -> QSeries:
    """The gauge-fixed weakly holomorphic form with principal part ``q^-h``.

    Constant term 0 and vanishing ``q^1 .. q^d`` coefficients; for ``h = 0``
    this is the Eisenstein series ``E_weight``.
    """
    if weight < 4 or weight % 2:
        raise ValueError("weight must be even and at least 4")
    if h < 0:
        raise ValueError("h must be non-negative")
    if h == 0:
        return eisenstein(weight, precision)
    d = cusp_dim(weight)
    work = precision + h + d + 2
    g, ell = _gauge_generator(weight, work)
    assert ell == d
    j = j_invariant(work)
    # rows[i] = g j^i, order d - i, for i = 0 .. h + d
    rows = [g]
    for _ in range(h + d):
        rows.append(rows[-1] * j)  # each factor of j costs one term of precision
    out = rows[h + d]
    for i in range(h + d - 1, -1, -1):
        n = d - i  # exponent to clear; runs -h+1 .. d
        c = out[n]
        if c:
            out = out - rows[i].scale(c)
    return out.truncate(precision)


def closed_form(weight: int, precision: int) -> QSeries:
    """``P_{weight,-1}`` in the closed form ``E_4^a E_6^b (j - shift)``."""
    if weight not in _CLOSED_SHIFT:
        raise ValueError(f"no closed form for weight {weight}")
    e = eisenstein_monomial(weight, precision + 1)
    j = j_invariant(precision + 1)
    return (e * (j - _CLOSED_SHIFT[weight])).truncate(precision)


def poincare_exact(weight: int, h: int, precision: int) -> PoincareForm:
    """``P_{weight,-h} = h^(1-weight) T_h P_{weight,-1}`` for the cusp-free weights."""
    if weight not in EXACT_WEIGHTS:
        raise ValueError(f"weight {weight} carries cusp forms or is not supported")
    if h < 0:
        raise ValueError("h must be non-negative")
    if h == 0:
        return PoincareForm(weight, 0, eisenstein(weight, precision))
    if h == 1:
        return PoincareForm(weight, -1, closed_form(weight, precision))
    base = closed_form(weight, h * (precision - 1) + 1)
    out = hecke_Tm(base, weight, h).scale(Fraction(1, h ** (weight - 1)))
    return PoincareForm(weight, -h, out.truncate(precision))


# -- Kloosterman-Bessel coefficients ------------------------------------------------


@lru_cache(maxsize=4096)
def _kloosterman_counts(a: int, b: int, c: int) -> tuple:
    # residues (a dbar + b d) mod c with multiplicities, grouped so the real part sums fast
    counts: dict[int, int] = {}
    for d in units_mod(c):
        r = (a * pow(d, -1, c) + b * d) % c if c > 1 else 0
        counts[r] = counts.get(r, 0) + 1
    return tuple(sorted(counts.items()))


def _kloosterman_real(a: int, b: int, c: int) -> mpmath.mpf:
    return mpmath.fsum(k * mpmath.cospi(mpmath.mpf(2 * r) / c) for r, k in _kloosterman_counts(a, b, c))


def _series_bits(x: float, bits: int) -> int:
    return max(bits, int(5 * x) + 32)


def _kb_sum(a: int, b: int, kind: str, order: int, arg, cutoff: int, bits: int):
    """``sum_{c <= cutoff} S(a, b; c)/c * B_order(arg / c)`` with a trivial tail bound."""
    total = mpmath.mpf(0)
    sb = _series_bits(float(arg), bits)
    for c in range(1, cutoff + 1):
        s = _kloosterman_real(a, b, c)
        if s:
            total += s / c * bessel(kind, order, arg / c, sb)
    # |S| <= c and B_order(x) <= (x/2)^order / order! * e^(x^2/4) for small x
    x = float(arg) / cutoff
    lead = (x / 2) ** order / math.factorial(order) * math.exp(x * x / 4)
    tail = lead * cutoff / max(order - 1, 1)
    return total, tail


def kloosterman_bessel_coefficient(
    weight: int, h: int, n: int, cutoff: int = DEFAULT_CUTOFF, bits: int = DEFAULT_BITS
):
    """``c_{weight,-h}(n)`` from the Petersson formula, with its truncation bound.

    ``c(n) = 2 pi (-1)^(weight/2) (n/h)^((weight-1)/2) sum_c S(-h, n; c)/c I_{weight-1}(4 pi sqrt(hn)/c)``.
    """
    if h < 1 or n < 1:
        raise ValueError("h and n must be positive")
    k1 = weight - 1
    sign = -1 if (weight // 2) % 2 else 1
    with mp.workprec(bits + 32):
        arg = 4 * mpmath.pi * mpmath.sqrt(h * n)
        total, tail = _kb_sum(-h, n, "I", k1, arg, cutoff, bits)
        pref = 2 * mpmath.pi * sign * (mpmath.mpf(n) / h) ** (mpmath.mpf(k1) / 2)
        return pref * total, float(abs(pref)) * tail


def holomorphic_first_coefficient(weight: int, cutoff: int = DEFAULT_CUTOFF, bits: int = DEFAULT_BITS):
    """First coefficient of the holomorphic Poincare series ``P_{weight,1}``, with a tail bound."""
    if weight < 4 or weight % 2:
        raise ValueError("weight must be even and at least 4")
    sign = -1 if (weight // 2) % 2 else 1
    with mp.workprec(bits + 32):
        total, tail = _kb_sum(1, 1, "J", weight - 1, 4 * mpmath.pi, cutoff, bits)
        two_pi = 2 * mpmath.pi
        return 1 + two_pi * sign * total, float(two_pi) * tail


def poincare_cuspful(
    weight: int, h: int, precision: int, cutoff: int = DEFAULT_CUTOFF, bits: int = DEFAULT_BITS
) -> PoincareForm:
    """``P_{weight,-h}`` as exact part plus echelon-basis cusp coordinates.

    The exact part vanishes at ``q^1 .. q^d``, so coordinate ``i`` is just the
    Kloosterman-Bessel value of ``c_{weight,-h}(i)``.
    """
    d = cusp_dim(weight)
    if d < 1:
        raise ValueError(f"S_{weight} is trivial; use poincare_exact")
    if h < 0:
        raise ValueError("h must be non-negative")
    precision = max(precision, d + 1)
    ex = exact_part(weight, h, precision)
    if h == 0:
        return PoincareForm(weight, 0, ex, tuple(mpmath.mpf(0) for _ in range(d)))
    coeffs = []
    worst = 0.0
    for n in range(1, d + 1):
        val, tail = kloosterman_bessel_coefficient(weight, h, n, cutoff, bits)
        coeffs.append(val)
        worst = max(worst, tail)
    if worst > 1e-8:
        raise ConvergenceError(f"tail bound {worst:.3g} exceeds tolerance; raise the cutoff")
    return PoincareForm(weight, -h, ex, tuple(coeffs), worst)


def poincare_form(weight: int, h: int, precision: int, cutoff: int = DEFAULT_CUTOFF, bits: int = DEFAULT_BITS) -> PoincareForm:
    """Dispatch to the closed form or the cusp-component route."""
    if cusp_dim(weight) == 0:
        return poincare_exact(weight, h, precision)
    return poincare_cuspful(weight, h, precision, cutoff, bits)
