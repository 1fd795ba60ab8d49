"""Symmetrized shifted convolution values, Petersson norms and modified traces.

Two independent routes to ``Lhat(f, m; 2nu+1)``:

* ``invert``: read the eigenform coefficient of ``G_{m,nu}`` off the exact
  trace data, remove the cusp components of the Poincare series, and solve the
  decomposition of ``G_{m,nu}`` for the L-value;
* ``direct``: Cesaro-averaged partial sums of the defining series, for the
  weight 12 case where ``tau(n)`` is available in bulk.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import mpmath
import numpy as np
from mpmath import mp

from .arith import divisors, mobius, sigma
from .modforms import cusp_dim, eigenform
from .poincare import DEFAULT_BITS, DEFAULT_CUTOFF, holomorphic_first_coefficient, poincare_cuspful
from .qseries import tau_numbers
from .relations import Report, _pairs, cusp_remainder, p_poly, trace

__all__ = [
    "LValueResult",
    "InstabilityError",
    "shifted_conv_direct",
    "petersson_norm",
    "thm14_invert",
    "tr_m",
    "verify_cor_1_5",
    "mobius_recombination",
]


class InstabilityError(ArithmeticError):
    """A numerical quantity moved more than its tolerance under cutoff doubling."""


@dataclass(frozen=True)
class LValueResult:
    f: str
    m: int
    s: int
    value: float
    method: str
    reported_error: float

    def to_dict(self) -> dict:
        return asdict(self)


def _gamma_ratio(weight: int) -> mpmath.mpf:
    # Gamma(weight-1) / (4 pi)^(weight-1)
    return mpmath.gamma(weight - 1) / (4 * mpmath.pi) ** (weight - 1)


def _require_dim_one(weight: int) -> None:
    d = cusp_dim(weight)
    if d != 1:
        raise ValueError(f"S_{weight} has dimension {d}; only one-dimensional spaces are supported")


# -- direct summation ----------------------------------------------------------------


def _normalized_tau(n_max: int) -> np.ndarray:
    taus = tau_numbers(n_max)
    a = np.array([float(t) for t in taus], dtype=np.float64)
    n = np.arange(n_max + 1, dtype=np.float64)
    n[0] = 1.0
    return a / n**5.5


def shifted_conv_direct(m: int, s: int = 11, N: int = 10**6, weight: int = 12) -> LValueResult:
    """``sum_{n<=N} tau(n) tau(n+m) (n^-s - (n+m)^-s)`` with Cesaro averaging.

    Terms are formed from ``a(n) = tau(n)/n^(11/2)`` in double precision.  The
    value is the mean of the last ``W = sqrt(N)`` partial sums, and the error
    is half the spread of the running means over that window.
    """
    if weight != 12:
        raise ValueError("direct summation is implemented for weight 12 only")
    if m < 0:
        raise ValueError("m must be non-negative")
    W = math.isqrt(N)
    if N < 4 * W or W < 2:
        raise ValueError("N too small for the averaging window")
    if m == 0:
        return LValueResult("Delta", 0, s, 0.0, "direct_sum", 0.0)
    a = _normalized_tau(N + m)
    n = np.arange(1, N + 1, dtype=np.float64)
    ratio = (n + m) / n
    # tau(n) tau(n+m) n^-s (1 - (n/(n+m))^s) = a(n) a(n+m) ratio^(11/2) n^(11-s) (1 - ratio^-s)
    terms = a[1 : N + 1] * a[1 + m : N + m + 1] * ratio**5.5 * n ** (11 - s) * -np.expm1(-s * np.log1p(m / n))
    partial = np.cumsum(terms)
    window = partial[-W:]
    value = float(window.mean())
    running = np.cumsum(window) / np.arange(1, W + 1)
    tail = running[W // 2 :]
    err = float(tail.max() - tail.min()) / 2 + float(np.abs(window - value).mean()) / math.sqrt(W)
    return LValueResult("Delta", m, s, value, "direct_sum", err)


# -- Petersson norm --------------------------------------------------------------------


def petersson_norm(weight: int = 12, cutoff: int = DEFAULT_CUTOFF, bits: int = DEFAULT_BITS) -> mpmath.mpf:
    """``||f||^2 = Gamma(k-1)/(4 pi)^(k-1) / c_{P_{k,1}}(1)`` for the eigenform of a one-dimensional ``S_k``.

    Raises :class:`InstabilityError` if halving the cutoff moves the value by
    more than ``1e-8`` relative.
    """
    _require_dim_one(weight)
    with mp.workprec(bits + 32):
        p1, _ = holomorphic_first_coefficient(weight, cutoff, bits)
        p1_half, _ = holomorphic_first_coefficient(weight, max(cutoff // 2, 1), bits)
        if abs(p1 - p1_half) > 1e-8 * abs(p1):
            raise InstabilityError("Petersson norm unstable under cutoff change")
        return _gamma_ratio(weight) / p1


# -- inversion of the G decomposition -------------------------------------------------


def _cusp_part(m: int, nu: int, cutoff: int, bits: int) -> mpmath.mpf:
    """``sum r^(2nu+1) * (cusp coordinate of P_{2nu+2,-r(kappa-r)})``."""
    k = 2 * nu + 2
    total = mpmath.mpf(0)
    for kappa, r in _pairs(m):
        h = r * (kappa - r)
        if h:
            total += r ** (2 * nu + 1) * poincare_cuspful(k, h, 2, cutoff, bits).cusp_coeffs[0]
    return total


def eigen_remainder(m: int, nu: int) -> Fraction:
    """Exact coefficient of the eigenform in ``G_{m,nu}`` minus the exact Poincare parts."""
    _require_dim_one(2 * nu + 2)
    _, coords = cusp_remainder(m, nu, 8)
    if coords is None:
        raise ArithmeticError("G_{m,nu} minus its Poincare parts is not a cusp form")
    return coords[0]


def _deficit(m: int, nu: int, cutoff: int, bits: int) -> mpmath.mpf:
    """``Gamma(2nu+1)/(4pi)^(2nu+1) * Lhat / ||f||^2 = R - cusp + 24 sigma_1(m)``."""
    R = eigen_remainder(m, nu)
    return mpmath.mpf(R.numerator) / R.denominator - _cusp_part(m, nu, cutoff, bits) + 24 * sigma(m)


def thm14_invert(m: int, nu: int = 5, cutoff: int = DEFAULT_CUTOFF, bits: int = DEFAULT_BITS) -> LValueResult:
    """Solve the decomposition of ``G_{m,nu}`` for ``Lhat(f, m; 2nu+1)``.

    The reported error is the change under halving the Kloosterman cutoff.
    """
    k = 2 * nu + 2
    _require_dim_one(k)
    if m < 1:
        raise ValueError("m must be positive")
    with mp.workprec(bits + 32):
        norm = petersson_norm(k, cutoff, bits)
        value = _deficit(m, nu, cutoff, bits) * norm / _gamma_ratio(k)
        half = max(cutoff // 2, 1)
        coarse = _deficit(m, nu, half, bits) * petersson_norm(k, half, bits) / _gamma_ratio(k)
        err = float(abs(value - coarse))
    return LValueResult(f"eigenform_{k}", m, 2 * nu + 1, float(value), "thm14_inversion", err)


def tr_m(n: int, weight: int = 12, m: int = 1, cutoff: int = DEFAULT_CUTOFF, bits: int = DEFAULT_BITS) -> mpmath.mpf:
    """``Tr_m(n; weight) = Gamma(weight-1)/(4pi)^(weight-1) * Lhat/||f||^2 * c_f(n)``."""
    _require_dim_one(weight)
    if n < 1:
        raise ValueError("n must be positive")
    nu = (weight - 2) // 2
    c = eigenform(weight, n + 1)[n]
    with mp.workprec(bits + 32):
        return _deficit(m, nu, cutoff, bits) * c.numerator / c.denominator


def verify_cor_1_5(m: int, weight: int = 12, n_max: int = 10, cutoff: int = DEFAULT_CUTOFF, bits: int = DEFAULT_BITS) -> Report:
    """Rebuild ``Tr(n; weight)`` from ``Tr_m``, the traces and the Poincare coefficients."""
    _require_dim_one(weight)
    rep = Report("Tr(n;2k) from traces of singular moduli", {"m": m, "weight": weight, "n_max": n_max})
    nu = (weight - 2) // 2
    f = eigenform(weight, n_max + 1)
    forms = {}
    for kappa, r in _pairs(m):
        h = r * (kappa - r)
        if h not in forms:
            forms[h] = poincare_cuspful(weight, h, n_max + 1, cutoff, bits)
    worst = 0.0
    with mp.workprec(bits + 32):
        deficit = _deficit(m, nu, cutoff, bits)
        for n in range(1, n_max + 1):
            c = f[n]
            trm = deficit * c.numerator / c.denominator
            b = math.isqrt(4 * n + m * m)
            s = sum((p_poly(weight, r, n) * trace(m, 4 * n - r * r) for r in range(-b, b + 1)), Fraction(0))
            poin = mpmath.mpf(0)
            for kappa, r in _pairs(m):
                poin += r ** (weight - 1) * forms[r * (kappa - r)].coefficient(n, bits)
            rhs = (trm + mpmath.mpf(s.numerator) / (2 * s.denominator) + poin) / (24 * sigma(m))
            target = c
            rel = float(abs(rhs - target.numerator / target.denominator)) / max(1.0, abs(float(target)))
            worst = max(worst, rel)
            rep.checked += 1
            if rel >= 1e-4:
                rep.fail(n=n, rebuilt=mpmath.nstr(rhs, 15), trace=str(target))
    rep.details["max_relative_error"] = worst
    return rep


def mobius_recombination(m: int, nu: int = 5, cutoff: int = DEFAULT_CUTOFF, bits: int = DEFAULT_BITS) -> Report:
    """Per-divisor plus parts ``sum_{d|n} mu(d) Lhat(n/d)`` recombine to ``Lhat(m)`` over ``n | m``."""
    rep = Report("Moebius recombination of plus parts", {"m": m, "nu": nu})
    values = {n: thm14_invert(n, nu, cutoff, bits) for n in divisors(m)}
    plus = {n: sum(mobius(d) * values[n // d].value for d in divisors(n)) for n in divisors(m)}
    total = sum(plus.values())
    err = sum(v.reported_error for v in values.values()) + 1e-9 * abs(values[m].value)
    rep.checked = len(plus)
    rep.details = {"plus_parts": {str(k): v for k, v in plus.items()}, "recombined": total, "single": values[m].value}
    if abs(total - values[m].value) > err:
        rep.fail(recombined=total, single=values[m].value)
    return rep
