"""Combinatorial kernels and the Eichler-Selberg relations among traces.

Everything here is exact: ``G_{m,nu}`` is assembled from integer traces and
rational kernels, and every verification compares rational q-series.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import comb, factorial, isqrt

from .arith import divisors
from .cmtrace import trace_tm
from .modforms import cusp_coordinates, cusp_dim, miller_basis
from .poincare import EXACT_WEIGHTS, exact_part, poincare_exact
from .qseries import QSeries, derivative_D, faber_jm, hecke_Tm, rc_bracket, theta, u_operator
from .quadforms import hurwitz_H

__all__ = [
    "Report",
    "GSeries",
    "p_poly",
    "p_poly_series",
    "lambda_k",
    "p_rDl",
    "q_poly",
    "trace",
    "g_series",
    "poincare_combination",
    "cusp_remainder",
    "verify_thm_1_1",
    "verify_thm_1_2",
    "verify_thm_1_3",
    "verify_eichler_selberg",
    "verify_bracket_identity",
    "verify_identity_2_6",
]


@dataclass
class Report:
    """Outcome of one verification: ``status`` is True when nothing failed."""

    identity: str
    range: dict
    status: bool = True
    first_failure: dict | None = None
    checked: int = 0
    details: dict = field(default_factory=dict)

    def fail(self, **where) -> None:
        if self.status:
            self.first_failure = where
        self.status = False

    def to_dict(self) -> dict:
        return asdict(self)


# -- kernels ---------------------------------------------------------------------


def p_poly(k: int, r: int, n: int) -> int:
    """``p_k(r, n) = sum_j (-1)^j C(k-2-j, j) n^j r^(k-2-2j)``."""
    if k % 2:
        raise ValueError("k must be even")
    if k < 2:
        raise ValueError("k must be at least 2")
    return sum((-1) ** j * comb(k - 2 - j, j) * n**j * r ** (k - 2 - 2 * j) for j in range(k // 2))


def p_poly_series(k: int, r: int, n: int) -> int:
    """Coefficient of ``X^(k-2)`` in ``1/(1 - rX + nX^2)`` via its linear recurrence."""
    a, b = 0, 1  # coefficients of X^-1 and X^0
    for _ in range(k - 2):
        a, b = b, r * b - n * a
    return b


def lambda_k(k: int, n: int) -> Fraction:
    """``(1/2) sum_{d | n} min(d, n/d)^k``."""
    if n < 1:
        raise ValueError("n must be positive")
    return Fraction(sum(min(d, n // d) ** k for d in divisors(n)), 2)


def p_rDl(nu: int, r, D, l: int) -> Fraction:
    """The two-parameter family ``p_{2nu+2}(r, D, l)``; ``l = 0`` gives ``p_{2nu+2}(r, D)``."""
    if nu < 0 or l < 0:
        raise ValueError("nu and l must be non-negative")
    r, D = Fraction(r), Fraction(D)
    total = Fraction(0)
    for j in range(nu + 1):
        top = 2 * nu + 2 * l - j
        w = Fraction(comb(2 * l, l) * comb(nu + l - j, l), comb(top, l) * comb(nu + l, l))
        total += (-1) ** j * comb(top, j) * w * D**j * r ** (2 * nu - 2 * j)
    return total


def q_poly(nu: int, i: int, n: int, r: int) -> Fraction:
    """``Q_{nu,i}(n, r) = sum_{i<=j<=nu} (-1)^j C(2nu-j, j) r^(2nu-2j) j!/(j-i)! ((r^2-n^2)/4)^(j-i)``."""
    if not 0 <= i <= nu:
        raise ValueError("need 0 <= i <= nu")
    x = Fraction(r * r - n * n, 4)
    return sum(
        (
            (-1) ** j * comb(2 * nu - j, j) * r ** (2 * nu - 2 * j) * Fraction(factorial(j), factorial(j - i)) * x ** (j - i)
            for j in range(i, nu + 1)
        ),
        Fraction(0),
    )


# -- G_{m, nu} ---------------------------------------------------------------------


def trace(m: int, d: int) -> Fraction:
    return trace_tm(m, d).value


@dataclass(frozen=True)
class GSeries:
    m: int
    nu: int
    series: QSeries
    trace_window: range

    def __getitem__(self, n: int) -> Fraction:
        return self.series[n]


def _g_coefficient(m: int, nu: int, n: int) -> Fraction:
    k = 2 * nu + 2
    total = Fraction(0)
    bound = 4 * n + m * m
    if bound < 0:
        return total
    for r in range(-isqrt(bound), isqrt(bound) + 1):
        t = trace(m, 4 * n - r * r)
        if t:
            total += p_poly(k, r, n) * t
    return -total / 2


def g_series(m: int, nu: int, n_max: int) -> GSeries:
    """``G_{m,nu} = -(1/2) sum_n sum_r p_{2nu+2}(r, n) t_m(4n - r^2) q^n`` through ``q^n_max``."""
    if m < 1:
        raise ValueError("m must be positive")
    if nu < 0:
        raise ValueError("nu must be non-negative")
    lo = -(m * m // 4)
    coeffs = [_g_coefficient(m, nu, n) for n in range(lo, n_max + 1)]
    series = QSeries(coeffs, lo, n_max + 1)
    return GSeries(m, nu, series, range(-m * m, 4 * n_max + 1))


def _pairs(m: int):
    for kappa in divisors(m):
        for r in range(1, kappa + 1):
            yield kappa, r


def poincare_combination(m: int, nu: int, precision: int, exact_only: bool = False) -> QSeries:
    """``sum_{kappa | m} sum_{0 < r <= kappa} r^(2nu+1) P_{2nu+2, -r(kappa-r)}``.

    For cusp-free weights this is the full combination.  ``exact_only`` uses
    the gauge-fixed exact parts, which leaves out only a cusp form.
    """
    k = 2 * nu + 2
    if not exact_only and k not in EXACT_WEIGHTS:
        raise ValueError(f"weight {k} carries cusp forms; use exact_only=True")
    total = QSeries.constant(0, precision)
    for kappa, r in _pairs(m):
        h = r * (kappa - r)
        if exact_only:
            part = exact_part(k, h, precision)
        else:
            part = poincare_exact(k, h, precision).exact_part
        total = total + part.scale(r ** (2 * nu + 1))
    return total


def cusp_remainder(m: int, nu: int, n_max: int) -> tuple[QSeries, list[Fraction] | None]:
    """``G_{m,nu}`` minus the exact parts of its Poincare combination, with cusp coordinates.

    The coordinates are ``None`` when the remainder is not a cusp form.
    """
    k = 2 * nu + 2
    g = g_series(m, nu, n_max).series
    rem = g - poincare_combination(m, nu, n_max + 1, exact_only=True)
    return rem, cusp_coordinates(rem, k)


# -- verifications -------------------------------------------------------------------


def verify_thm_1_1(m: int, nu: int, n_max: int) -> Report:
    """``G_{m,nu}`` is weakly holomorphic of weight ``2nu+2``: after the exact Poincare parts, a cusp form."""
    rep = Report("G_{m,nu} in M^!_{2nu+2}", {"m": m, "nu": nu, "n_max": n_max})
    if nu == 0:
        return verify_thm_1_2(m, n_max)
    rem, coords = cusp_remainder(m, nu, n_max)
    rep.checked = n_max + 1 - rem.valuation
    if coords is None:
        bad = next(n for n in range(rem.valuation, rem.precision) if rem[n] and (n <= 0 or n > cusp_dim(2 * nu + 2)))
        rep.fail(n=bad, remainder=str(rem[bad]))
    else:
        rep.details["cusp_coordinates"] = [str(c) for c in coords]
    return rep


def _weight_two_rhs(m: int, precision: int) -> QSeries:
    total = QSeries.constant(0, precision)
    for kappa in divisors(m):
        for r in range(1, kappa):
            h = r * (kappa - r)
            total = total + derivative_D(faber_jm(h, precision)).scale(Fraction(kappa, h))
    return total.scale(Fraction(-1, 2))


def verify_thm_1_2(m: int, n_max: int) -> Report:
    """The ``nu = 0`` relation as a q-series identity, plus its coefficientwise form."""
    rep = Report("G_{m,0} = -1/2 sum kappa/(r(kappa-r)) D j_{r(kappa-r)}", {"m": m, "n_max": n_max})
    g = g_series(m, 0, n_max).series
    rhs = _weight_two_rhs(m, n_max + 1)
    lo = min(g.valuation, rhs.valuation)
    for n in range(lo, n_max + 1):
        rep.checked += 1
        if g[n] != rhs[n]:
            rep.fail(n=n, lhs=str(g[n]), rhs=str(rhs[n]))
            return rep
    # part 2: sum_r t_m(4n - r^2) = n sum kappa/(r(kappa-r)) c_{r(kappa-r)}(n)
    js = {}
    for kappa in divisors(m):
        for r in range(1, kappa):
            h = r * (kappa - r)
            js.setdefault(h, faber_jm(h, n_max + 1))
    for n in range(1, n_max + 1):
        lhs = sum((trace(m, 4 * n - r * r) for r in range(-isqrt(4 * n + m * m), isqrt(4 * n + m * m) + 1)), Fraction(0))
        rhs2 = n * sum(
            (Fraction(kappa, r * (kappa - r)) * js[r * (kappa - r)][n] for kappa in divisors(m) for r in range(1, kappa)),
            Fraction(0),
        )
        rep.checked += 1
        if lhs != rhs2:
            rep.fail(n=n, part=2, lhs=str(lhs), rhs=str(rhs2))
            return rep
    return rep


def verify_thm_1_3(m: int, nu: int, n_max: int) -> Report:
    """``G_{m,nu}`` equals the Poincare combination exactly for cusp-free weights."""
    rep = Report("G_{m,nu} = sum r^(2nu+1) P_{2nu+2,-r(kappa-r)}", {"m": m, "nu": nu, "n_max": n_max})
    if 2 * nu + 2 not in EXACT_WEIGHTS:
        raise ValueError("nu must lie in {1, 2, 3, 4, 6}")
    g = g_series(m, nu, n_max).series
    rhs = poincare_combination(m, nu, n_max + 1)
    lo = min(g.valuation, rhs.valuation)
    for n in range(lo, n_max + 1):
        rep.checked += 1
        if g[n] != rhs[n]:
            rep.fail(n=n, lhs=str(g[n]), rhs=str(rhs[n]))
            return rep
    # part 2, coefficientwise
    k = 2 * nu + 2
    for n in range(1, n_max + 1):
        b = isqrt(4 * n + m * m)
        lhs = sum((p_poly(k, r, n) * trace(m, 4 * n - r * r) for r in range(-b, b + 1)), Fraction(0))
        rhs2 = -2 * rhs[n]
        rep.checked += 1
        if lhs != rhs2:
            rep.fail(n=n, part=2, lhs=str(lhs), rhs=str(rhs2))
            return rep
    return rep


def eichler_selberg_rhs(weight: int, n: int) -> Fraction:
    """``-(1/2) sum_r p_weight(r, n) H(4n - r^2) - lambda_{weight-1}(n)``."""
    s = Fraction(0)
    b = isqrt(4 * n)
    for r in range(-b, b + 1):
        s += p_poly(weight, r, n) * hurwitz_H(4 * n - r * r)
    return -s / 2 - lambda_k(weight - 1, n)


def _hecke_traces(weight: int, n_max: int) -> list[Fraction]:
    d = cusp_dim(weight)
    if d == 0:
        return [Fraction(0)] * (n_max + 1)
    space = miller_basis(weight, n_max * d + 1)
    out = [Fraction(0)]
    for n in range(1, n_max + 1):
        t = Fraction(0)
        for i, f in enumerate(space.basis):
            t += hecke_Tm(f.truncate(n * d + 1), weight, n)[i + 1]
        out.append(t)
    return out


def verify_eichler_selberg(weight: int, n_max: int) -> Report:
    """Class-number side against exact Hecke traces on ``S_weight``."""
    rep = Report("Eichler-Selberg trace formula", {"weight": weight, "n_max": n_max})
    if weight % 2 or weight < 4:
        raise ValueError("weight must be even and at least 4")
    traces = _hecke_traces(weight, n_max)
    for n in range(1, n_max + 1):
        lhs = traces[n]
        rhs = eichler_selberg_rhs(weight, n)
        rep.checked += 1
        if lhs != rhs:
            rep.fail(n=n, trace=str(lhs), class_side=str(rhs))
            return rep
    return rep


def g_holomorphic(m: int, precision: int) -> QSeries:
    """``-sum_{kappa | m} kappa q^(-kappa^2) + 2 sigma_1(m) + sum_{d > 0} t_m(d) q^d``."""
    lo = -m * m
    coeffs = [trace(m, d) for d in range(lo, precision)]
    return QSeries(coeffs, lo, precision)


def verify_bracket_identity(m: int, nu: int, n_max: int) -> Report:
    """``[g_m, theta]_nu | U_4 = -2 C(2nu, nu) G_{m,nu}`` coefficientwise."""
    rep = Report("[g_m, theta]_nu | U_4 = -2 binom(2nu,nu) G_{m,nu}", {"m": m, "nu": nu, "n_max": n_max})
    prec = 4 * (n_max + 1) + m * m  # h starts at q^(-m^2), which the product gives back
    h = g_holomorphic(m, prec)
    br = u_operator(rc_bracket(h, Fraction(3, 2), theta(prec), Fraction(1, 2), nu), 4)
    g = g_series(m, nu, n_max).series
    factor = -2 * comb(2 * nu, nu)
    for n in range(min(br.valuation, g.valuation), n_max + 1):
        rep.checked += 1
        if br[n] != factor * g[n]:
            rep.fail(n=n, bracket=str(br[n]), expected=str(factor * g[n]))
            return rep
    return rep


def verify_identity_2_6(nu_max: int = 8, kappa_max: int = 12) -> Report:
    """``p_{2nu+2}(r, (r^2-kappa^2)/4) = ((kappa-r)^(2nu+1) + (kappa+r)^(2nu+1)) / (2^(2nu+1) kappa)``."""
    rep = Report("p_{2nu+2}(r,(r^2-kappa^2)/4) closed form", {"nu_max": nu_max, "kappa_max": kappa_max})
    for nu in range(nu_max + 1):
        e = 2 * nu + 1
        for kappa in range(1, kappa_max + 1):
            for r in range(-kappa, kappa + 1):
                lhs = p_rDl(nu, r, Fraction(r * r - kappa * kappa, 4), 0)
                rhs = Fraction((kappa - r) ** e + (kappa + r) ** e, 2**e * kappa)
                rep.checked += 1
                if lhs != rhs:
                    rep.fail(nu=nu, kappa=kappa, r=r, lhs=str(lhs), rhs=str(rhs))
                    return rep
    return rep
