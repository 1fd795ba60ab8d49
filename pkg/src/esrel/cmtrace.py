"""Singular moduli of the ``j_m`` and their weighted traces ``t_m(d)``.

``j_m(tau)`` is evaluated as ``sum_{ad=m, 0<=b<d} j_1((a tau + b)/d)``.  At a CM
point every Hecke translate is again a CM point, so the translate is moved into
the fundamental domain exactly, by reducing the transformed quadratic form.
Only then is the q-expansion of ``j_1 = j - 744`` summed, always with
``|q| <= exp(-pi sqrt 3)``.
"""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import mpmath
from mpmath import mp

from .arith import divisors, is_square, sigma
from .qseries import j_invariant
from .quadforms import QuadForm, enumerate_reduced, hurwitz_H, reduce, stabilizer_order

__all__ = [
    "TraceRecord",
    "TraceCache",
    "RoundingError",
    "cm_point",
    "eval_j1",
    "eval_jm",
    "reduce_point",
    "trace_tm",
    "trace_bits",
    "default_cache",
    "set_default_cache",
]

log = logging.getLogger(__name__)

HEIGHT = math.sqrt(3) / 2
ROUND_GUARD = 0.4
MAX_ESCALATIONS = 3


class RoundingError(ArithmeticError):
    """A trace stayed ambiguous after every precision escalation."""


@dataclass(frozen=True)
class TraceRecord:
    m: int
    d: int
    value: Fraction
    err: float
    bits: int = 0

    def to_json(self) -> str:
        return json.dumps(
            {"m": self.m, "d": self.d, "t": str(self.value), "err": self.err, "bits": self.bits},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "TraceRecord":
        data = json.loads(line)
        return cls(int(data["m"]), int(data["d"]), Fraction(data["t"]), float(data["err"]), int(data.get("bits", 0)))


class TraceCache:
    """``(m, d) -> TraceRecord`` store, optionally backed by an NDJSON file.

    One writer appends records; readers load the file once at construction.
    """

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = Path(path) if path else None
        self._data: dict[tuple[int, int], TraceRecord] = {}
        if self.path and self.path.exists():
            with self.path.open() as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        rec = TraceRecord.from_json(line)
                        self._data[(rec.m, rec.d)] = rec

    def get(self, m: int, d: int) -> TraceRecord | None:
        return self._data.get((m, d))

    def put(self, rec: TraceRecord) -> None:
        key = (rec.m, rec.d)
        if key in self._data:
            return
        self._data[key] = rec
        if self.path:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a") as fh:
                fh.write(rec.to_json() + "\n")

    def __len__(self) -> int:
        return len(self._data)


_default_cache = TraceCache(os.environ.get("SELBERG_CACHE") or None)


def default_cache() -> TraceCache:
    return _default_cache


def set_default_cache(cache: TraceCache) -> None:
    global _default_cache
    _default_cache = cache


# -- points and the j-expansion ----------------------------------------------


def cm_point(Q: QuadForm, bits: int | None = None) -> mpmath.mpc:
    """Upper half-plane root ``(-B + i sqrt(d)) / (2A)`` of ``Q(tau, 1)``."""
    A, B, C = Q
    D = B * B - 4 * A * C
    if A <= 0 or D >= 0:
        raise ValueError(f"{tuple(Q)} is not positive definite")
    with mp.workprec(bits or mp.prec):
        return mpmath.mpc(mpmath.mpf(-B) / (2 * A), mpmath.sqrt(-D) / (2 * A))


_J_COEFFS: list[int] = []


def _j1_coeffs(n: int) -> list[int]:
    global _J_COEFFS
    if len(_J_COEFFS) <= n:
        js = j_invariant(max(2 * n, 64))
        _J_COEFFS = [0] + [int(js[k]) for k in range(1, js.precision)]
    return _J_COEFFS


def _tail_terms(log2_absq: float, tail_bits: int) -> int:
    # c(n) <= exp(4 pi sqrt n); stop when the bound falls below 2^-(tail_bits+4)
    target = -(tail_bits + 4) * math.log(2)
    n = 1
    while True:
        n += 1
        lt = 4 * math.pi * math.sqrt(n) + n * log2_absq * math.log(2)
        if lt < target and n > 2:
            return n


def _j1_series(q: mpmath.mpc, tail_bits: int) -> mpmath.mpc:
    """``sum_{n >= 1} c(n) q^n`` for ``|q| <= exp(-pi sqrt 3)``."""
    absq = abs(q)
    if absq == 0:
        return mpmath.mpc(0)
    n = _tail_terms(float(mpmath.log(absq, 2)), tail_bits)
    cs = _j1_coeffs(n)
    acc = mpmath.mpc(0)
    for k in range(n, 0, -1):
        acc = acc * q + cs[k]
    return acc * q


def eval_j1(tau, bits: int) -> mpmath.mpc:
    """``j(tau) - 744`` for ``Im(tau) >= sqrt(3)/2`` with absolute error about ``2^-bits * |q|^-1``."""
    with mp.workprec(bits + 16):
        tau = mpmath.mpc(tau)
        if tau.imag < HEIGHT - 1e-12:
            raise ValueError("tau lies below the height cutoff sqrt(3)/2")
        scale_bits = float(2 * mpmath.pi * tau.imag / mpmath.log(2))
        tail_bits = max(64, int(bits - scale_bits)) + 16
        qinv = mpmath.exp(-2j * mpmath.pi * tau)
    with mp.workprec(tail_bits):
        q = mpmath.exp(2j * mpmath.pi * mpmath.mpc(tau))
        tail = _j1_series(q, tail_bits)
    with mp.workprec(bits + 16):
        return qinv + tail


def reduce_point(tau) -> mpmath.mpc:
    """Move ``tau`` into the standard fundamental domain with ``T`` and ``S``."""
    tau = mpmath.mpc(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    for _ in range(10_000):
        tau = tau - mpmath.nint(tau.real)
        if abs(tau) < 1 - mpmath.mpf(2) ** (-mp.prec + 8):
            tau = -1 / tau
        else:
            return tau
    raise ArithmeticError("reduction did not terminate")


def eval_jm(m: int, tau, bits: int = 128) -> mpmath.mpc:
    """``j_m(tau)`` through the Hecke sum over translates ``(a tau + b)/d``."""
    if m < 0:
        raise ValueError("m must be non-negative")
    tau = mpmath.mpc(tau)
    if tau.imag < HEIGHT - 1e-12:
        raise ValueError("tau lies below the height cutoff sqrt(3)/2; reduce it first")
    if m == 0:
        return mpmath.mpc(1)
    extra = int(2 * math.pi * m * float(tau.imag) / math.log(2)) + 16
    total = mpmath.mpc(0)
    with mp.workprec(bits + extra):
        for a in divisors(m):
            dd = m // a
            for b in range(dd):
                total += eval_j1(reduce_point((a * tau + b) / dd), bits + extra)
    return total


# -- traces -------------------------------------------------------------------


def trace_bits(m: int, d: int) -> int:
    """Working precision ``64 + ceil(3.33 * digits)`` for the size ``exp(pi m sqrt d)``."""
    digits = math.pi * m * math.sqrt(d) / math.log(10)
    return 64 + math.ceil(3.33 * digits)


_J1_AT_FORM: dict[QuadForm, tuple[int, mpmath.mpf]] = {}


def _j1_real_at_form(Q: QuadForm, bits: int) -> mpmath.mpf:
    hit = _J1_AT_FORM.get(Q)
    if hit is not None and hit[0] >= bits:
        return hit[1]
    A, B, C = Q
    D = 4 * A * C - B * B
    with mp.workprec(bits + 16):
        # q^{-1} = e(-tau) = exp(pi i B / A) exp(pi sqrt(D) / A)
        mag = mpmath.exp(mpmath.pi * mpmath.sqrt(D) / A)
        lead = mpmath.cospi(mpmath.mpf(B) / A) * mag
        scale_bits = float(mpmath.pi * mpmath.sqrt(D) / A / mpmath.log(2))
    tail_bits = max(64, int(bits - scale_bits)) + 16
    with mp.workprec(tail_bits):
        absq = mpmath.exp(-mpmath.pi * mpmath.sqrt(D) / A)
        q = absq * mpmath.expjpi(-mpmath.mpf(B) / A)
        tail = _j1_series(q, tail_bits).real
    with mp.workprec(bits + 16):
        val = lead + tail
    _J1_AT_FORM[Q] = (bits, val)
    return val


def _hecke_translates(Q: QuadForm, m: int):
    for a in divisors(m):
        dd = m // a
        for b in range(dd):
            yield reduce(Q.act(dd, -b, 0, a))


def _numeric_trace(m: int, d: int, bits: int) -> mpmath.mpf:
    total = mpmath.mpf(0)
    with mp.workprec(bits + 16):
        for Q in enumerate_reduced(d):
            w = stabilizer_order(Q)
            part = mpmath.mpf(0)
            for Q2 in _hecke_translates(Q, m):
                part += _j1_real_at_form(Q2, bits)
            total += part / w
    return total


def _nonpositive_trace(m: int, d: int) -> Fraction:
    if d == 0:
        return Fraction(2 * sigma(m))
    k2 = -d
    if is_square(k2):
        k = math.isqrt(k2)
        if m % k == 0:
            return Fraction(-k)
    return Fraction(0)


def trace_tm(m: int, d: int, bits: int | None = None, cache: TraceCache | None = None) -> TraceRecord:
    """``t_m(d)``: weighted sum of ``j_m`` over classes of discriminant ``-d``.

    ``d <= 0`` follows the closed-form conventions (``2 sigma_1(m)`` at 0,
    ``-kappa`` at ``-kappa^2`` with ``kappa | m``, else 0); ``m == 0`` is ``H(d)``.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if m == 0:
        if d < 0:
            log.warning("t_0(%d) requested; no convention exists, using 0", d)
            return TraceRecord(0, d, Fraction(0), 0.0)
        return TraceRecord(0, d, hurwitz_H(d), 0.0)
    if d <= 0:
        return TraceRecord(m, d, _nonpositive_trace(m, d), 0.0)
    if d % 4 in (1, 2):
        return TraceRecord(m, d, Fraction(0), 0.0)
    cache = _default_cache if cache is None else cache
    hit = cache.get(m, d)
    if hit is not None and bits is None:
        return hit
    bits = bits or trace_bits(m, d)
    for _ in range(MAX_ESCALATIONS + 1):
        with mp.workprec(bits + 16):
            val = _numeric_trace(m, d, bits)
            nearest = int(mpmath.nint(val))
            err = float(abs(val - nearest))
        if err < ROUND_GUARD:
            rec = TraceRecord(m, d, Fraction(nearest), err, bits)
            cache.put(rec)
            return rec
        log.info("t_%d(%d) ambiguous at %d bits (err %.3g); escalating", m, d, bits, err)
        bits *= 2
    raise RoundingError(f"t_{m}({d}) did not round cleanly after {MAX_ESCALATIONS} escalations")


def trace_value(m: int, d: int) -> Fraction:
    return trace_tm(m, d).value
