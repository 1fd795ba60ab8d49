"""Positive definite binary quadratic forms and Hurwitz-Kronecker class numbers.

Reduced forms follow ``-A < B <= A <= C`` with ``B >= 0`` whenever ``A == C``;
the roots of reduced forms then lie in the standard fundamental domain.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import NamedTuple

__all__ = [
    "QuadForm",
    "reduce",
    "reduce_with_matrix",
    "enumerate_reduced",
    "stabilizer_order",
    "hurwitz_H",
    "class_count",
]


class QuadForm(NamedTuple):
    A: int
    B: int
    C: int

    @property
    def disc(self) -> int:
        return self.B * self.B - 4 * self.A * self.C

    def is_positive_definite(self) -> bool:
        return self.A > 0 and self.disc < 0

    def is_reduced(self) -> bool:
        A, B, C = self
        return -A < B <= A <= C and not (A == C and B < 0)

    def act(self, a: int, b: int, c: int, d: int) -> "QuadForm":
        """``(Q o g)(X, Y) = Q(aX + bY, cX + dY)``."""
        A, B, C = self
        return QuadForm(
            A * a * a + B * a * c + C * c * c,
            2 * A * a * b + B * (a * d + b * c) + 2 * C * c * d,
            A * b * b + B * b * d + C * d * d,
        )

    def __str__(self) -> str:
        return f"[{self.A},{self.B},{self.C}]"


def _check(Q: QuadForm) -> QuadForm:
    Q = QuadForm(*Q)
    if Q.disc >= 0:
        raise ValueError(f"{Q} is not definite (discriminant {Q.disc})")
    if Q.A < 0:
        raise ValueError(f"{Q} is negative definite")
    return Q


def reduce_with_matrix(Q: QuadForm) -> tuple[QuadForm, tuple[int, int, int, int]]:
    """Gauss reduction; returns the reduced form and ``g`` with ``Q o g`` reduced."""
    A, B, C = _check(Q)
    g = (1, 0, 0, 1)
    while True:
        if not -A < B <= A:
            # translate: X -> X + kY
            k = (A - B) // (2 * A)
            B, C = B + 2 * k * A, A * k * k + B * k + C
            a, b, c, d = g
            g = (a, a * k + b, c, c * k + d)
            continue
        if A > C or (A == C and B < 0):
            # S: (X, Y) -> (-Y, X)
            A, B, C = C, -B, A
            a, b, c, d = g
            g = (b, -a, d, -c)
            continue
        return QuadForm(A, B, C), g


def reduce(Q: QuadForm) -> QuadForm:
    return reduce_with_matrix(Q)[0]


@lru_cache(maxsize=8192)
def enumerate_reduced(d: int) -> tuple[QuadForm, ...]:
    """All reduced forms of discriminant ``-d``, primitive or not, sorted."""
    if d <= 0 or d % 4 not in (0, 3):
        raise ValueError(f"-{d} is not a negative discriminant")
    out = []
    for A in range(1, isqrt(d // 3) + 1):
        for B in range(-A + 1, A + 1):
            if (B - d) % 2:
                continue
            num = B * B + d
            if num % (4 * A):
                continue
            C = num // (4 * A)
            if C < A or (C == A and B < 0):
                continue
            out.append(QuadForm(A, B, C))
    return tuple(sorted(out))


def stabilizer_order(Q: QuadForm) -> int:
    """``#Gamma_Q`` in ``PSL_2(Z)`` for a reduced form."""
    A, B, C = Q
    if A == B == C:
        return 3
    if B == 0 and A == C:
        return 2
    return 1


def class_count(d: int) -> int:
    """Number of ``SL_2(Z)``-classes of forms of discriminant ``-d``."""
    return len(enumerate_reduced(d))


@lru_cache(maxsize=None)
def hurwitz_H(d: int) -> Fraction:
    """Hurwitz-Kronecker class number; ``H(0) = -1/12`` and ``H(d) = 0`` for ``d = 1, 2 mod 4``."""
    if d < 0:
        raise ValueError("negative d: use cmtrace.trace_tm for the d <= 0 conventions")
    if d == 0:
        return Fraction(-1, 12)
    if d % 4 in (1, 2):
        return Fraction(0)
    return sum((Fraction(1, stabilizer_order(Q)) for Q in enumerate_reduced(d)), Fraction(0))
