"""Small integer helpers shared by the number-theoretic modules."""

from __future__ import annotations

from functools import lru_cache
from math import gcd, isqrt

from sympy import factorint

__all__ = [
    "divisors",
    "sigma",
    "mobius",
    "is_square",
    "xgcd",
    "inverse_mod",
    "euler_phi",
    "units_mod",
]


@lru_cache(maxsize=4096)
def divisors(n: int) -> tuple[int, ...]:
    """Positive divisors of ``|n|`` in increasing order."""
    n = abs(n)
    if n == 0:
        raise ValueError("0 has no finite divisor list")
    small, large = [], []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
    return tuple(small + large[::-1])


def sigma(n: int, k: int = 1) -> int:
    return sum(d**k for d in divisors(n))


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius needs n >= 1")
    f = factorint(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y == g == gcd(a, b)``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def inverse_mod(a: int, n: int) -> int:
    if n == 1:
        return 0
    return pow(a, -1, n)


def euler_phi(n: int) -> int:
    out = n
    for p in factorint(n):
        out -= out // p
    return out


def units_mod(c: int) -> list[int]:
    """Representatives ``0 <= d < c`` with ``gcd(c, d) == 1``; ``[0]`` for ``c == 1``."""
    if c == 1:
        return [0]
    return [d for d in range(1, c) if gcd(c, d) == 1]
