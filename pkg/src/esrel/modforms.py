"""Level-one cusp spaces: echelon bases, Hecke matrices and their traces."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .qseries import QSeries, PrecisionError, delta, eisenstein, hecke_Tm

__all__ = [
    "CuspSpace",
    "cusp_dim",
    "eisenstein_monomial",
    "miller_basis",
    "hecke_matrix",
    "trace_Tn",
    "eigenform",
    "cusp_coordinates",
]


def cusp_dim(weight: int) -> int:
    """Dimension of ``S_weight`` for ``SL_2(Z)``."""
    if weight % 2 or weight < 0:
        return 0
    if weight == 2:
        return 0
    d = weight // 12
    return d - 1 if weight % 12 == 2 else d


def eisenstein_monomial(weight: int, precision: int) -> QSeries:
    """``E4^a E6^b`` of the given weight with ``b in {0, 1}``; ``1`` for weight 0."""
    if weight == 0:
        return QSeries.constant(1, precision)
    if weight < 4 or weight % 2:
        raise ValueError(f"no Eisenstein monomial of weight {weight}")
    if weight % 4 == 0:
        return eisenstein(4, precision) ** (weight // 4)
    out = eisenstein(6, precision)
    if weight > 6:
        out = out * eisenstein(4, precision) ** ((weight - 6) // 4)
    return out


@dataclass(frozen=True)
class CuspSpace:
    weight: int
    dim: int
    basis: tuple[QSeries, ...]

    @property
    def precision(self) -> int:
        return min((f.precision for f in self.basis), default=0)


@lru_cache(maxsize=64)
def miller_basis(weight: int, precision: int) -> CuspSpace:
    """Reduced echelon basis ``f_i = q^i + O(q^(dim+1))`` of ``S_weight``."""
    if weight % 2:
        raise ValueError("weight must be even")
    d = cusp_dim(weight)
    if d == 0:
        return CuspSpace(weight, 0, ())
    if precision <= d:
        raise PrecisionError("precision must exceed the dimension")
    dl = delta(precision)
    rows = []
    power = dl
    for i in range(1, d + 1):
        rows.append(power * eisenstein_monomial(weight - 12 * i, precision))
        power = power * dl
    rows = [r.truncate(precision) for r in rows]
    for i in range(d - 1, -1, -1):
        for jdx in range(i + 1, d):
            c = rows[i][jdx + 1]
            if c:
                rows[i] = rows[i] - rows[jdx].scale(c)
    return CuspSpace(weight, d, tuple(rows))


def hecke_matrix(weight: int, n: int) -> list[list[Fraction]]:
    """Matrix of ``T_n`` on the echelon basis: ``T_n f_i = sum_j M[i][j] f_j``."""
    d = cusp_dim(weight)
    if d == 0:
        return []
    space = miller_basis(weight, n * d + 1)
    mat = []
    for f in space.basis:
        g = hecke_Tm(f, weight, n)
        mat.append([g[j] for j in range(1, d + 1)])
    return mat


def trace_Tn(weight: int, n: int) -> Fraction:
    """Exact trace of ``T_n`` on ``S_weight``."""
    if n < 1:
        raise ValueError("n must be positive")
    mat = hecke_matrix(weight, n)
    return sum((mat[i][i] for i in range(len(mat))), Fraction(0))


def eigenform(weight: int, precision: int = 50) -> QSeries:
    """The normalized eigenform of a one-dimensional cusp space."""
    d = cusp_dim(weight)
    if d != 1:
        raise ValueError(f"S_{weight} has dimension {d}; only dimension 1 is supported")
    return miller_basis(weight, max(precision, 2)).basis[0]


def cusp_coordinates(f: QSeries, weight: int) -> list[Fraction] | None:
    """Coordinates of ``f`` in the echelon basis, or ``None`` if ``f`` is not a cusp form.

    Membership is decided on the full known window of ``f``.
    """
    d = cusp_dim(weight)
    if f.valuation < 0 and any(f[n] for n in range(f.valuation, 1)):
        return None
    if f[0]:
        return None
    coords = [f[i] for i in range(1, d + 1)]
    if d == 0:
        return [] if f.is_zero() else None
    space = miller_basis(weight, max(f.precision, d + 1))
    recon = None
    for c, b in zip(coords, space.basis):
        term = b.scale(c)
        recon = term if recon is None else recon + term
    return coords if (f - recon).is_zero() else None
