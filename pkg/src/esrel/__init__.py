"""Traces of singular moduli, class numbers and their Eichler-Selberg relations."""

from .qseries import QSeries, PrecisionError
from .quadforms import QuadForm, hurwitz_H
from .cmtrace import TraceRecord, trace_tm
from .weilrep import MetaplecticElement, Zeta8, Zeta8Matrix, rho_matrix
from .poincare import PoincareForm
from .relations import GSeries, Report, g_series
from .lfunc import LValueResult

__version__ = "0.1.0"

__all__ = [
    "QSeries",
    "PrecisionError",
    "QuadForm",
    "hurwitz_H",
    "TraceRecord",
    "trace_tm",
    "MetaplecticElement",
    "Zeta8",
    "Zeta8Matrix",
    "rho_matrix",
    "PoincareForm",
    "GSeries",
    "Report",
    "g_series",
    "LValueResult",
]
