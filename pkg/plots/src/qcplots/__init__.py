"""Figure rendering for qcsens row CSVs.

The package never imports qcsens: it consumes the documented CSV schema and
nothing else, so the statistics it draws double as an independent cross-check
of the numbers the generator reports.
"""

__version__ = "0.1.0"

from .errors import EmptyInput, PlotError, SchemaMismatch
from .figures import KINDS, FigureSpec, prepare, render

__all__ = [
    "EmptyInput",
    "FigureSpec",
    "KINDS",
    "PlotError",
    "SchemaMismatch",
    "prepare",
    "render",
]
