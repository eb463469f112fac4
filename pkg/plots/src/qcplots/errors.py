class PlotError(Exception):
    """Base class for everything this package raises on purpose."""


class SchemaMismatch(PlotError):
    """The input CSV does not carry the columns the figure kind needs."""


class EmptyInput(PlotError):
    """The input CSV has no data rows."""
