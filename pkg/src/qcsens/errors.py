"""Exception types shared across the library."""


class NotHermitian(ValueError):
    """Matrix expected to equal its conjugate transpose."""


class NotUnitary(ValueError):
    """Matrix expected to satisfy W†W = I."""


class ConvergenceFailure(RuntimeError):
    """An iterative solver hit its iteration cap with residual above tolerance."""


class DimensionMismatch(ValueError):
    """Operands have incompatible dimensions."""


class DimensionTooLarge(ValueError):
    """Input exceeds the supported dense-solver dimension."""


class ParamLengthMismatch(ValueError):
    """Parameter vector length does not match the ansatz parameter count."""


class IndexOutOfRange(IndexError):
    """Parameter index outside the valid range [0, P)."""


class EmptyDataset(ValueError):
    """Dataset contains no samples."""


class SingleClass(ValueError):
    """Dataset must contain exactly two classes."""


class TooFewFeatures(ValueError):
    """Dataset has fewer usable features than the encoding needs."""
