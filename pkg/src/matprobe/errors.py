"""Exception types shared across the package."""


class MatprobeError(Exception):
    """Base class for all package-specific errors."""


class ZeroInverse(MatprobeError):
    """Attempted to invert 0 in a prime field."""


class ZeroMatrix(MatprobeError):
    """Operation undefined on the all-zero matrix."""


class ConvergenceFailure(MatprobeError):
    """Iterative decomposition did not converge within its cap."""


class OutOfRange(MatprobeError):
    """Parameter outside its admissible interval."""


class BudgetExceeded(MatprobeError):
    """Oracle query budget would be exceeded."""


class NonAdaptivityViolation(MatprobeError):
    """Read outside the sealed query set."""


class AlreadyRead(MatprobeError):
    """seal() called after reads were issued."""


class IndexOutOfRange(MatprobeError):
    """Queried index outside the hidden matrix."""


class ShapeMismatch(MatprobeError):
    """Probe matrix shape or kind does not match the hidden matrix."""


class MaskNotStaircase(MatprobeError):
    """Partial-matrix mask lacks the staircase (column-prefix) structure."""


class NotFullRankBase(MatprobeError):
    """Augment base submatrix is not square full-rank."""


class EmptyPool(MatprobeError):
    """Bernoulli sampling produced an empty index pool."""


class InsufficientSketch(MatprobeError):
    """Sketch dimension smaller than the cycle length."""


class TooLarge(MatprobeError):
    """Instance exceeds the exhaustive-oracle feasibility bound."""
