"""Exception types shared across the package."""


class DimwitError(Exception):
    """Base class for all errors raised by this package."""


class NotHermitianError(DimwitError):
    """Input matrix failed the Hermiticity check."""


class NoConvergenceError(DimwitError):
    """Iterative solver exhausted its sweep limit."""


class NotPSDError(DimwitError):
    """Matrix has an eigenvalue below the allowed negative tolerance."""


class DimensionMismatchError(DimwitError):
    """Operator or vector dimensions are inconsistent."""


class ScenarioMismatchError(DimwitError):
    """Functional and table (or model) belong to different scenarios."""


class SignalingError(DimwitError):
    """Per-partner-setting marginals of a table disagree beyond tolerance."""


class InvalidTableError(DimwitError):
    """Probability table violates positivity or normalization."""


class InvalidModelError(DimwitError):
    """Quantum model violates state-norm or POVM constraints."""


class WrongOutcomeCountError(DimwitError):
    """Measurement update applied to a setting with the wrong outcome count."""


class ConfigError(DimwitError):
    """Invalid optimizer configuration."""


class StrategySpaceTooLargeError(DimwitError):
    """Deterministic-strategy enumeration would exceed the configured cap."""


class ParseError(DimwitError):
    """Malformed functional/matrix/table text.

    Carries 1-based ``line`` and ``column`` of the offending token when known.
    """

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column


class MissingScenarioError(ParseError):
    """Functional text has no (or a misplaced) scenario declaration."""


class TermIndexError(ParseError):
    """A term's outcome or setting index is outside the declared scenario."""


class RaggedRowsError(ParseError):
    """Correlation-matrix rows have inconsistent lengths (or the matrix is not square)."""


class NonNumericError(ParseError):
    """Correlation-matrix cell is not a real number."""


class ZeroMatrixError(DimwitError):
    """Correlation matrix has zero sign-enumeration norm and cannot be normalized."""


class MatrixTooLargeError(DimwitError):
    """Correlation matrix exceeds the exact sign-enumeration size cap."""
