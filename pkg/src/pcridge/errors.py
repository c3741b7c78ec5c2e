"""Exception types raised deliberately across the package."""


class PcridgeError(Exception):
    """Base class for every error this package raises on purpose."""


class ConstantColumn(PcridgeError):
    """A predictor column has zero variance and cannot be standardized."""

    def __init__(self, column):
        self.column = int(column)
        super().__init__(f"column {column} has zero variance")


class DimensionMismatch(PcridgeError):
    """Shapes of related arrays disagree."""


class RankZero(PcridgeError):
    """No eigenvalue exceeded the zero threshold."""


class NegativeK(PcridgeError):
    """Ridge shrinkage parameter must be nonnegative."""


class NonPositiveK(PcridgeError):
    """Logistic ridge requires a strictly positive shrinkage parameter."""


class TargetOutOfRange(PcridgeError):
    """Requested degrees of freedom lies outside (0, t]."""


class ROutOfRange(PcridgeError):
    """Component count r lies outside the valid range."""


class UndefinedEstimator(PcridgeError):
    """Estimator needs n > p with full column rank."""


class ZeroNorm(PcridgeError):
    """Coefficient vector has zero squared norm."""


class FoldTooSmall(PcridgeError):
    """Cross-validation split leaves too few observations to fit on."""


class NonBinaryLabels(PcridgeError):
    """Binary response must contain only 0/1 values, with both present."""


class DegenerateWeights(PcridgeError):
    """All fitted probabilities collapsed onto 0 or 1."""


class Separation(PcridgeError):
    """Unpenalized logistic fit diverged; data are (quasi-)separable."""


class TooManySelected(PcridgeError):
    """Selected predictor count reached n; multiple regression cannot run."""


class InsufficientEligibleSnps(PcridgeError):
    """Fewer SNPs in the allowed frequency window than requested causal count."""


class QuotaUnreachable(PcridgeError):
    """Case/control quotas were not met within the draw budget."""


class ParseError(PcridgeError):
    """A matrix/vector file held a token that does not parse as a number."""

    def __init__(self, line, column, message=""):
        self.line = int(line)
        self.column = int(column)
        super().__init__(
            message or f"unparseable value at line {line}, column {column}"
        )


class RaggedRows(PcridgeError):
    """A data row has a different width than the first row."""

    def __init__(self, line, expected, got):
        self.line = int(line)
        self.expected = int(expected)
        self.got = int(got)
        super().__init__(
            f"line {line} has {got} values, expected {expected}"
        )


class EmptyFile(PcridgeError):
    """No data rows found."""


class ConfigError(PcridgeError):
    """A config file line is malformed or a key/value is invalid."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ArtifactError(PcridgeError):
    """A fit artifact is missing required fields or has an unknown version."""


class ZeroSignalWarning(UserWarning):
    """Leading canonical coefficients are all zero; k_r is infinite."""
