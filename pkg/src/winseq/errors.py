"""Exception types raised across the package."""


class WinSeqError(Exception):
    """Base class for all errors raised by this package."""


class MalformedRecord(WinSeqError):
    """A subject record violates its structural invariants."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class EmptyHierarchy(WinSeqError):
    """A hierarchy spec has no tiers."""


class EmptyArm(WinSeqError):
    """A dataset arm contains no subjects."""


class DegenerateSample(WinSeqError):
    """Too few subjects per arm for covariance estimation."""


class ZeroVariance(WinSeqError):
    """Estimated variance of a test statistic is not positive."""


class DegenerateWinRatio(WinSeqError):
    """Win ratio undefined because there are no wins or no losses."""


class DomainError(WinSeqError):
    """An argument lies outside its mathematical domain."""


class InfeasibleSpend(WinSeqError):
    """An incremental alpha spend is not solvable for a boundary."""


class ConvergenceFailure(WinSeqError):
    """Boundary root-finding failed to converge."""


class ConfigError(WinSeqError):
    """A simulation or design configuration violates its invariants."""


class InsufficientData(WinSeqError):
    """An interim look has too few analyzable subjects."""


class ParseError(WinSeqError):
    """A data file could not be parsed."""

    def __init__(self, line, column, reason):
        super().__init__(f"line {line}, column {column!r}: {reason}")
        self.line = line
        self.column = column
        self.reason = reason


class DuplicateId(WinSeqError):
    """Two rows in a subject file share a subject id."""


class InvariantViolation(WinSeqError):
    """A parsed row produced a record violating its invariants."""

    def __init__(self, line, field, reason):
        super().__init__(f"line {line}, field {field!r}: {reason}")
        self.line = line
        self.field = field
        self.reason = reason
