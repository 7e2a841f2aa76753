"""Exception hierarchy shared by all modules."""


class LadderError(Exception):
    """Base class for every error raised by this package."""


class DomainError(LadderError, ValueError):
    """Argument outside the validity region of an evaluator."""


class WindowError(LadderError, ValueError):
    """Window parameters violate an admissibility constraint."""


class PrecisionError(LadderError):
    """Oracle result not stable under precision escalation."""


class ToleranceNotMet(LadderError):
    """Quadrature could not reach the requested tolerance.

    Carries the best available estimate and the achieved error.
    """

    def __init__(self, message, estimate, error):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class TableCorruption(LadderError):
    """Checkpoint table violates its invariants."""


class BracketError(LadderError):
    """Root bracket does not straddle the target value."""

    def __init__(self, message, interval):
        super().__init__(f"{message} (interval {interval[0]!r}, {interval[1]!r})")
        self.interval = interval


class ConvergenceError(LadderError):
    """Iterative solver failed to converge."""


class NoRootError(LadderError):
    """Mean-value equation has no detected root on the segment."""


class SharedBetaError(LadderError):
    """Beta vectors of records that must share them disagree."""


class CoefficientBlowUp(WindowError):
    """An interaction coefficient denominator is inside the epsilon margin."""
