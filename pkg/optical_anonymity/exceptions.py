"""Exception hierarchy and process exit codes"""

from enum import IntEnum


class ExitCode(IntEnum):
    """Exit codes returned by the olenc command line"""

    OK = 0
    FAILURE = 1
    USAGE = 2
    UNDERRUN = 3
    BUDGET = 4
    INFEASIBLE = 5


class OpticalAnonymityError(Exception):
    """Base class for every error raised by the library"""

    exit_code: ExitCode = ExitCode.FAILURE


class InvalidPolynomialError(OpticalAnonymityError, ValueError):
    """Polynomial text or coefficient set is malformed"""

    exit_code = ExitCode.USAGE


class UnsupportedDegreeError(OpticalAnonymityError, ValueError):
    """Register length outside the enumeration or factorisation bounds"""

    exit_code = ExitCode.USAGE


class LengthMismatchError(OpticalAnonymityError, ValueError):
    """Two bit strings (or a seed and a register) disagree in length"""

    exit_code = ExitCode.USAGE


class ConfigurationError(OpticalAnonymityError, ValueError):
    """A configuration or run file failed validation"""

    exit_code = ExitCode.USAGE


class SourceUnderrunError(OpticalAnonymityError):
    """A pRNG or injected source ran out of bits"""

    exit_code = ExitCode.UNDERRUN

    def __init__(self, needed: int, available: int):
        self.needed = needed
        self.available = available
        super().__init__(
            f"Source underrun: needed {needed} more bit(s), only {available} available"
        )


class WeakKeyError(OpticalAnonymityError):
    """An all-zero seed was drawn while strict key generation is enabled"""


class BudgetExceededError(OpticalAnonymityError):
    """Schedules to enumerate exceed the configured attack budget"""

    exit_code = ExitCode.BUDGET

    def __init__(self, required: int, budget: int, message: str | None = None):
        self.required = required
        self.budget = budget
        super().__init__(message or f"Search of {required} schedule(s) exceeds attack budget {budget}")


class InfeasibleDesignError(OpticalAnonymityError, ValueError):
    """A design equation has no valid solution for the given inputs"""

    exit_code = ExitCode.INFEASIBLE


class BrokenConfigurationError(InfeasibleDesignError):
    """The interruption-avoiding keyspace collapses to zero"""
