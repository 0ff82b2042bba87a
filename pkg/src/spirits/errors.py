"""Exception hierarchy shared by all modules.

Each class carries the CLI exit code it maps to.
"""


class SpiritsError(Exception):
    exit_code = 1


class ConfigError(SpiritsError, ValueError):
    exit_code = 2

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DomainError(SpiritsError, ValueError):
    exit_code = 3


class PhaseError(SpiritsError):
    exit_code = 3


class BasinError(SpiritsError):
    exit_code = 3


class DegenerateRootError(SpiritsError):
    """A tangency (double root) of G(c) = c was detected.

    ``roots`` holds all roots found, with the merged pair reported once.
    """

    exit_code = 3

    def __init__(self, message, roots=()):
        super().__init__(message)
        self.roots = tuple(roots)


OnBoundary = DegenerateRootError


class InsufficientTransitions(SpiritsError):
    exit_code = 4

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class FitError(SpiritsError):
    exit_code = 4


class NumericError(SpiritsError, ArithmeticError):
    exit_code = 5


class NonConvergence(NumericError):
    pass


class NumericOverflow(NumericError, OverflowError):
    pass
