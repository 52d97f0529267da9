"""Exception types shared across the package."""


class DomainError(ValueError):
    """A parameter lies outside the domain where a quantity is defined."""


class BracketError(RuntimeError):
    """No sign change could be bracketed for a root-finding problem."""


class ConvergenceError(RuntimeError):
    """An iterative method stopped before reaching its tolerance."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
