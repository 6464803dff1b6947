"""Exception hierarchy. ValidationError maps to CLI exit code 2."""


class GridfreqError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(GridfreqError):
    """Invalid input: bad parameters, malformed files, violated preconditions."""


class BudgetExceededError(ValidationError):
    """Requested grid exceeds the configured node budget."""


class ResolutionError(ValidationError):
    """Grid spacing too coarse to resolve a geometric feature."""
