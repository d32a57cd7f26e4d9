"""Exception types shared across the package."""


class DirichletLabError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(DirichletLabError, ValueError):
    """A run configuration is malformed or inconsistent."""


class DomainError(DirichletLabError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class CertificationError(DirichletLabError, ValueError):
    """A required analytic certificate (e.g. halving decay) does not exist."""


class BracketError(DirichletLabError, ValueError):
    """A dimension function fails a required comparability bracket."""


class BudgetError(DirichletLabError, RuntimeError):
    """A lattice enumeration would exceed the configured point budget."""


class ConstructionError(DirichletLabError, RuntimeError):
    """A finite-range construction (e.g. the radius set Lambda) came up empty."""


class NoValidKError(DirichletLabError, ValueError):
    """The geometric ladder admits no bracket index at this integer vector."""


class InvariantViolation(DirichletLabError, RuntimeError):
    """An internal cross-check between independent code paths failed."""
