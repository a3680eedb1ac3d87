"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A run / sweep specification is internally inconsistent or out of range."""


class NumericError(RuntimeError):
    """A numerical result violated an invariant (non-finite, trace drift, ...)."""


class ConvergenceError(NumericError):
    """A recurrence or iteration diverged."""


class IllConditionedError(NumericError):
    """A linear system is too ill-conditioned to solve as requested."""


class SchemaError(ValueError):
    """A CSV or config file does not match the documented schema."""
