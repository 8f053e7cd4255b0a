"""Exception hierarchy shared by the solver library and the harness."""


class SredaError(Exception):
    """Base class for every error raised by sreda."""


class ContractViolation(SredaError, ValueError):
    """A programming error: mismatched dimensions or non-finite values."""


class CapabilityError(SredaError, RuntimeError):
    """An optional oracle capability was requested but is not implemented."""


class ParameterError(SredaError, ValueError):
    """Solver parameters are invalid, overflow, or an override does not type-check."""


class InputError(SredaError, ValueError):
    """Bad arguments to a metric, registry lookup, or component index."""


class ConfigError(SredaError, ValueError):
    """An experiment config could not be parsed or validated."""
