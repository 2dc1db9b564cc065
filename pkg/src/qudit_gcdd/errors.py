"""Exception hierarchy shared by all modules."""


class GCDDError(Exception):
    """Base class for every error raised by this package."""


class DomainError(GCDDError, ValueError):
    """An input lies outside the domain an operation is defined on."""


class NumericError(GCDDError, ArithmeticError):
    """An iterative procedure failed to converge."""


class ConsistencyError(GCDDError, RuntimeError):
    """An internal identity that must hold by construction was violated."""


class ConfigError(GCDDError, ValueError):
    """A run configuration is malformed or violates a cross-field constraint."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        prefix = ""
        if field is not None:
            prefix += f"{field}: "
        if line is not None:
            prefix = f"line {line}: " + prefix
        super().__init__(prefix + message)


class IntegrationError(GCDDError, RuntimeError):
    """The master-equation integrator detected an unacceptable drift."""

    def __init__(self, message, suggested_n_steps=None):
        self.suggested_n_steps = suggested_n_steps
        if suggested_n_steps is not None:
            message = f"{message} (try n_steps >= {suggested_n_steps})"
        super().__init__(message)
