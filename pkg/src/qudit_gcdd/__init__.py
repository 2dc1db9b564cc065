"""Generalized continuous dynamical decoupling for qudit gates."""

from .errors import (
    ConfigError, ConsistencyError, DomainError, GCDDError, IntegrationError,
    NumericError,
)

__version__ = "0.1.0"
