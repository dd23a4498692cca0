"""Exception hierarchy shared by the library and the CLI exit-code mapping."""

from __future__ import annotations


class IrrSamplingError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(IrrSamplingError, ValueError):
    """An argument lies outside the domain where a formula or bound is valid.

    ``constant`` names the bound constant (``"C1"``, ``"C3"``, ...) whose
    precondition failed, when there is one.
    """

    def __init__(self, message: str, constant: str | None = None):
        super().__init__(message)
        self.constant = constant


class CoincidentNodesError(DomainError):
    """Two distinct indices map to the same sampling node."""


class ConfigError(IrrSamplingError, ValueError):
    """A configuration file or override could not be parsed or validated."""
