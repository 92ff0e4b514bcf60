from __future__ import annotations


class EsdSimError(Exception):
    """Base class for every error raised by the simulator."""


class DomainError(EsdSimError, ValueError):
    """A parameter lies outside the domain an operation accepts."""


class NotHermitianError(DomainError):
    pass


class NotXFormError(DomainError):
    pass


class InvalidStateError(DomainError):
    """A matrix failed density-matrix validation where a valid state is required."""

    def __init__(self, message: str, report: object | None = None) -> None:
        super().__init__(message)
        self.report = report


class ConfigError(EsdSimError, ValueError):
    pass


class UnsupportedChannelError(EsdSimError, NotImplementedError):
    pass


class NumericalError(EsdSimError, ArithmeticError):
    """Numerical procedure failed; the CLI maps this to exit code 2."""


class EigenvalueConvergenceError(NumericalError):
    pass


class SpuriousImaginaryError(NumericalError):
    pass


class BracketError(NumericalError):
    pass
