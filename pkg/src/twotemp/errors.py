"""Exception hierarchy. The CLI maps each family to a process exit code."""

from __future__ import annotations


class TwoTempError(Exception):
    """Base class for all package errors."""


class ValidationError(TwoTempError, ValueError):
    """Invalid parameters or configuration (exit code 2)."""


class DomainError(ValidationError):
    """Argument outside the domain of a formula."""


class NumericalError(TwoTempError, RuntimeError):
    """A numerical procedure failed to meet its contract (exit code 3)."""


class QuadratureError(NumericalError):
    """Two quadrature resolutions disagree beyond tolerance."""


class MonteCarloError(NumericalError):
    """Non-finite sample weight or exceeded error budget."""

    def __init__(self, message: str, sample: dict | None = None):
        super().__init__(message)
        self.sample = sample


class GalerkinError(NumericalError):
    """Gram matrix indefinite or near singular on the constrained subspace."""


class MajorantViolation(NumericalError):
    """Particle acceptance probability exceeded one."""

    def __init__(self, message: str, sample: dict | None = None):
        super().__init__(message)
        self.sample = sample


class PositivityError(NumericalError):
    """Fluid state lost positivity."""

    def __init__(self, message: str, cell: int | None = None):
        super().__init__(message)
        self.cell = cell


class ConvergenceError(NumericalError):
    """Iteration did not reach its residual target."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class AcceptanceFailure(TwoTempError):
    """One or more verification checks failed (exit code 4)."""
