"""Custom exceptions for latticescale."""

from enum import IntEnum


class ExitCode(IntEnum):
    """Process exit codes reported by the command line."""
    OK = 0
    VALIDATION = 2
    OUT_OF_SCOPE = 3
    RESOURCE = 4


class LatticeScaleError(Exception):
    """Base exception for latticescale errors."""
    exit_code = ExitCode.VALIDATION


class ParameterValidationError(LatticeScaleError):
    """Exception raised when a model or command parameter is out of range."""
    pass


class ConfigurationError(LatticeScaleError):
    """Exception raised when configuration values cannot be parsed."""
    pass


class RectangleRangeError(LatticeScaleError):
    """Exception raised when a summation rectangle does not fit the simulated slab."""
    pass


class DegenerateFitError(LatticeScaleError):
    """Exception raised when a slope fit has too few usable scales."""
    pass


class ModelOutOfScopeError(LatticeScaleError):
    """Exception raised when a query falls outside what the scaling theory covers."""
    exit_code = ExitCode.OUT_OF_SCOPE


class BoundaryRegionError(ModelOutOfScopeError):
    """Exception raised for parameters on a region boundary."""
    pass


class OpenCaseError(ModelOutOfScopeError):
    """Exception raised for the balanced case at the edge-transition point, which is unresolved."""
    pass


class UnsupportedRegionError(ModelOutOfScopeError):
    """Exception raised when a quantity is not available for the given region."""
    pass


class DivergentIntegralError(ModelOutOfScopeError):
    """Exception raised when an integral diverges for the given exponents."""
    pass


class ResourceLimitError(LatticeScaleError):
    """Exception raised when a computation would exceed the memory budget."""
    exit_code = ExitCode.RESOURCE


class ToleranceError(LatticeScaleError):
    """Exception raised when a series or quadrature cannot reach its tolerance."""
    exit_code = ExitCode.RESOURCE
