"""Tests for the exception hierarchy and exit codes."""

import pytest

from src.core.exceptions import (
    BoundaryRegionError,
    ConfigurationError,
    DegenerateFitError,
    DivergentIntegralError,
    ExitCode,
    LatticeScaleError,
    ModelOutOfScopeError,
    OpenCaseError,
    ParameterValidationError,
    RectangleRangeError,
    ResourceLimitError,
    ToleranceError,
    UnsupportedRegionError,
)


class TestExitCodes:
    """Test cases for the exit code carried by each error."""

    @pytest.mark.parametrize("error,code", [
        (ParameterValidationError, ExitCode.VALIDATION),
        (ConfigurationError, ExitCode.VALIDATION),
        (RectangleRangeError, ExitCode.VALIDATION),
        (DegenerateFitError, ExitCode.VALIDATION),
        (BoundaryRegionError, ExitCode.OUT_OF_SCOPE),
        (OpenCaseError, ExitCode.OUT_OF_SCOPE),
        (UnsupportedRegionError, ExitCode.OUT_OF_SCOPE),
        (DivergentIntegralError, ExitCode.OUT_OF_SCOPE),
        (ResourceLimitError, ExitCode.RESOURCE),
        (ToleranceError, ExitCode.RESOURCE),
    ])
    def test_exit_code(self, error, code):
        assert error("message").exit_code == code
        assert issubclass(error, LatticeScaleError)

    def test_out_of_scope_family(self):
        with pytest.raises(ModelOutOfScopeError):
            raise OpenCaseError("balanced case at gamma0")

    def test_codes(self):
        assert [int(c) for c in ExitCode] == [0, 2, 3, 4]
