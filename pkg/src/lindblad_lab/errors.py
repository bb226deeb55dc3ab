from __future__ import annotations

"""Exception hierarchy shared by the library and the CLI."""

from typing import Optional

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INAPPLICABLE = 2
EXIT_NUMERICAL = 3


class LindbladLabError(Exception):
    """Base class for every error raised by lindblad_lab."""

    exit_code = EXIT_NUMERICAL


class ValidationError(LindbladLabError, ValueError):
    """Invalid input supplied by the caller."""

    exit_code = EXIT_VALIDATION


class DimensionMismatchError(ValidationError):
    pass


class NotHermitianError(ValidationError):
    pass


class NotDensityMatrixError(ValidationError):
    pass


class DimensionCapError(ValidationError):
    """Total Hilbert space dimension exceeds the configured cap."""


class ConfigError(ValidationError):
    """Invalid scenario configuration; ``field`` is a dotted path into the config."""

    def __init__(self, message: str, field: Optional[str] = None) -> None:
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class MatrixParseError(ValidationError):
    def __init__(self, message: str, line: int, column: int = 1) -> None:
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class ReportSchemaError(ValidationError):
    pass


class NotErgodicError(ValidationError):
    """A local dissipator was required to have a unique steady state but does not."""


class NumericalError(LindbladLabError):
    """A numerical check failed; usually a tolerance that is too tight."""

    exit_code = EXIT_NUMERICAL


class NonSemisimpleError(NumericalError):
    pass


class ExtractionError(NumericalError):
    pass


class AlgebraClosureError(NumericalError):
    pass
