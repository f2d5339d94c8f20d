"""Exception types shared across the package."""


class FtkitError(Exception):
    """Base class for all package-specific errors."""


class NumericOverflowError(FtkitError, FloatingPointError):
    """A forward pass, gradient, or update produced a non-finite value."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


class ConfigError(FtkitError, ValueError):
    """An experiment config violates the schema; ``field_path`` names the culprit."""

    def __init__(self, field_path, message):
        super().__init__(f"{field_path}: {message}")
        self.field_path = field_path


class CsvError(FtkitError, ValueError):
    """Base class for CSV ingestion failures."""


class EmptyCsvError(CsvError):
    """The file contains no data rows."""


class RaggedRowError(CsvError):
    """A row has a different number of cells than the first row."""

    def __init__(self, row, expected, found):
        super().__init__(f"row {row} has {found} cells, expected {expected}")
        self.row = row


class NonNumericCellError(CsvError):
    """A cell could not be parsed as a number."""

    def __init__(self, row, col, cell):
        super().__init__(f"cell {cell!r} at row {row}, column {col} is not numeric")
        self.row = row
        self.col = col


class DegenerateColumnError(FtkitError, ValueError):
    """A constant column cannot be normalized."""


class DegenerateClassError(FtkitError, ValueError):
    """Thresholding left one side of the confusion table empty."""
