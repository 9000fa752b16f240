"""Exception hierarchy shared across the package."""


class FairsearchError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(FairsearchError):
    """Dataset schema is invalid or does not match the data."""


class LabelError(FairsearchError):
    """Label column is missing, non-binary, or inconsistent with the schema."""


class RowParseError(FairsearchError):
    """A data cell could not be parsed; carries the offending row index."""

    def __init__(self, message, row):
        super().__init__(f"row {row}: {message}")
        self.row = row


class HyperparameterError(FairsearchError):
    """Unknown hyperparameter key or value outside its declared range."""


class DivergenceError(FairsearchError):
    """Training produced a non-finite loss; carries the epoch it happened."""

    def __init__(self, message, epoch):
        super().__init__(f"{message} (epoch {epoch})")
        self.epoch = epoch


class MitigationError(FairsearchError):
    """A preprocessor or postprocessor hit a degenerate group or cell."""


class MetricError(FairsearchError):
    """A metric cannot be computed on the given inputs."""


class SearchSpaceError(FairsearchError):
    """Search-space document is malformed or references unknown options."""


class FrontierError(FairsearchError):
    """No candidate has all requested metrics defined."""
