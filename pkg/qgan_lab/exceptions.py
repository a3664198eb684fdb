"""Exceptions raised by qgan-lab.

Every class carries the process exit code the CLI maps it to.
"""

from __future__ import annotations

from singer_sdk.exceptions import ConfigValidationError

EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_IO = 3


class QganLabError(Exception):
    """Base class for all qgan-lab errors."""

    exit_code = EXIT_NUMERIC


class DimensionError(QganLabError):
    """Qubit count out of range or operand shapes that do not match."""


class ContractError(QganLabError):
    """An argument violates a documented precondition."""


class NumericError(QganLabError):
    """A numerical routine failed or produced a non-finite value."""


class SpecError(QganLabError):
    """A Hamiltonian or ansatz description is inconsistent."""

    exit_code = EXIT_CONFIG


class DataError(QganLabError):
    """Target data could not be turned into a probability vector."""

    exit_code = EXIT_CONFIG


class NormalizationError(DataError):
    """Probabilities are negative or do not sum to one."""


class DatasetParseError(DataError):
    """A sample file line is not a base-10 integer."""

    def __init__(self, line_number: int, message: str) -> None:
        """Create the error.

        Args:
            line_number: 1-based line in the sample file.
            message: What was wrong with the line.
        """
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class DatasetRangeError(DataError):
    """A sample or an inline list does not fit the declared qubit count."""


class ConfigurationError(QganLabError, ConfigValidationError):
    """Base class for experiment configuration errors."""

    exit_code = EXIT_CONFIG


class ConfigSyntaxError(ConfigurationError):
    """A config line is not a `key = value` pair."""

    def __init__(self, line_number: int, message: str) -> None:
        """Create the error.

        Args:
            line_number: 1-based line in the config file.
            message: What was wrong with the line.
        """
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class UnknownConfigKeyError(ConfigurationError):
    """A config key is not part of the schema."""

    def __init__(self, key: str, line_number: int) -> None:
        """Create the error.

        Args:
            key: The offending key.
            line_number: 1-based line in the config file.
        """
        super().__init__(f"line {line_number}: unknown config key '{key}'")
        self.key = key
        self.line_number = line_number


class ConfigValueError(ConfigurationError):
    """A config value is out of range or of the wrong type."""

    def __init__(self, key: str, message: str) -> None:
        """Create the error.

        Args:
            key: The config key whose value is invalid.
            message: Why the value was rejected.
        """
        super().__init__(f"{key}: {message}")
        self.key = key


class ArtifactIOError(QganLabError):
    """Reading or writing an experiment artifact failed."""

    exit_code = EXIT_IO
