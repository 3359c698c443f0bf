class TVGPError(Exception):
    """Base class for every error raised by tvgp_bandit."""


class ConfigError(TVGPError, ValueError):
    """Invalid parameter, configuration value or algorithm specification."""


class IdentifiabilityError(ConfigError):
    """Training data cannot identify the forgetting rate."""


class KernelIndexError(TVGPError, IndexError):
    """Index outside an empirical kernel's domain."""


class NumericalFailure(TVGPError, ArithmeticError):
    """A factorization failed even after the jitter ladder was exhausted."""


class DatasetError(TVGPError, ValueError):
    """Sensor CSV could not be turned into a dataset."""


class EmptyDatasetError(DatasetError):
    pass


class RaggedRowsError(DatasetError):
    pass


class UnparseableValueError(DatasetError):
    pass


class AcceptanceFailure(TVGPError):
    """A qualitative or inequality acceptance check did not hold."""
