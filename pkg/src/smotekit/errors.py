"""Exception types shared across the package."""


class SmoteKitError(Exception):
    """Base class for package errors."""


class ConfigError(SmoteKitError):
    """Invalid configuration: bad flag values, empty family lists, unknown kinds."""


class DataError(SmoteKitError):
    """Invalid input data: malformed CSV, schema mismatches, bad external scores."""
