"""Exception types shared across the package."""


class PwfpError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(PwfpError, ValueError):
    """Malformed input file."""


class ValidationError(PwfpError, ValueError):
    """Input parsed fine but violates a data invariant."""


class ConfigError(PwfpError, ValueError):
    """Bad experiment configuration; ``key`` names the offending entry."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key
