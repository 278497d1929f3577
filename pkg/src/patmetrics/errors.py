"""Exception hierarchy shared across the package.

Config problems and data problems are kept apart because the command line
maps them to different exit codes (2 and 3 respectively; plain I/O failures
exit 4).
"""


class PatmetricsError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(PatmetricsError):
    """A configuration file or option is missing, malformed, or inconsistent."""


class DataError(PatmetricsError):
    """Input data violates a contract (bad rows in strict mode, broken refs, ...)."""


class CpcParseError(DataError, ValueError):
    """A CPC symbol string does not have the expected shape."""


class DegenerateSampleError(DataError, ValueError):
    """A statistical routine received a sample it cannot test (e.g. all-zero diffs)."""


class InsufficientDataError(DataError, ValueError):
    """Too few observations for a fit or summary to be defined."""
