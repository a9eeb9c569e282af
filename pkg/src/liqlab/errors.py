"""Exception types shared across the package."""


class LiqlabError(Exception):
    """Base class for package errors."""


class ConfigError(LiqlabError, ValueError):
    """Invalid parameter or configuration value. CLI exit code 2."""


class NoShortError(LiqlabError, ValueError):
    """Trade would make the share position negative."""


class InadmissibleTradeError(LiqlabError, ValueError):
    """Trade violates admissibility (e.g. purchase at zero lag)."""


class HullError(LiqlabError, ValueError):
    """Query point outside the grid hull."""


class NumericError(LiqlabError, RuntimeError):
    """Solver produced a non-finite value; message carries node coordinates."""


class InvariantViolation(LiqlabError, AssertionError):
    """A model invariant failed at runtime. CLI exit code 3."""
