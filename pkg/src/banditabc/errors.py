"""Exception types shared across the package.

Everything raised on purpose derives from BanditAbcError so callers can
catch library failures without also swallowing programming mistakes.
"""


class BanditAbcError(Exception):
    """Base class for all errors raised by this package."""


class ModelDefinitionError(BanditAbcError):
    """A reaction network is inconsistent or produced a non-finite propensity."""


class ConfigError(BanditAbcError):
    """A configuration value is out of range or internally inconsistent."""


class ContractViolationError(BanditAbcError):
    """An input broke a documented precondition (e.g. a reward outside [-1, 0])."""


class SelectionError(BanditAbcError):
    """Arm selection required reward data that does not exist yet."""


class StateError(BanditAbcError):
    """An operation ran against uninitialised state (e.g. uncalibrated normalization)."""


class EstimationError(BanditAbcError):
    """A posterior estimate was requested from a run with no accepted samples."""
