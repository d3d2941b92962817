"""Exception types shared across the package."""


class SpinMechError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(SpinMechError):
    """Operator or state dimensions are inconsistent or out of range."""


class SignatureMismatchError(SpinMechError):
    """Two objects live on different tensor-product spaces."""


class InstabilityError(SpinMechError):
    """Pump amplitude at or beyond the parametric instability threshold (|pump| >= detuning)."""


class DegenerateInputError(SpinMechError):
    """Inputs leave a derived quantity undefined (e.g. zero drive and zero detuning)."""


class TruncationError(SpinMechError):
    """Fock-space truncation too small for the requested object or run."""


class RunFailedError(SpinMechError):
    """An integration run violated its conservation tolerances."""


class NoSqueezedFixedPointError(SpinMechError):
    """Engineered-reservoir drive ratio admits no squeezed fixed point (D+ >= D-)."""


class UnsupportedConfigurationError(SpinMechError):
    """Model configuration outside what an operation supports."""


class UndefinedDirectionError(SpinMechError):
    """Mean collective spin too small to define a squeezing direction."""


class ConfigError(SpinMechError):
    """Bad scenario id, override key, or configuration file."""
