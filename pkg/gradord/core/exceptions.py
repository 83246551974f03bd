"""
Error hierarchy for gradord.

Everything derives from ``GradordError`` which is a ``ValueError`` so that
errors raised inside pydantic validators are reported as validation errors.
The command line maps ``DomainError`` to exit status 1 and ``InputError`` to 2.
"""


class GradordError(ValueError):
    """Base class for all gradord errors."""


class ConfigError(GradordError):
    """Invalid environment configuration."""


# ============================================================================
# Domain errors (exit status 1)
# ============================================================================

class DomainError(GradordError):
    """A well-formed input that the requested operation cannot handle."""


class BackendMismatchError(DomainError):
    pass


class ShapeMismatchError(DomainError):
    pass


class NonInvertibleIdealError(DomainError):
    def __init__(self, message: str, position=None):
        super().__init__(message)
        self.position = position


class StandardFormError(DomainError):
    pass


class LatticeError(DomainError):
    pass


class HullError(DomainError):
    pass


class EpacError(DomainError):
    pass


class GroupDataError(DomainError):
    pass


class AutomorphismError(DomainError):
    pass


class OracleError(DomainError):
    pass


class PrecisionExhaustedError(OracleError):
    pass


class ProfileError(DomainError):
    pass


class FieldSpecError(DomainError):
    pass


class TowerError(DomainError):
    pass


# ============================================================================
# Input errors (exit status 2)
# ============================================================================

class InputError(GradordError):
    """Unreadable or unparsable input."""


class IdealParseError(InputError):
    pass


class CyclotomicParseError(InputError):
    pass
