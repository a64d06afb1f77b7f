"""Exception types shared across the package."""


class CubintError(Exception):
    """Base class for all package errors."""


class SingularPointError(CubintError):
    """Evaluation requested on or too close to a declared singularity."""


class DerivativeUnavailableError(CubintError):
    """A potential cannot supply derivatives of the requested order."""


class GridSingularityError(CubintError):
    """A verification grid node violates the singular-line margin."""


class PoleCollisionError(CubintError):
    """Numerical integration blew up inside the requested interval."""

    def __init__(self, message, pole=None):
        super().__init__(message)
        self.pole = pole


class ImmediatePoleError(CubintError):
    """Initial data forces blow-up before a single step can be taken."""


class ZeroCrossingError(CubintError):
    """A trajectory hit a value where the defining ODE is singular."""


class OutOfIntervalError(CubintError):
    """Evaluation outside a solution's validity interval."""


class SchemaViolationError(CubintError):
    """Parameters do not satisfy a catalog entry's schema."""


class UnknownEntryError(CubintError):
    """No catalog entry with the requested id."""


class NoLimitDeclaredError(CubintError):
    """The entry declares no classical limit link."""


class BranchTurningError(CubintError):
    """Implicit-root continuation reached a turning point."""


class SeedInvalidError(CubintError):
    """A continuation seed does not satisfy its generating relation."""


class ConfigMismatchError(CubintError):
    """Coefficient configuration incompatible with the requested family."""


class QuadratureDomainError(CubintError):
    """A quadrature path crosses a declared singularity."""


class StepFailureError(CubintError):
    """The ODE solver failed to complete the requested integration."""
