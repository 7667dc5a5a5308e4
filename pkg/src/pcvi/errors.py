"""Exception hierarchy shared across the package."""


class PCVIError(Exception):
    """Base class for all errors raised by pcvi."""


class UsageError(PCVIError, ValueError):
    """Bad arguments: shape/order mismatch, unknown names, invalid parameters."""


class CapabilityError(PCVIError):
    """A computation needs derivative information the inputs cannot supply."""


class SolverError(PCVIError, RuntimeError):
    """A nonlinear solve failed to converge or hit a singular Jacobian."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class OracleError(SolverError):
    """A reference computation (shooting, quadrature) failed to reach its target."""
