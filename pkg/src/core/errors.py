"""Exception hierarchy shared by the numerical core, the splitting code and the CLI."""


class IccError(Exception):
    """Base class for every error raised by this package."""


class NumericalError(IccError):
    """A computation could not be carried out (CLI exit code 1)."""


class ValidationError(IccError, ValueError):
    """Input or configuration was rejected before computing (CLI exit code 2)."""


class ShapeError(ValidationError):
    pass


class PreconditionError(ValidationError):
    pass


class StructureError(ValidationError):
    """Matrix is not constant along its diagonals."""


class SymmetryError(ValidationError):
    """Hermitian symmetry was requested but does not hold."""


class ConfigError(ValidationError):
    pass


class ComparisonError(ValidationError):
    """Two capacity runs cannot be compared (different dimensions or SNR)."""


class SingularMatrixError(NumericalError):
    pass


class DefinitenessError(NumericalError):
    """Cholesky met a non-positive pivot."""


class NotPsdError(NumericalError):
    pass


class PoleError(NumericalError):
    """A shifted eigenvalue ratio |a - x| / |a + x| has a vanishing denominator."""


def attach_context(err, **context):
    """
    Re-creates `err` with sweep/trial context appended to its message.

    The returned exception has the same type as `err` and carries every
    keyword as an attribute (e.g. `.alpha`, `.trial`), so callers can
    `raise attach_context(e, alpha=a) from e`.
    """
    detail = ", ".join(f"{k}={v}" for k, v in context.items())
    wrapped = type(err)(f"{err} [{detail}]")
    for key, value in context.items():
        setattr(wrapped, key, value)
    return wrapped
