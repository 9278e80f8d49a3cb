"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument violates a documented precondition."""


class AliasingError(ParameterError):
    """Angular resolution too low for the requested mode content."""


class SupportError(ParameterError):
    """A field's support reaches the inner grid boundary where weighted
    integrals cannot be trusted."""


class SingularSystemError(RuntimeError):
    """The pointwise pressure system is (numerically) singular, which signals
    a boundary trace violating J g . g' = 1."""


class CompatibilityError(RuntimeError):
    """A sampled pressure gradient is not the gradient of a single-valued
    function."""


class ModeError(ParameterError):
    """The single-variable certificate mode was requested for a pressure that
    depends on both R and theta."""


class AdmissibilityError(ValueError):
    """A competitor map fails the area-preservation or boundary-trace check."""


class InternalConsistencyError(RuntimeError):
    """Two routes to the same quantity disagree beyond tolerance."""
