"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of a function."""


class ConfigurationError(ValueError):
    """Numerical settings (quadrature order, grid resolution, cost guard) are invalid."""


class AdmissibilityError(DomainError):
    """The smoothing width / smoothness pair violates the admissibility window."""


class ConfigFileError(ValueError):
    """A key=value experiment configuration file is malformed."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class TruncationWarning(UserWarning):
    """A harmonic sum was truncated below the degree its support requires."""
