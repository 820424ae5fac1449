"""Exception hierarchy shared by the library and the command line front end."""


class NLSpecError(Exception):
    """Base class for all errors raised by nlspec."""


class InvalidMetric(NLSpecError, ValueError):
    """Metric data is not symmetric positive definite or has the wrong shape."""


class ChartError(NLSpecError):
    """A metric field could not be evaluated at a requested point."""


class PoleProximity(NLSpecError, ValueError):
    """The spectral parameter sits on (or too close to) a ray of the principal symbol."""


class InvalidParameters(NLSpecError, ValueError):
    """Lame parameters violate mu > 0 or mu + lambda >= 0."""


class RootBracketFailure(NLSpecError):
    """A sign-change scan could not isolate a determinant root."""


class DiscretizationTooCoarse(NLSpecError, ValueError):
    pass


class EigensolverFailure(NLSpecError):
    pass


class MalformedFile(NLSpecError, ValueError):
    """A spectrum file could not be parsed.

    The offending line number (1-based) is kept on ``lineno`` when known.
    """

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class SortedViolation(MalformedFile):
    """Eigenvalues in a spectrum file are not in ascending order."""


class TruncationDominated(NLSpecError):
    """The omitted part of the spectrum is too large relative to the heat trace."""


class IllConditionedFit(NLSpecError):
    """The least-squares design matrix is numerically rank deficient."""


class ConfigError(NLSpecError, ValueError):
    pass
