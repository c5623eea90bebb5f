"""Exception hierarchy shared by all fiberatlas modules.

ValidationError covers bad or out-of-contract input (CLI exit code 2),
NumericalError covers failures of a numerical procedure on otherwise
valid input (CLI exit code 3).
"""


class FiberAtlasError(Exception):
    pass


class ValidationError(FiberAtlasError):
    pass


class ParseError(ValidationError):
    pass


class GenericityError(ValidationError):
    """Input violates a genericity assumption of an exact geometric predicate."""


class NeedsExtensionError(ValidationError):
    """A non-embedded polygon chain was used without an extension certificate."""


class SizeLimitError(ValidationError):
    """Input exceeds a documented profile limit (degree, corner count, ...)."""


class NumericalError(FiberAtlasError):
    pass


class NonIsolatedCriticalError(NumericalError):
    """The critical locus is not a finite set of points."""


class ContinuationError(NumericalError):
    """Root tracking failed to certify a step even after maximal refinement."""
