"""Exception types shared across the toolchain."""


class MvlError(Exception):
    """Base class for all errors raised by this package."""


class MvlSyntaxError(MvlError):
    """Raised when source text cannot be tokenized or parsed.

    Carries the 1-based line/column of the offending token so callers
    can point users at the exact location.
    """

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = "line %d, col %d: %s" % (line, col if col is not None else 0, message)
        super().__init__(message)


class MvlTypeError(MvlError):
    """Raised when an expression or statement is ill-typed."""


class ShapeError(MvlError):
    """Raised when a test method does not follow the required shape
    (literal setup, a single call, trailing asserts)."""


class UnsupportedConstruct(MvlError):
    """Raised when a program uses a feature outside the supported subset."""


class PathLimitError(MvlError):
    """Raised when control-flow path enumeration exceeds the configured cap."""


class DivisionByZeroError(MvlError):
    """Raised when concrete evaluation divides or takes a modulus by zero."""


class UnboundVariableError(MvlError):
    """Raised when evaluation encounters a variable with no binding."""


class BackendUnavailableError(MvlError):
    """Raised when an external solver process cannot be started."""


class MalformedModelError(MvlError):
    """Raised when an external solver returns a model we cannot parse."""


class PluginFailureError(MvlError):
    """Raised when an external synthesizer process fails or emits garbage."""


class NoPatchesError(MvlError):
    """Raised when a synthesizer reply contains no modification blocks."""


class OriginalNotFoundError(MvlError):
    """Raised when a patch hunk's original text does not occur in the file."""


class AmbiguousOriginalError(MvlError):
    """Raised when a patch hunk's original text occurs more than once."""


class ReparseFailureError(MvlError):
    """Raised when a patched source no longer parses."""


class InsufficientDistinctMutationsError(MvlError):
    """Raised when an oracle admits no valid mutation at all."""
