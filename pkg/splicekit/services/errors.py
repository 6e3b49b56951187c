class SplicekitError(Exception):
    """Base class for every error raised by splicekit."""


class InputError(SplicekitError, ValueError):
    """The caller handed in something the engine cannot work with."""


class PlumbingFormatError(InputError):
    """A plumbing file could not be parsed."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NormalFormError(InputError):
    pass


class SpliceValidationError(InputError):
    pass


class SingularMatrixError(InputError):
    """Raised where a nonsingular matrix (det != 0) is required."""


class AtomicDiagramError(InputError):
    """Raised when a node-less (lens space) diagram reaches a node-only computation."""


class ConsistencyError(SplicekitError):
    """Two independent routes disagreed, or a division that must be exact was not."""


class ContinuedFractionError(SplicekitError, ZeroDivisionError):
    pass
