"""Shared exception types.

The CLI maps these onto exit codes: plain ``ValueError`` subclasses are
user-input problems (exit 1), guard and iteration-cap errors are internal
limits (exit 2).
"""


class DimensionMismatchError(ValueError):
    """Vector or matrix dimensions do not agree."""


class GuardExceededError(RuntimeError):
    """A configured size, depth, or memory guard was exceeded."""


class SupportConditionError(ValueError):
    """A PMF puts mass on a symbol that the reference PMF excludes."""


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap before reaching tolerance.

    The best iterate so far is attached as ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DegenerateTreeError(ValueError):
    """Single-leaf code trees emit symbols without consuming bits."""


class SpecFileError(ValueError):
    """A channel spec file failed validation; the message names the field."""
