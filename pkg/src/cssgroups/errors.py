"""Exception types shared across the package."""


class PresentationError(ValueError):
    """A space, automaton, matrix or element document is malformed."""


class InsufficientDepth(ValueError):
    """An address is too shallow to lie inside a single region."""


class ConstructionError(RuntimeError):
    """A builder could not produce the requested element."""


class Unsupported(NotImplementedError):
    """The operation is not available for this similarity structure."""
