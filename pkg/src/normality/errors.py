"""Exception types raised across the package."""


class NormalityError(Exception):
    """Base class for all errors raised by :mod:`normality`."""


class Exhausted(NormalityError):
    """A finite digit source ran out before the requested count."""

    def __init__(self, available: int, requested: int | None = None):
        self.available = available
        self.requested = requested
        msg = f"digit source exhausted after {available} digits"
        if requested is not None:
            msg += f" ({requested} requested)"
        super().__init__(msg)


class BadDigit(NormalityError, ValueError):
    def __init__(self, position: int, char: str, base: int):
        self.position = position
        self.char = char
        self.base = base
        super().__init__(f"invalid base-{base} digit {char!r} at payload position {position}")


class BaseMismatch(NormalityError, ValueError):
    def __init__(self, declared: int, requested: int):
        self.declared = declared
        self.requested = requested
        super().__init__(f"file declares base {declared}, but base {requested} was requested")


class TermCap(NormalityError, ValueError):
    """Martin's product cannot be evaluated exactly for this many factors."""


class DegenerateWindow(NormalityError, ValueError):
    """A frequency was requested over zero windows."""


class ZeroDelta(NormalityError):
    """The swap leaves the number unchanged, so the difference is identically zero."""


class EmptyScheme(NormalityError, ValueError):
    """A pseudonormality test was requested on a scheme without rows."""
