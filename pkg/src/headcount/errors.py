"""Exception types raised across the counting pipeline."""


class HeadcountError(Exception):
    """Base class for all package errors."""


class ParseError(HeadcountError):
    """Malformed image file (bad magic, header, or truncated pixel data)."""


class UnsupportedFormat(HeadcountError):
    """Recognized but unsupported image variant (e.g. maxval != 255)."""


class EmptySequence(HeadcountError):
    """A frame source yielded no frames."""


class TruncatedStream(HeadcountError):
    """Raw frame file size is not a multiple of the frame size."""


class ConfigError(HeadcountError):
    """Parameter outside its valid range, or inconsistent configuration."""


class ShapeError(HeadcountError):
    """Frame/mask geometry does not match the consuming stage."""


class NotFound(HeadcountError):
    """Requested component id does not exist."""


class DegenerateBlob(HeadcountError):
    """Blob too small or collinear for the requested shape metric."""


class OrderError(HeadcountError):
    """Frames fed to a stateful stage out of index order."""


class UndefinedAccuracy(HeadcountError):
    """Accuracy ratio undefined: true count is zero but counted > 0."""
