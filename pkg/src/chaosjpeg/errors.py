"""Exception hierarchy shared by every module of the package."""


class ChaosJpegError(Exception):
    """Base class for all errors raised by chaosjpeg."""


class InvalidKey(ChaosJpegError, ValueError):
    """A key or chaotic-map parameter is outside its valid range."""


class DegenerateOrbit(ChaosJpegError, ValueError):
    """The logistic orbit collapsed onto the fixed points 0 or 1."""


class DivergentOrbit(ChaosJpegError, ValueError):
    """The Henon orbit escaped to infinity."""


class InsufficientSequence(ChaosJpegError, ValueError):
    """Fewer chaotic values remain than an operation needs."""


class QualityOutOfRange(ChaosJpegError, ValueError):
    pass


class MalformedBitstream(ChaosJpegError, ValueError):
    """The JPEG byte stream could not be parsed.

    ``offset`` is the byte position where parsing failed, or ``None`` when
    the failure is not tied to one position.
    """

    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)


class GridMismatch(ChaosJpegError, ValueError):
    pass


class EcuExhausted(ChaosJpegError, IndexError):
    pass


class AlphaOutOfRange(ChaosJpegError, ValueError):
    pass


class ImageTooLarge(ChaosJpegError, ValueError):
    """The image is at or beyond the platform's no-resize size limit."""


class Unsupported(ChaosJpegError, ValueError):
    pass


class DimensionMismatch(ChaosJpegError, ValueError):
    pass

