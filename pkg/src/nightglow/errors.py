"""Exception types shared across the toolkit."""


class NightglowError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(NightglowError):
    """A parameter is outside its valid domain.

    Carries the offending field name so command-line tooling can report
    exactly which input was bad.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ImageFormatError(NightglowError):
    """An image file could not be decoded or encoded."""


class SizeMismatchError(NightglowError):
    """Two buffers that must share dimensions do not."""
