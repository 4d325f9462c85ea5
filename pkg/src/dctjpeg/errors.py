"""Exception types shared by the parsers and the codec."""


class CodecError(ValueError):
    """Base error. ``offset`` is the byte position in the input, when known."""

    def __init__(self, message: str, offset: int | None = None):
        self.message = message
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)


class PnmError(CodecError):
    pass


class JpegError(CodecError):
    pass
