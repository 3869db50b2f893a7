"""Exception hierarchy shared across the codecs."""


class CodecError(ValueError):
    """Base class for every codec-level failure."""


class BlockLengthError(CodecError):
    pass


# codebook


class CodebookError(CodecError):
    """A codebook failed to parse or violates an invariant."""


class CodebookParseError(CodebookError):
    pass


class DuplicateCodewordError(CodebookError):
    pass


class DuplicateAbbreviationError(CodebookError):
    pass


class PrefixViolationError(CodebookError):
    pass


class KraftSumError(CodebookError):
    pass


class ProbabilitySumError(CodebookError):
    pass


class UnknownMessageError(CodecError):
    pass


class UnknownAbbreviationError(CodecError):
    def __init__(self, chars: str):
        super().__init__(f"unknown abbreviation {chars!r}")
        self.chars = chars


class UndecodableError(CodecError):
    pass


# source coders


class AlphabetError(CodecError):
    def __init__(self, symbol: str):
        super().__init__(f"symbol {symbol!r} is outside the alphabet a-z plus space")
        self.symbol = symbol


class DanglingSuffixError(CodecError):
    pass


class TruncatedTagError(CodecError):
    pass


class MessageTooLongError(CodecError):
    pass


class InvalidCodeError(CodecError):
    pass


class CodeWidthError(CodecError):
    pass


# channel codes


class ConstructionError(CodecError):
    """Random code construction exhausted its retry budget."""
