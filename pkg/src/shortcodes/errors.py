"""Exception types raised across the package."""


class ShortcodesError(Exception):
    """Base class for all package errors."""


class RankDeficient(ShortcodesError):
    pass


class DimensionMismatch(ShortcodesError, ValueError):
    pass


class UnsupportedParams(ShortcodesError, ValueError):
    pass


class OddLength(ShortcodesError, ValueError):
    pass


class ConfigInvalid(ShortcodesError, ValueError):
    pass


class BracketFailure(ShortcodesError):
    """The target BLER is not crossed inside the SNR search interval."""
