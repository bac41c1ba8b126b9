"""Exception types shared across the package."""


class SpaceRankError(Exception):
    """Base class for all package-specific errors."""


class ParseError(SpaceRankError):
    """A data file line could not be parsed. Carries the 1-based line number."""

    def __init__(self, path, line_no: int, message: str):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


class ValidationError(SpaceRankError):
    """Input data violates a corpus invariant (e.g. duplicate user/item pair)."""


class NoSuchUserError(SpaceRankError, LookupError):
    """The requested user does not appear in the supplied events."""


class NoSuchTokenError(SpaceRankError, LookupError):
    """The requested token is not in the vocabulary."""


class CannotRankError(SpaceRankError):
    """The user has no usable ratings, so no ranking can be learned."""


class FormatError(SpaceRankError):
    """A model or results file does not match its declared format."""


class UndefinedTestError(SpaceRankError):
    """The paired significance test is undefined (zero discordant pairs)."""
