"""Exception types raised across the package."""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class EnumerationLimitError(ValueError):
    """Requested enumeration exceeds the hard size cap."""


class InadmissibleTermError(ValueError):
    """A product of brackets cannot be put in the normal form of the active ordering map."""


class ParseError(ValueError):
    """Text does not conform to the expression grammar."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset
