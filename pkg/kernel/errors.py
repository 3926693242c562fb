class DimensionMismatch(ValueError):
    """Operands live on spaces of different dimension (or different variable counts)."""


class VariableOutOfRange(ValueError):
    pass


class DegreeError(ValueError):
    """An object has a degree outside the range an operation accepts."""


class ChartError(ValueError):
    """A chart violates its round-trip or centring invariants, or lacks a required direction."""


class VanishingError(ValueError):
    """A coefficient required to be nonzero vanishes at the evaluation point."""


class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class CorpusExhausted(ValueError):
    """The random family kept producing uncertified samples."""
