"""Exception hierarchy shared by all modules."""


class NcsAbstractError(Exception):
    """Base class for all errors raised by this package."""


class UnknownIdentifierError(NcsAbstractError, KeyError):
    """A state or input identifier is not part of the system it was used with."""


class RangeError(NcsAbstractError, ValueError):
    """An integer argument (delay, index, bound) is outside its admissible range."""


class LabelTypeError(NcsAbstractError, TypeError):
    """Output labels are structurally incompatible with each other or with a metric."""


class ConstructionError(NcsAbstractError, ValueError):
    """A model cannot be built from the given ingredients."""


class StructuralError(NcsAbstractError, ValueError):
    """Two objects that must share structure (bounds, buffer shapes) do not."""


class ParseError(NcsAbstractError, ValueError):
    """A file or serialized object cannot be decoded."""


class DivergenceError(NcsAbstractError, ArithmeticError):
    """Numerical integration produced non-finite values."""
