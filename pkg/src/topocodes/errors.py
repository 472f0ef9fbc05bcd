"""Exception hierarchy. Everything raised on purpose derives from TopoError."""


class TopoError(Exception):
    pass


class InvalidMap(TopoError, ValueError):
    pass


class InvalidInvolution(InvalidMap):
    pass


class Disconnected(InvalidMap):
    pass


class LengthMismatch(TopoError, ValueError):
    pass


class Overflow(TopoError):
    """Coset table filled up before the enumeration closed."""


class DegenerateQuotient(TopoError):
    pass


class RelatorViolation(TopoError):
    pass


class ResourceExceeded(TopoError):
    pass


class MissingLabels(TopoError, ValueError):
    pass


class NotTrivalent(TopoError, ValueError):
    pass


class OddFace(TopoError, ValueError):
    pass


class NotACover(TopoError, ValueError):
    pass


class InvalidColoring(TopoError, ValueError):
    pass


class ValidationFailure(TopoError):
    """An identity that is a theorem failed to hold; always a bug."""


class InfeasibleSize(TopoError):
    pass


class NotInKernel(TopoError, ValueError):
    pass


class LemmaViolation(TopoError):
    pass


class InequalityViolation(TopoError):
    pass


class CatalogMiss(TopoError, KeyError):
    pass


class IoFailure(TopoError, OSError):
    pass
