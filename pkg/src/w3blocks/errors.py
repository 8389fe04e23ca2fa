"""Exception types raised across the package."""


class W3Error(Exception):
    """Base class for all package errors."""


class NotDivisibleByThree(W3Error, ValueError):
    pass


class ShapeContentMismatch(W3Error, ValueError):
    pass


class NotTableau(W3Error, ValueError):
    pass


class RepeatedIndex(W3Error, ValueError):
    pass


class DegreeMismatch(W3Error, ValueError):
    pass


class ZeroBeta(W3Error, ValueError):
    pass


class NotRowStrict(W3Error, ValueError):
    pass


class IndexOutOfRange(W3Error, IndexError):
    pass


class DegenerateMobius(W3Error, ValueError):
    pass


class ColumnCountMismatch(W3Error, ValueError):
    pass


class BoundaryMismatch(W3Error, ValueError):
    pass


class NonPlanar(W3Error, ValueError):
    pass


class HarvestIncomplete(W3Error, RuntimeError):
    pass


class ContentMismatch(W3Error, ValueError):
    pass


class SingularM(W3Error, ArithmeticError):
    pass


class AnchorsOutOfRange(W3Error, ValueError):
    pass


class ParityInfeasible(W3Error, ValueError):
    pass


class TooLarge(W3Error, ValueError):
    pass


class ZeroPartition(W3Error, ZeroDivisionError):
    pass


class CollidingPoints(W3Error, ValueError):
    pass


class NonSquareIndexSet(W3Error, ValueError):
    pass
