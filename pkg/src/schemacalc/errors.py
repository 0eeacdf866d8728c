"""Exception hierarchy shared by all layers."""


class SchemaCalcError(Exception):
    """Base class for every domain failure raised by the package."""


class MalformedType(SchemaCalcError):
    pass


class NotDecomposable(SchemaCalcError):
    pass


class NotPredictive(SchemaCalcError):
    pass


class ShapeMismatch(SchemaCalcError):
    pass


class NonStochasticRow(SchemaCalcError):
    pass


class DomainMismatch(SchemaCalcError):
    pass


class UnknownPoint(SchemaCalcError):
    pass


class UnsupportedLanguage(SchemaCalcError):
    pass


class UnboundAtomic(SchemaCalcError):
    pass


class TypeMismatch(SchemaCalcError):
    pass


class UnresolvedTarget(SchemaCalcError):
    pass


class OverlappingParTargets(SchemaCalcError):
    pass


class MaxIterExceeded(SchemaCalcError):
    """Only raised on request; the engine normally reports it as a flag."""


class UnknownSchema(SchemaCalcError):
    pass


class InconsistentInstance(SchemaCalcError):
    pass


class NonNumericAggregate(SchemaCalcError):
    pass


class OverlapConflict(SchemaCalcError):
    pass


class SignatureViolation(SchemaCalcError):
    pass


class UnknownVariable(SchemaCalcError):
    pass


class UnknownValue(SchemaCalcError):
    pass


class CycleCreated(SchemaCalcError):
    pass


class EdgeAbsent(SchemaCalcError):
    pass


class EdgePresent(SchemaCalcError):
    pass


class EmptyDataset(SchemaCalcError):
    pass
