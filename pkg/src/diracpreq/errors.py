"""Exception hierarchy shared by every module."""


class EngineError(Exception):
    """Base class for all errors raised by the engine."""

    def __init__(self, message="", **data):
        super().__init__(message)
        self.data = data


class DivisionByZero(EngineError, ZeroDivisionError):
    pass


class UnknownCoordinate(EngineError):
    pass


class SubstitutionIntoExpUnitBase(EngineError):
    pass


class ChartMismatch(EngineError):
    pass


class DegreeOverflow(EngineError):
    pass


class NotInverse(EngineError):
    pass


class DenominatorNotCertified(EngineError):
    pass


class KindMismatch(EngineError):
    pass


class MinusPairingUndefinedForE1(EngineError):
    pass


class ValidationError(EngineError):
    pass


class NotIsotropic(ValidationError):
    pass


class RankNotCertified(ValidationError):
    pass


class NotSmooth(ValidationError):
    pass


class NoSolutionOverFractionField(EngineError):
    pass


class NotAdmissible(EngineError):
    pass


class NotBasic(EngineError):
    pass


class RegraphNotInvertible(EngineError):
    pass


class NotContact(EngineError):
    pass


class BracketNotInSpan(EngineError):
    pass


class OmegaNotClosed(EngineError):
    pass


class SolverNeedsExplicitPair(EngineError):
    pass


class XiANotSolvable(EngineError):
    pass


class SuppliedDataInvalid(EngineError):
    pass


class NotInDomain(EngineError):
    pass


class PointOutsideDomain(EngineError):
    pass


class NonPolynomialAtPoint(EngineError):
    pass


class FractionalPowerResidue(EngineError):
    pass


class ParseError(EngineError):
    def __init__(self, message="", location=None, **data):
        if location is not None:
            message = f"{message} (at {location})"
        super().__init__(message, location=location, **data)
        self.location = location


class UnknownReference(EngineError):
    pass
