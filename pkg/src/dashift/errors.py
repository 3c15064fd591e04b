"""Exception hierarchy shared by every analysis module."""


class DAShiftError(Exception):
    """Base class for all errors raised by dashift."""


class ValidationError(DAShiftError):
    """Invalid input data (environments, representations, scenario files)."""


class NegativeMass(ValidationError):
    pass


class MassSumOutOfTolerance(ValidationError):
    pass


class DuplicateAtom(ValidationError):
    pass


class UnmappedAtom(ValidationError):
    pass


class InvalidDistribution(ValidationError):
    pass


class PredictorUndefinedAtom(DAShiftError):
    pass


class LossUnsupported(DAShiftError):
    pass


class InfiniteMismatch(DAShiftError):
    """One side of a certified equality is finite and the other infinite."""


class IndeterminateInfinity(DAShiftError):
    """An expression reduced to inf - inf."""


class NotECI(DAShiftError):
    pass


class NoECIRep(DAShiftError):
    pass


class ClassTooLarge(DAShiftError):
    pass


class AssumptionA2Unsatisfied(DAShiftError):
    pass


class SupportViolation(DAShiftError):
    pass


class UnknownScenario(DAShiftError):
    pass


class ParamOutOfRange(DAShiftError):
    pass


class SchemaError(ValidationError):
    pass


class UnknownReference(DAShiftError):
    """A name (environment, representation, class) not present in the scenario."""
