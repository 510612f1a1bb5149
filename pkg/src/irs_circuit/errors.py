"""Exception hierarchy shared by every module of the package."""


class IRSError(Exception):
    """Base class for all errors raised by irs_circuit."""


class InvalidParameter(IRSError, ValueError):
    """A value violates the invariant of the type it was given to."""


class DegenerateCircuit(IRSError):
    """The ideal lossless model hits a pole (infinite impedance)."""


class UndefinedPhase(IRSError):
    """The reflection coefficient is zero, so its phase is meaningless."""


class InfeasibleTarget(IRSError):
    """No positive real capacitance realizes the requested reflection."""


class NoRootInRange(IRSError):
    """Valid capacitances exist, but none falls inside the required window."""

    def __init__(self, message: str, candidates=()):
        super().__init__(message)
        self.candidates = list(candidates)


class AllCapacitancesValid(IRSError):
    """The inversion quadratic vanishes identically; every capacitance works."""


class PlateauDetected(IRSError):
    """The swept output is flat, so no extremum can be located."""


class InvalidCount(IRSError, ValueError):
    """A sample or grid count is outside its allowed range."""
