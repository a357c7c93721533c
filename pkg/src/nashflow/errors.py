"""Exception hierarchy.

``EngineBug`` subclasses signal states that a correct engine never reaches;
the CLI maps them to exit code 3.
"""


class NashFlowError(Exception):
    pass


class ParseError(NashFlowError):
    pass


class NetworkInvalid(NashFlowError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class CycleFound(NashFlowError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__(f"cycle through {len(self.cycle)} arcs")


class PreconditionNotMet(NashFlowError):
    pass


class DemandExceedsSupply(NashFlowError):
    pass


class EngineBug(NashFlowError):
    """Raised when an internal invariant fails; the payload helps reproduce it."""

    def __init__(self, message, payload=None):
        self.payload = payload
        super().__init__(message)


class NoSolutionFound(EngineBug):
    pass


class DegenerateLabels(EngineBug):
    pass


class NonpositiveAlpha(EngineBug):
    pass


class InconsistentPhases(EngineBug):
    pass


class ClassificationMismatch(EngineBug):
    pass


class UnboundedWait(EngineBug):
    pass
