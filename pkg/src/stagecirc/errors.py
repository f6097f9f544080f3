"""Exception hierarchy shared by all modules."""


class CircuitError(Exception):
    """Base class for every error raised by stagecirc."""


# indexcore
class DomainMismatch(CircuitError, ValueError):
    pass


class NotInjective(CircuitError, ValueError):
    pass


class LabelCollision(CircuitError, ValueError):
    pass


class UnknownTarget(CircuitError, LookupError):
    pass


class DimensionMismatch(CircuitError, ValueError):
    pass


class OutputLabelCollision(CircuitError, ValueError):
    pass


class TooManyQubits(CircuitError, ValueError):
    pass


# circuit
class InvalidCircuit(CircuitError, ValueError):
    """Raised when an operation needs a circuit that passes a checker.

    The failing report is kept on ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class MixedCircuit(InvalidCircuit):
    pass


class UnknownGate(CircuitError, LookupError):
    pass


class TooManyInputs(CircuitError, ValueError):
    pass


# stages
class NotAStage(CircuitError, ValueError):
    pass


class NotReady(CircuitError, ValueError):
    pass


class NotAPermutation(CircuitError, ValueError):
    pass


class EnumerationOverflow(CircuitError, RuntimeError):
    pass


# quantumsim
class IncoherentSchedule(CircuitError, ValueError):
    pass
