"""Exception hierarchy.

Two families matter to callers (and to the CLI exit codes): ``ValidationError``
for bad inputs or parameters, and ``NumericalError`` for computations that
cannot be carried out at double precision.
"""


class GraphDistError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(GraphDistError, ValueError):
    pass


class NumericalError(GraphDistError, ArithmeticError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NonPositiveWeight(ValidationError):
    pass


class DuplicateEdge(ValidationError):
    pass


class SelfLoop(ValidationError):
    pass


class IsolatedNode(ValidationError):
    pass


class Disconnected(ValidationError):
    pass


class ParamOutOfRange(ValidationError):
    pass


class GraphTooLarge(ValidationError):
    pass


class EnsembleTooLarge(ValidationError):
    pass


class DegenerateEnsemble(ValidationError):
    pass


class BetaTooLarge(NumericalError):
    pass


class SingularSystem(NumericalError):
    pass


class UnderflowZ(NumericalError):
    pass


class SolverNotConverged(NumericalError):
    def __init__(self, message, grad_norm=None):
        self.grad_norm = grad_norm
        super().__init__(message)


class DegenerateSigma(NumericalError):
    pass


class EmptyClusterUnrecoverable(NumericalError):
    pass


class CouldNotConnect(NumericalError):
    pass
