"""Exception hierarchy.

Input/precondition failures derive from :class:`ValidationError`, numerical
failures (stalled iterations, quadrature that does not settle) from
:class:`NumericalError`. The command line maps them to exit codes 2 and 3.
"""


class CornerFieldsError(Exception):
    pass


class ValidationError(CornerFieldsError, ValueError):
    pass


class NumericalError(CornerFieldsError, ArithmeticError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class PoleAtVertex(ValidationError):
    pass


class RegionBoundaryHitsRoot(ValidationError):
    pass


class NoPositiveRoot(ValidationError):
    pass


class NotARoot(ValidationError):
    pass


class StepTooLarge(ValidationError):
    pass


class NotInL2(ValidationError):
    pass


class EpsOutsidePlateau(ValidationError):
    pass


class SupportTouchesBoundary(ValidationError):
    pass


class EmptyBall(ValidationError):
    pass


class NonConvergence(NumericalError):
    pass


class NonConvergent(NumericalError):
    """Quadrature did not settle within its refinement budget."""


class SolverStall(NumericalError):
    pass
