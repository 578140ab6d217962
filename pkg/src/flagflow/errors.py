"""Exception hierarchy.

Parameter problems derive from `ValueError`; numerical failures from
`NumericalError` so the CLI can map them to distinct exit codes.
"""


class FlagFlowError(Exception):
    pass


class ParameterError(FlagFlowError, ValueError):
    pass


class DomainError(FlagFlowError, ValueError):
    """Point outside the domain where a formula is defined."""


class HemisphereError(DomainError):
    pass


class ChartDomainError(DomainError):
    pass


class NumericalError(FlagFlowError, ArithmeticError):
    pass


class RootFindingError(NumericalError):
    pass


class NotAnEquilibriumError(NumericalError):
    pass


class ConsistencyError(NumericalError):
    pass


class StepUnderflowError(NumericalError):
    pass


class EmptyTrajectoryError(FlagFlowError, ValueError):
    pass
