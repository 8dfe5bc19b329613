"""Exception hierarchy shared by every module of the package."""


class UtilRiskError(Exception):
    """Base class for domain errors (mapped to exit code 3 by the CLI)."""


class LengthMismatch(UtilRiskError, ValueError):
    pass


class DomainError(UtilRiskError, ValueError):
    pass


class PreconditionError(UtilRiskError, ValueError):
    pass


class ProbabilityError(UtilRiskError, ValueError):
    pass


class ArbitrageError(UtilRiskError, ValueError):
    pass


class RedundancyError(UtilRiskError, ValueError):
    pass


class GenerationError(UtilRiskError, RuntimeError):
    pass


class NoRoot(UtilRiskError, ArithmeticError):
    pass


class UnboundedBelow(UtilRiskError, ArithmeticError):
    pass


class BudgetError(UtilRiskError, ValueError):
    pass


class InfeasibleError(UtilRiskError, RuntimeError):
    pass


class DimensionError(UtilRiskError, ValueError):
    pass
