"""Exception hierarchy shared by all modules."""


class CPShiftError(Exception):
    """Base class for every error raised by the package."""


class InvalidWordError(CPShiftError, ValueError):
    pass


class AlignmentError(CPShiftError, ValueError):
    """An interval or homothety does not fit the measure's p-adic grid."""


class WindowExhausted(CPShiftError):
    """The answer depends on mass outside the measure's known window."""


class ResolutionExhausted(CPShiftError):
    """The measure is not stored finely enough for the requested operation."""


class DepthExhausted(CPShiftError):
    """The stored past of a state is too short."""


class UndefinedPsi(CPShiftError, ValueError):
    """psi is undefined on the zero measure."""


class CannotAdvance(CPShiftError):
    pass


class ConsistencyError(CPShiftError):
    """Two independent computations of the same exact quantity disagree."""


class BudgetExceeded(CPShiftError):
    """Automatic past extension ran out of retries."""


class CombinatorialBudgetError(CPShiftError):
    pass


class ConfigError(CPShiftError, ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key
