"""Base exceptions for the biscatter package."""


class WorkbenchException(Exception):
    """Base exception for every workbench error."""


class GridException(WorkbenchException):
    """Base exception for grid and field errors."""


class CodecException(WorkbenchException):
    """Base exception for binary layout errors."""


class PotentialException(WorkbenchException):
    """Base exception for potential profile errors."""


class EvolutionException(WorkbenchException):
    """Base exception for solver errors."""


class BlowupException(EvolutionException):
    """Raised when the blow-up guard trips during a run.

    Args:
        message (str): The diagnostic message
        t (float): The time at which the guard tripped
        step (int): The step index at which the guard tripped
        peak (float): The offending max|phi|
    """

    def __init__(self, message: str, t: float = float("nan"), step: int = -1, peak: float = float("nan")):
        super().__init__(message)
        self.t = t
        self.step = step
        self.peak = peak


class ResolutionException(WorkbenchException):
    """Raised when a grid cannot resolve the requested scales."""


class QuadratureException(WorkbenchException):
    """Raised when a time quadrature is too coarse."""


class FitException(WorkbenchException):
    """Base exception for rate-fit errors."""


class DegenerateSamplesException(FitException):
    """Raised when every sample of a rate fit is below the noise floor."""


class HierarchyConvergenceException(WorkbenchException):
    """Raised when a master norm series does not converge for the given Z."""


class HypothesisViolationException(WorkbenchException):
    """Raised when the hypotheses of a bound check are not met."""


class BoardGameRangeException(WorkbenchException):
    """Raised when (k, j) leaves the exhaustive enumeration range."""


class SequenceException(WorkbenchException):
    """Raised for malformed board-game maps or sequences."""


class ConfigException(WorkbenchException):
    """Raised when a run configuration fails validation.

    Args:
        errors (list[tuple[str, str]]): Every (path, message) problem found
    """

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = list(errors)
        super().__init__("; ".join(f"{path}: {message}" for path, message in self.errors))


class CheckFailure(WorkbenchException):
    """Raised when a scientific acceptance check does not pass."""
