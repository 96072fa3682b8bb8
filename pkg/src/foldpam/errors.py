"""Exception hierarchy shared by every foldpam module."""


class FoldpamError(Exception):
    """Base class for model, data and simulation failures."""


class DomainError(FoldpamError, ValueError):
    """An argument lies outside the domain of an operation."""


class SingularityError(DomainError):
    """The requested value diverges."""


class OutOfRangeError(DomainError):
    """A strain, fold ratio or geometry lies beyond the modelled range."""


class RootFindingError(FoldpamError, ArithmeticError):
    """A bracketed root search could not be started or did not converge."""


class NoSolutionError(FoldpamError, ArithmeticError):
    """A constraint system has no admissible solution."""


class DataFormatError(FoldpamError, ValueError):
    """Malformed measurement input."""


class InfeasibleScenarioError(FoldpamError):
    """A simulation config asks for more than the plant can deliver."""
