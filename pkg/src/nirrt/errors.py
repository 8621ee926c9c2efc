"""Exception hierarchy shared by all planner modules."""


class PlanningError(Exception):
    """Base class for all errors raised by this package."""


class ContractViolationError(PlanningError):
    """An operation was called with arguments that violate its preconditions."""


class InfeasibleSpaceError(PlanningError):
    """Rejection sampling exhausted its budget without producing a valid state."""


class InfeasibleFocusError(InfeasibleSpaceError):
    """The informed subset contains no reachable free states (inconsistent best cost)."""


class DegenerateDomainError(PlanningError):
    """A sampling domain is too small to yield the requested number of points."""


class GenerationError(PlanningError):
    """A problem generator could not produce a feasible instance."""


class GuidanceUnavailableError(PlanningError):
    """The guidance provider failed; callers fall back to informed/uniform sampling."""
