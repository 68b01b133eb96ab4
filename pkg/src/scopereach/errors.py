"""Exception types shared across the package."""


class ScopeReachError(Exception):
    """Base class for all domain errors raised by this package."""


class UnknownVertex(ScopeReachError):
    pass


class DuplicateVertex(ScopeReachError):
    pass


class NotDependentSet(ScopeReachError):
    pass


class NotWeaklyDependent(ScopeReachError):
    pass


class BadFamilyParams(ScopeReachError):
    pass


class StepNotApplicable(ScopeReachError):
    pass


class UnknownState(ScopeReachError):
    pass


class GraphNotAntiClique(ScopeReachError):
    pass


class GraphNotSingleton(ScopeReachError):
    pass


class AlphabetMismatch(ScopeReachError):
    pass


class VerticesNotAdjacent(ScopeReachError):
    pass


class BadGadgetGraph(ScopeReachError):
    pass


class ResourceLimit(ScopeReachError):
    """A configured search budget was exhausted before an answer was found."""
