"""Exception hierarchy.

Every error that concerns a specific vertex or field carries its name in
the message, so callers (and the CLI) can point at the offending spot.
"""


class RelinoptError(Exception):
    """Base class for all package errors."""


class CircuitError(RelinoptError):
    """A circuit description is malformed."""


class DuplicateIdError(CircuitError):
    """Two vertices share the same id."""


class UnknownParentError(CircuitError):
    """A vertex references a parent id that does not exist."""


class CycleError(CircuitError):
    """The parent relation is not acyclic."""


class DegreeError(CircuitError):
    """A vertex violates the in/out-degree rules of its kind."""


class FormatError(CircuitError):
    """A serialized file does not match the documented format."""


class PlanError(RelinoptError):
    """A relinearization plan cannot be applied to a circuit."""


class InvalidPlanError(PlanError):
    """A plan entry is malformed (unknown vertex, negative amount, or a
    nonzero amount on a vertex that cannot be relinearized)."""


class InfeasibleRelinError(PlanError):
    """A plan reduces some product length below the minimum."""

    def __init__(self, vertex: str, message: str | None = None):
        self.vertex = vertex
        super().__init__(message or f"relinearization at '{vertex}' drops its length below the minimum")


class LengthOverflowError(PlanError):
    """Length propagation exceeded the supported magnitude bound."""

    def __init__(self, vertex: str):
        self.vertex = vertex
        super().__init__(f"length at '{vertex}' exceeds the supported bound")


class SolverError(RelinoptError):
    """A solver cannot run on the given instance."""


class SearchSpaceTooLargeError(SolverError):
    """Exhaustive enumeration would exceed the configured capacity."""


class NotSingleOutputError(SolverError):
    """The DP solver requires every non-input vertex to feed at most one
    consumer."""


class MarkNotRelinearizableError(SolverError):
    """A marked vertex is not a Mul or Square."""


class GadgetError(RelinoptError):
    """A gadget construction or combination is impossible."""


class MultipleSinksError(GadgetError):
    """An operation expected a single-sink circuit."""


class ArityMismatchError(GadgetError):
    """Sink/input counts do not line up for concatenation."""


class UnknownVertexError(GadgetError):
    """A referenced vertex id is not in the circuit."""


class NotIsomorphicError(GadgetError):
    """Ancestor closures do not match under the requested pairing."""


class LengthOutOfRangeError(GadgetError):
    """A decoded mark length is outside the two admissible values."""


class TooManyItemsError(SolverError):
    """Exhaustive knapsack enumeration is capped at 20 items."""
