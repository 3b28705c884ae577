"""Exception hierarchy shared by all modules."""


class CausalFracError(Exception):
    """Base class for errors raised by causalfrac."""


class CycleError(CausalFracError):
    """The transitive closure of the given cover pairs is not antisymmetric."""


class DuplicateLabelError(CausalFracError):
    pass


class UnknownEventError(CausalFracError, KeyError):
    pass


class EventMismatchError(CausalFracError):
    """Two orders (or an order and a space) disagree on their event list."""


class OutOfRangeError(CausalFracError, ValueError):
    pass


class ScopeError(CausalFracError, ValueError):
    pass


class NotLowersetError(CausalFracError, ValueError):
    pass


class NotCausalError(CausalFracError, ValueError):
    pass


class BudgetExceededError(CausalFracError):
    """Enumeration would exceed the configured number of causal functions."""

    def __init__(self, count, budget):
        self.count = count
        self.budget = budget
        super().__init__(f"{count} causal functions exceed the enumeration budget of {budget}")


class ValidationError(CausalFracError, ValueError):
    """A probability table failed non-negativity or normalisation checks."""


class SolverError(CausalFracError):
    """The LP solver did not reach an optimal solution."""

    def __init__(self, status, message=""):
        self.status = status
        super().__init__(f"{status}: {message}" if message else status)


class InfeasibleError(SolverError):
    def __init__(self, message=""):
        super().__init__("infeasible", message)
