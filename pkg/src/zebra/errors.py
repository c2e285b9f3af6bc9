"""Exception hierarchy shared by every module."""


class ZebraError(Exception):
    """Base class for all library errors."""


class AlphabetMismatch(ZebraError, ValueError):
    """Graphs or words over different alphabets were combined."""


class DimensionMismatch(ZebraError, ValueError):
    """Rate vector, distribution or partitions disagree in size."""


class NotCliquePartition(ZebraError, ValueError):
    """A confusion graph is not a disjoint union of cliques."""


class LimitExceeded(ZebraError):
    """An input is too large for the configured search limits."""


class SizeLimitExceeded(LimitExceeded):
    """A graph, power or type class is larger than the configured cap."""


class BudgetExceeded(LimitExceeded):
    """An exhaustive search ran out of its node or size budget.

    Never raised for a completed search; an exhausted budget is not a proof
    of infeasibility.
    """

    def __init__(self, message: str, nodes: int = 0):
        super().__init__(message)
        self.nodes = nodes


class RetriesExhausted(ZebraError):
    """The random coder failed to produce a valid scheme.

    ``failures`` maps each message tuple to the number of attempts in which
    it could not be served.
    """

    def __init__(self, message: str, attempts: int, failures: dict | None = None):
        super().__init__(message)
        self.attempts = attempts
        self.failures = dict(failures or {})


class UnknownObservation(ZebraError, KeyError):
    """An observation string lies in none of a user's families."""
