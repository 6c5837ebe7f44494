"""Exception taxonomy shared across the toolkit."""


class SfcError(Exception):
    """Base class for all toolkit errors."""


class DomainError(SfcError, ValueError):
    """An argument is outside its mathematical domain."""


class InstabilityError(SfcError, ValueError):
    """A queueing configuration has arrival rate >= service rate."""


class InfeasibleError(SfcError):
    """A reliability target cannot be met on the given hosting.

    Carries the best design found so far in ``outcome`` so callers can
    still report the structure that got closest to the target.
    """

    def __init__(self, message, outcome=None):
        super().__init__(message)
        self.outcome = outcome


class UnplaceableError(SfcError):
    """A single request exceeds every node's capacity."""


class CapacityExhaustedError(SfcError):
    """The substrate cannot host the full request set."""


class SizeError(SfcError, ValueError):
    """A structure is too large for exhaustive evaluation."""


class ParseError(SfcError):
    """A scenario file is not syntactically valid."""


class ValidationError(SfcError):
    """A scenario violates schema invariants.

    ``problems`` lists every violation found, not just the first.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
