"""Exception hierarchy shared across the package."""

from __future__ import annotations


class OOKBError(Exception):
    """Base class for all errors raised by this package."""


class KBLoadError(OOKBError):
    """Raised when a knowledge base fails to load.

    Carries the full batch of parse errors so callers can report them all
    at once instead of fixing one problem per run.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        summary = "; ".join(str(e) for e in self.errors[:5])
        if len(self.errors) > 5:
            summary += f"; ... ({len(self.errors)} errors total)"
        super().__init__(summary)


class InconsistentKBError(OOKBError):
    """The knowledge base has no answer set for a hard, logical reason.

    ``reason`` is ``"disjoint"`` when membership in disjoint classes was
    derived for the same term, or ``"eq-neq"`` when derived equality
    connects two terms that are asserted unequal.
    """

    def __init__(self, reason, message):
        self.reason = reason
        super().__init__(message)


class UniverseCapError(OOKBError):
    """Term universe exceeded the configured size cap.

    Usually signals a cyclic knowledge base expanded at too high a depth.
    """

    def __init__(self, size, cap):
        self.size = size
        self.cap = cap
        super().__init__(f"term universe exceeded cap: {size} > {cap}")


class BudgetExceededError(OOKBError):
    """A brute-force enumeration exceeded its configured budget."""


class UnknownSymbolError(OOKBError):
    """A query referenced a class or relation the domain does not declare."""


class InvariantFamilyError(OOKBError):
    """Cautious entailment was asked about a choice-dependent predicate."""


class InfeasibleProfileError(OOKBError):
    """The synthetic-KB generator was given an unsatisfiable profile."""
