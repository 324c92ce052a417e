"""Exception hierarchy shared by all modules."""


class SubRamseyError(Exception):
    """Base class for every error raised by this package."""


class EnumerationBudgetExceeded(SubRamseyError):
    def __init__(self, needed, budget, what="subsets"):
        self.needed = needed
        self.budget = budget
        super().__init__(f"enumerating {needed} {what} exceeds budget {budget}")


class InvalidVertex(SubRamseyError, IndexError):
    pass


class SamePart(SubRamseyError, ValueError):
    pass


class DuplicateEdge(SubRamseyError, ValueError):
    pass


class ParseError(SubRamseyError, ValueError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class RemovalOverflow(SubRamseyError):
    """Expander extraction removed more than ceil(alpha N) vertices from a part.

    This refutes alpha-joinedness of the input; ``witness`` holds an empty
    pair (A, B) when one can be read off the removal state.
    """

    def __init__(self, part, removed1, removed2, offending, witness=None):
        self.part = part
        self.removed1 = removed1
        self.removed2 = removed2
        self.offending = offending
        self.witness = witness
        super().__init__(
            f"removed set in part {part} would exceed the allowed size "
            f"(|X1|={len(removed1)}, |X2|={len(removed2)}, next={list(offending.members)})"
        )


class InsufficientYSpace(SubRamseyError, ValueError):
    pass


class NoCandidate(SubRamseyError):
    pass


class NoGoodCandidate(SubRamseyError):
    def __init__(self, message, tried=0):
        self.tried = tried
        super().__init__(message)


class DegreeTooHigh(SubRamseyError, ValueError):
    pass


class SigmaTooShort(SubRamseyError, ValueError):
    pass


class DegreeTooSmall(SubRamseyError, ValueError):
    pass


class HypothesisViolation(SubRamseyError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NoCrossingEdge(SubRamseyError):
    """No host edge joins the two leaf sets: an empty pair refuting alpha-joinedness."""

    def __init__(self, leaves1, leaves2):
        self.leaves1 = leaves1
        self.leaves2 = leaves2
        super().__init__(
            f"no edge between leaf sets of sizes {len(leaves1)} and {len(leaves2)}"
        )


class PatternBoundViolation(SubRamseyError, ValueError):
    """A pattern edit broke a registered (n, D)-bipartite bound."""


class GoodnessLost(SubRamseyError):
    """Re-verification after pruning found a negative deficiency."""

    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"embedding no longer good: {witness}")
