"""Exception hierarchy for cyclicfan."""


class CyclicFanError(Exception):
    """Base class for all cyclicfan errors."""


class NotSkewSymmetrizable(CyclicFanError):
    """Sign pattern broken or the cyclic product condition fails."""


class NoSymmetrizer(CyclicFanError):
    """The diagonal symmetrizer system d_i b_ij = -d_j b_ji is inconsistent."""


class NotCyclic(CyclicFanError):
    """Operation requires a matrix with a cyclic sign pattern."""


class NotClusterCyclic(CyclicFanError):
    """Operation requires a cluster-cyclic matrix."""


class NotBranch(CyclicFanError):
    """Operation requires a seed lying in a branch of the word tree."""


class DomainError(CyclicFanError, ValueError):
    """Scalar argument outside the function's domain."""


class AmbiguousDescent(CyclicFanError):
    """Two strictly decreasing mutation directions detected.

    Mathematically impossible; signals tolerance breakdown on the input.
    """


class LabelContradiction(CyclicFanError):
    """No or several candidates satisfy the S-label condition.

    Signals tolerance breakdown or a corrupted seed state.
    """


class DepthExceeded(CyclicFanError):
    """Mutation word grew past the configured depth cap."""


class AtAntipode(CyclicFanError):
    """Ray is (numerically) the projection antipode and cannot be projected."""


class ViolationFound(CyclicFanError):
    """A verifier found a counterexample to the property it checks.

    Carries the offending :class:`~cyclicfan.checks.Report` as ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DuplicateFound(ViolationFound):
    """Two nontrivially distinct g-vector classes share a ray."""


class SignMismatch(ViolationFound):
    """Observed G-matrix row signs disagree with the sign table."""
