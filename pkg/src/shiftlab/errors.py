"""Exception taxonomy shared across the package."""
from __future__ import annotations


class ShiftLabError(Exception):
    """Base class for all domain errors."""


class CycleError(ShiftLabError):
    """A parent map contains a nontrivial cycle."""

    def __init__(self, witness):
        self.witness = list(witness)
        super().__init__(f"nontrivial cycle through {self.witness}")


class DanglingParentError(ShiftLabError):
    """A parent map points outside the vertex set."""


class EmptyForestError(ShiftLabError):
    """The vertex set must be nonempty."""


class UnknownVertex(ShiftLabError):
    """A vertex id is not part of the forest."""


class VertexCollision(ShiftLabError):
    """Two forests being combined share vertex ids."""


class EmptyFamily(ShiftLabError):
    """The operation requires a nonempty family."""


class NotRootedTree(ShiftLabError):
    """The operation requires a connected forest with a root."""


class NotATree(ShiftLabError):
    """The operation requires a single connected component."""


class NotProper(ShiftLabError):
    """Zero weights are allowed on roots only."""


class HasLeaf(ShiftLabError):
    """The operation requires a leafless shift (all core leaves tailed)."""


class ForklessInput(ShiftLabError):
    """The counterexample construction needs a fork."""


class RootFork(ShiftLabError):
    """The chosen fork vertex must have a parent."""


class NotProbability(ShiftLabError):
    """The measure must have total mass one."""


class InvalidMomentSequence(ShiftLabError):
    """Moment prefixes must be nonnegative with zeros propagating forward."""


class NotSubnormalInput(ShiftLabError):
    """The operation requires a shift that certifies subnormal."""


class InfeasibleExtension(ShiftLabError):
    """No backward extension with the requested parameters exists."""


class ScaleOutOfRange(ShiftLabError):
    """The scale C must lie in (0, 1/C0]."""


class MemberInfeasible(ShiftLabError):
    """A family member blocks the joint extension."""

    def __init__(self, index: int, reason: str = ""):
        self.index = index
        self.reason = reason
        msg = f"member {index} infeasible"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class MemberNotExtendable(ShiftLabError):
    """A supplied one-step extension fails the power check."""

    def __init__(self, index: int, k: int):
        self.index = index
        self.k = k
        super().__init__(f"member {index}: one-step extension fails at power {k}")


class FrontierMismatch(ShiftLabError):
    """The envelope has no well-formed depth-k frontier matching the family."""
