"""Exception types shared across the package."""


class TreeLcsError(Exception):
    """Base class for all package errors."""


# --- offspring laws ---

class NonSummable(TreeLcsError):
    """A custom pmf does not have finite total mass."""


class NegativeMass(TreeLcsError):
    """A pmf entry is negative."""


class NotCritical(TreeLcsError):
    """A critical law was requested but the mean is not 1 (or pmf[0] == 0)."""


class Infeasible(TreeLcsError):
    """No positive solution exists for the heavy-tail law's free parameters."""


class Diverged(TreeLcsError):
    """The requested moment fails the tail-summability test."""


class Overflow(TreeLcsError):
    """Exact computation exceeded its precision or size budget."""


# --- trees ---

class InvalidPath(TreeLcsError):
    """Step sequence violates the Lukasiewicz partial-sum invariant."""


class NodeNotFound(TreeLcsError):
    """Vertex id is not a node of the tree."""


class RootHasNoTrim(TreeLcsError):
    """trim_at was called on the root."""


class ParseError(TreeLcsError):
    """Malformed tree text; carries the byte offset of the failure."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


# --- samplers ---

class CapExceeded(TreeLcsError):
    """A sampler hit its node cap; the partial sample is right-censored."""


class UnsupportedSize(TreeLcsError):
    """Conditioning on a size n with P(#tree = n) = 0."""


class Timeout(TreeLcsError):
    """Rejection sampler exhausted its attempt budget."""


# --- LCS computations ---

class ResourceLimit(TreeLcsError):
    """Dynamic program exceeded its node-pair budget."""


class TooLarge(TreeLcsError):
    """Input exceeds the brute-force oracle's size precondition."""


# --- estimators ---

class InvalidAlpha(TreeLcsError):
    """Tail index outside (0,1) u (1,2)."""


class Empty(TreeLcsError):
    """Empirical distribution has no samples."""


# --- harness ---

class ConfigError(TreeLcsError):
    """Experiment configuration failed validation."""


class MissingManifest(TreeLcsError):
    """Run directory has no manifest (crashed or foreign run)."""
