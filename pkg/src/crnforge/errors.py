"""Exception hierarchy shared across the package."""

from __future__ import annotations


class CrnError(Exception):
    """Base class for all crnforge errors."""


class StructuralError(CrnError):
    """A reaction or configuration references species unknown to the network."""


class NotApplicableError(CrnError):
    """apply() was called on a reaction whose reactants are not available."""


class CountOverflowError(CrnError):
    """A molecular count left the signed 64-bit range during apply()."""


class DimensionMismatchError(CrnError):
    """Vector arity does not match the expected dimension."""


class ArityError(CrnError):
    """The kinetic model only supports reactions with one or two reactants."""


class UnboundedNetworkError(CrnError):
    """Simulation/verification refused a machine flagged as unbounded."""


class CountBoundViolationError(CrnError):
    """A trajectory exceeded the declared linear molecular-count bound."""


class CapExceededError(CrnError):
    """Reachability exploration hit the node budget before closure."""

    def __init__(self, message: str, nodes: int, depth: int, level_sizes: list[int]):
        super().__init__(message)
        self.nodes = nodes
        self.depth = depth
        self.level_sizes = level_sizes


class TotalityError(CrnError):
    """No piece guard holds at the given input."""


class IllFormedFunctionError(CrnError):
    """A piece evaluated to a non-integer or negative value on its domain."""


class DomainConsistencyError(CrnError):
    """A guard admitted an input below the piece's declared input offsets."""


class NotAGraphError(CrnError):
    """A linear set is not the graph of a partial function."""

    def __init__(self, message: str, witness: tuple[tuple[int, ...], tuple[int, ...]]):
        super().__init__(message)
        self.witness = witness


class SingularMatrixError(CrnError):
    """solve_exact() received a singular matrix."""

    def __init__(self, message: str, rank: int):
        super().__init__(message)
        self.rank = rank


class FormatError(CrnError):
    """A .crn file or JSON document does not conform to its schema."""
