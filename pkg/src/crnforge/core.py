"""Discrete chemical reaction network model.

Species, reactions, integer-count configurations, single reachability
steps, and the decider (Crd) / computer (Crc) wrappers that attach
input/output/voter semantics to a bare network.

Counts are nonnegative 64-bit integers; apply() raises on overflow
instead of wrapping. All types here are immutable after construction
and safe to share across threads; every operation is pure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    CountOverflowError,
    DimensionMismatchError,
    NotApplicableError,
    StructuralError,
)

INT64_MAX = 2**63 - 1

# Scope prefixes like "p0/X1" namespace parallel sub-networks; each
# segment follows the bare species-name grammar.
_SEGMENT = r"[A-Za-z][A-Za-z0-9_^{}']*"
_NAME_RE = re.compile(rf"{_SEGMENT}(?:/{_SEGMENT})*\Z")

VOTE_YES = "yes"
VOTE_NO = "no"
VOTE_UNDEFINED = "undefined"


def valid_species_name(name: str) -> bool:
    return bool(_NAME_RE.match(name))


@dataclass(frozen=True)
class Species:
    """Chemical species, identified by an interned name."""

    name: str

    def __post_init__(self):
        if not valid_species_name(self.name):
            raise StructuralError(f"invalid species name {self.name!r}")

    def __str__(self) -> str:
        return self.name


def _as_side(side: Mapping[str, int] | Iterable[tuple[str, int]]) -> tuple[tuple[str, int], ...]:
    items = side.items() if isinstance(side, Mapping) else side
    merged: dict[str, int] = {}
    for name, coeff in items:
        if not isinstance(coeff, int) or coeff < 0:
            raise StructuralError(f"stoichiometry of {name} must be a nonnegative integer")
        if coeff == 0:
            continue
        if not valid_species_name(name):
            raise StructuralError(f"invalid species name {name!r}")
        merged[name] = merged.get(name, 0) + coeff
    return tuple(sorted(merged.items()))


@dataclass(frozen=True)
class Reaction:
    """A reaction: reactant multiset, product multiset, rate constant.

    Zero-net reactions (reactants == products) are legal in the model;
    the compiler emitters drop them because they only waste events.
    """

    reactants: tuple[tuple[str, int], ...]
    products: tuple[tuple[str, int], ...]
    rate_constant: float = 1.0

    def __init__(self, reactants, products, rate_constant: float = 1.0):
        object.__setattr__(self, "reactants", _as_side(reactants))
        object.__setattr__(self, "products", _as_side(products))
        object.__setattr__(self, "rate_constant", float(rate_constant))
        if not self.reactants and not self.products:
            raise StructuralError("reaction must have at least one reactant or product")
        if not self.rate_constant > 0:
            raise StructuralError("rate constant must be positive")

    @property
    def num_reactants(self) -> int:
        return sum(c for _, c in self.reactants)

    def species_names(self) -> set[str]:
        return {n for n, _ in self.reactants} | {n for n, _ in self.products}

    def net(self) -> dict[str, int]:
        """Product-minus-reactant change per species (zero entries dropped)."""
        delta = dict(self.products)
        for name, coeff in self.reactants:
            delta[name] = delta.get(name, 0) - coeff
        return {n: d for n, d in sorted(delta.items()) if d != 0}

    def __str__(self) -> str:
        def side(terms):
            if not terms:
                return "0"
            return " + ".join(f"{c} {n}" if c != 1 else n for n, c in terms)

        s = f"{side(self.reactants)} -> {side(self.products)}"
        if self.rate_constant != 1.0:
            s += f" @ k={self.rate_constant:g}"
        return s

    @staticmethod
    def parse(text: str) -> "Reaction":
        from .crnfmt import parse_reaction_line

        return parse_reaction_line(text)


class Crn:
    """A finite chemical reaction network: ordered species plus reactions."""

    __slots__ = ("species", "reactions", "_index", "_matrices")

    def __init__(self, species: Sequence[Species | str], reactions: Sequence[Reaction]):
        sp = tuple(s if isinstance(s, Species) else Species(s) for s in species)
        names = [s.name for s in sp]
        if len(set(names)) != len(names):
            raise StructuralError("duplicate species names in network")
        self.species: tuple[Species, ...] = sp
        self.reactions: tuple[Reaction, ...] = tuple(reactions)
        self._index = {s.name: i for i, s in enumerate(sp)}
        for rxn in self.reactions:
            for name in rxn.species_names():
                if name not in self._index:
                    raise StructuralError(f"reaction {rxn} uses undeclared species {name!r}")
        self._matrices = None

    @property
    def species_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.species)

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise StructuralError(f"unknown species {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def matrices(self):
        """Dense integer (reactant, product, net) matrices, cached.

        Shapes are (R, S); rows follow reaction declaration order.
        """
        if self._matrices is None:
            R, S = len(self.reactions), len(self.species)
            re_m = np.zeros((R, S), dtype=np.int64)
            pr_m = np.zeros((R, S), dtype=np.int64)
            for r, rxn in enumerate(self.reactions):
                for name, coeff in rxn.reactants:
                    re_m[r, self._index[name]] = coeff
                for name, coeff in rxn.products:
                    pr_m[r, self._index[name]] = coeff
            self._matrices = (re_m, pr_m, pr_m - re_m)
        return self._matrices

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Crn)
            and self.species == other.species
            and self.reactions == other.reactions
        )

    def __hash__(self):
        return hash((self.species, self.reactions))

    def __repr__(self) -> str:
        return f"Crn({len(self.species)} species, {len(self.reactions)} reactions)"


@dataclass(frozen=True)
class Configuration:
    """Nonnegative integer molecular counts over a network's species."""

    crn: Crn
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) != len(self.crn.species):
            raise DimensionMismatchError(
                f"configuration has {len(self.counts)} entries for "
                f"{len(self.crn.species)} species"
            )
        for c in self.counts:
            if c < 0:
                raise StructuralError("negative count in configuration")
            if c > INT64_MAX:
                raise CountOverflowError("count exceeds 64-bit range")

    @staticmethod
    def from_dict(crn: Crn, counts: Mapping[str, int]) -> "Configuration":
        vec = [0] * len(crn.species)
        for name, c in counts.items():
            vec[crn.index_of(name)] = c
        return Configuration(crn, tuple(vec))

    def get(self, name: str) -> int:
        return self.counts[self.crn.index_of(name)]

    def as_dict(self, nonzero_only: bool = True) -> dict[str, int]:
        items = zip(self.crn.species_names, self.counts)
        return {n: c for n, c in items if c or not nonzero_only}

    def total(self) -> int:
        return sum(self.counts)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Configuration)
            and self.crn is other.crn
            and self.counts == other.counts
        )

    def __hash__(self):
        return hash(self.counts)


def applicable(c: Configuration, rxn: Reaction) -> bool:
    """True iff every reactant stoichiometry is covered by c."""
    crn = c.crn
    for name, coeff in rxn.reactants:
        if c.counts[crn.index_of(name)] < coeff:
            return False
    return True


def apply(c: Configuration, rxn: Reaction) -> Configuration:
    """The configuration c + products - reactants.

    Raises NotApplicableError when a reactant is missing and
    CountOverflowError when a count would leave the 64-bit range.
    """
    if not applicable(c, rxn):
        raise NotApplicableError(f"reaction {rxn} not applicable")
    crn = c.crn
    vec = list(c.counts)
    for name, coeff in rxn.reactants:
        vec[crn.index_of(name)] -= coeff
    for name, coeff in rxn.products:
        i = crn.index_of(name)
        vec[i] += coeff
        if vec[i] > INT64_MAX:
            raise CountOverflowError(f"count of {name} exceeds 64-bit range")
    return Configuration(crn, tuple(vec))


def enabled(crn: Crn, c: Configuration) -> list[Reaction]:
    """Reactions applicable to c, in declaration order."""
    return [rxn for rxn in crn.reactions if applicable(c, rxn)]


def is_terminal(crn: Crn, c: Configuration) -> bool:
    """True iff no reaction is applicable to c."""
    return not any(applicable(c, rxn) for rxn in crn.reactions)


@dataclass(frozen=True)
class Crd:
    """Chemical reaction decider: CRN plus inputs, voters, vote map, context.

    voters maps species name to its boolean vote (1 = yes, 0 = no).
    """

    crn: Crn
    input_species: tuple[str, ...]
    voters: Mapping[str, int]
    initial_context: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "input_species", tuple(self.input_species))
        object.__setattr__(self, "voters", dict(self.voters))
        object.__setattr__(self, "initial_context", dict(self.initial_context))
        _check_machine_species(self.crn, self.input_species, self.initial_context)
        for name, b in self.voters.items():
            if name not in self.crn:
                raise StructuralError(f"voter {name!r} not in network")
            if b not in (0, 1):
                raise StructuralError(f"vote of {name!r} must be 0 or 1")
        if not self.voters:
            raise StructuralError("decider needs at least one voter")


@dataclass(frozen=True)
class Crc:
    """Chemical reaction computer: CRN plus input/output species and context.

    declared_count_bound = (c0, c1) asserts that the total molecular count
    stays at most c0 + c1 * ||x||; the simulator enforces it when present.
    bounded is False for random-search backends whose reachable space is
    infinite; kinetics and full verification refuse those.
    """

    crn: Crn
    input_species: tuple[str, ...]
    output_species: tuple[str, ...]
    initial_context: Mapping[str, int] = field(default_factory=dict)
    declared_count_bound: tuple[int, int] | None = None
    bounded: bool = True

    def __post_init__(self):
        object.__setattr__(self, "input_species", tuple(self.input_species))
        object.__setattr__(self, "output_species", tuple(self.output_species))
        object.__setattr__(self, "initial_context", dict(self.initial_context))
        _check_machine_species(self.crn, self.input_species, self.initial_context)
        if not self.output_species:
            raise StructuralError("computer needs at least one output species")
        for name in self.output_species:
            if name not in self.crn:
                raise StructuralError(f"output species {name!r} not in network")
        if set(self.input_species) & set(self.output_species):
            raise StructuralError("input and output species must be disjoint")
        if self.declared_count_bound is not None:
            c0, c1 = self.declared_count_bound
            object.__setattr__(self, "declared_count_bound", (int(c0), int(c1)))


def _check_machine_species(crn: Crn, inputs: Sequence[str], context: Mapping[str, int]):
    seen = set()
    for name in inputs:
        if name not in crn:
            raise StructuralError(f"input species {name!r} not in network")
        if name in seen:
            raise StructuralError(f"duplicate input species {name!r}")
        seen.add(name)
    for name, c in context.items():
        if name not in crn:
            raise StructuralError(f"context species {name!r} not in network")
        if name in seen:
            raise StructuralError(f"initial context assigns input species {name!r}")
        if not isinstance(c, int) or c < 0:
            raise StructuralError(f"context count of {name!r} must be a nonnegative integer")


def vote(crd: Crd, c: Configuration) -> str:
    """Unanimous vote of the voters present in c.

    Undefined when no voter is present or when voters of both kinds are.
    """
    saw = {0: False, 1: False}
    for name, b in crd.voters.items():
        if c.counts[c.crn.index_of(name)] > 0:
            saw[b] = True
    if saw[0] and saw[1]:
        return VOTE_UNDEFINED
    if saw[1]:
        return VOTE_YES
    if saw[0]:
        return VOTE_NO
    return VOTE_UNDEFINED


def initial_configuration(machine: Crd | Crc, x: Sequence[int]) -> Configuration:
    """Valid initial configuration: x on the input species, sigma elsewhere."""
    if len(x) != len(machine.input_species):
        raise DimensionMismatchError(
            f"input has {len(x)} entries for {len(machine.input_species)} input species"
        )
    crn = machine.crn
    vec = [0] * len(crn.species)
    for name, xi in zip(machine.input_species, x):
        if xi < 0:
            raise StructuralError("input counts must be nonnegative")
        vec[crn.index_of(name)] = int(xi)
    for name, c in machine.initial_context.items():
        vec[crn.index_of(name)] = c
    return Configuration(crn, tuple(vec))


def output_counts(crc: Crc, c: Configuration) -> tuple[int, ...]:
    """Counts of the output species, in declaration order."""
    return tuple(c.counts[c.crn.index_of(name)] for name in crc.output_species)
