"""Linear/semilinear sets, Presburger guards, and piecewise-affine functions.

This is the reference side of the system: eval_fn() is the oracle every
compiled network is verified against. All arithmetic is exact (Python
ints / Fraction); membership in a linear set is decided by bounded
depth-first search over period coefficients.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .errors import (
    DimensionMismatchError,
    DomainConsistencyError,
    FormatError,
    IllFormedFunctionError,
    TotalityError,
)


@dataclass(frozen=True)
class LinearSet:
    """{ base + n1*u1 + ... + np*up : nj in N } with nonnegative vectors."""

    base: tuple[int, ...]
    periods: tuple[tuple[int, ...], ...]

    def __init__(self, base: Sequence[int], periods: Sequence[Sequence[int]] = ()):
        object.__setattr__(self, "base", tuple(int(v) for v in base))
        object.__setattr__(self, "periods", tuple(tuple(int(v) for v in u) for u in periods))
        if any(v < 0 for v in self.base):
            raise FormatError("linear set base must be nonnegative")
        for u in self.periods:
            if len(u) != len(self.base):
                raise DimensionMismatchError("period dimension differs from base")
            if any(v < 0 for v in u):
                raise FormatError("linear set periods must be nonnegative")

    @property
    def dim(self) -> int:
        return len(self.base)


@dataclass(frozen=True)
class SemilinearSet:
    """Finite union of linear sets of equal dimension."""

    components: tuple[LinearSet, ...]

    def __init__(self, components: Sequence[LinearSet]):
        object.__setattr__(self, "components", tuple(components))
        if not self.components:
            raise FormatError("semilinear set needs at least one component")
        d = self.components[0].dim
        if any(c.dim != d for c in self.components):
            raise DimensionMismatchError("components have mixed dimensions")

    @property
    def dim(self) -> int:
        return self.components[0].dim


def linear_contains(ls: LinearSet, v: Sequence[int]) -> bool:
    """Exact membership: does some natural combination of periods reach v?

    DFS over coefficients; period uj is bounded by min over coordinates t
    with uj(t) > 0 of remaining(t) // uj(t), so the search terminates.
    All-zero periods contribute nothing and are skipped.
    """
    if len(v) != ls.dim:
        raise DimensionMismatchError("vector dimension differs from set")
    rem = [int(a) - b for a, b in zip(v, ls.base)]
    if any(r < 0 for r in rem):
        return False
    periods = [u for u in ls.periods if any(u)]

    def search(j: int, rem: list[int]) -> bool:
        if not any(rem):
            return True
        if j == len(periods):
            return False
        u = periods[j]
        bound = min(r // c for r, c in zip(rem, u) if c > 0)
        for n in range(bound + 1):
            nxt = [r - n * c for r, c in zip(rem, u)]
            if all(r >= 0 for r in nxt) and search(j + 1, nxt):
                return True
        return False

    return search(0, rem)


def semilinear_contains(s: SemilinearSet, v: Sequence[int]) -> bool:
    if len(v) != s.dim:
        raise DimensionMismatchError("vector dimension differs from set")
    return any(linear_contains(c, v) for c in s.components)


def enumerate_linear(ls: LinearSet, max_coeff: int) -> set[tuple[int, ...]]:
    """All points with every period coefficient at most max_coeff.

    Independent brute-force oracle used by tests against linear_contains.
    """
    points = {ls.base}
    for u in ls.periods:
        if not any(u):
            continue
        points = {
            tuple(p + n * c for p, c in zip(pt, u))
            for pt in points
            for n in range(max_coeff + 1)
        }
    return points


# ---------------------------------------------------------------------------
# Presburger guards


@dataclass(frozen=True)
class Threshold:
    """sum(coeffs * x) <rel> const, rel in {<, <=, =, >=, >}."""

    coeffs: tuple[int, ...]
    rel: str
    const: int

    def __init__(self, coeffs: Sequence[int], rel: str, const: int):
        if rel not in ("<", "<=", "=", ">=", ">"):
            raise FormatError(f"unknown relation {rel!r}")
        object.__setattr__(self, "coeffs", tuple(int(a) for a in coeffs))
        object.__setattr__(self, "rel", rel)
        object.__setattr__(self, "const", int(const))

    def holds(self, x: Sequence[int]) -> bool:
        s = sum(a * int(v) for a, v in zip(self.coeffs, x))
        return {
            "<": s < self.const,
            "<=": s <= self.const,
            "=": s == self.const,
            ">=": s >= self.const,
            ">": s > self.const,
        }[self.rel]


@dataclass(frozen=True)
class Mod:
    """sum(coeffs * x) = residue (mod modulus), modulus >= 2."""

    coeffs: tuple[int, ...]
    modulus: int
    residue: int

    def __init__(self, coeffs: Sequence[int], modulus: int, residue: int):
        if modulus < 2:
            raise FormatError("modulus must be at least 2")
        object.__setattr__(self, "coeffs", tuple(int(a) for a in coeffs))
        object.__setattr__(self, "modulus", int(modulus))
        object.__setattr__(self, "residue", int(residue) % int(modulus))

    def holds(self, x: Sequence[int]) -> bool:
        s = sum(a * int(v) for a, v in zip(self.coeffs, x))
        return s % self.modulus == self.residue


Atom = Threshold | Mod


@dataclass(frozen=True)
class Guard:
    """Boolean formula tree over Presburger atoms, or the constant True.

    node kinds: 'true', 'atom', 'and', 'or', 'not'.
    """

    kind: str
    atom: Atom | None = None
    children: tuple["Guard", ...] = field(default=())

    @staticmethod
    def true() -> "Guard":
        return Guard("true")

    @staticmethod
    def of(atom: Atom) -> "Guard":
        return Guard("atom", atom=atom)

    @staticmethod
    def and_(*gs: "Guard") -> "Guard":
        return Guard("and", children=tuple(gs))

    @staticmethod
    def or_(*gs: "Guard") -> "Guard":
        return Guard("or", children=tuple(gs))

    @staticmethod
    def not_(g: "Guard") -> "Guard":
        return Guard("not", children=(g,))

    def atoms(self) -> list[Atom]:
        """Atoms in left-to-right tree order (with repetitions deduplicated)."""
        found: list[Atom] = []

        def walk(g: Guard):
            if g.kind == "atom":
                if g.atom not in found:
                    found.append(g.atom)
            for child in g.children:
                walk(child)

        walk(self)
        return found

    def eval_with(self, atom_values: dict[Atom, bool]) -> bool:
        if self.kind == "true":
            return True
        if self.kind == "atom":
            return atom_values[self.atom]
        if self.kind == "and":
            return all(c.eval_with(atom_values) for c in self.children)
        if self.kind == "or":
            return any(c.eval_with(atom_values) for c in self.children)
        if self.kind == "not":
            return not self.children[0].eval_with(atom_values)
        raise FormatError(f"unknown guard node {self.kind!r}")


def eval_guard(g: Guard, x: Sequence[int]) -> bool:
    """Evaluate a guard at x with exact integer arithmetic."""
    values = {atom: atom.holds(x) for atom in g.atoms()}
    return g.eval_with(values)


# ---------------------------------------------------------------------------
# Affine pieces and piecewise functions


@dataclass(frozen=True)
class AffinePiece:
    """y(j) = b[j] + (1/d[j]) * sum_i num[j][i] * (x(i) - c[i]) on its guard.

    num has l rows of k integers; offsets b, c and denominators d are
    nonnegative with d[j] >= 1. Values may be non-integer off-domain;
    eval_fn() checks integrality where the guard holds.
    """

    k: int
    l: int
    num: tuple[tuple[int, ...], ...]
    den: tuple[int, ...]
    b: tuple[int, ...]
    c: tuple[int, ...]
    guard: Guard

    def __init__(self, k, l, num, den, b, c, guard: Guard):
        object.__setattr__(self, "k", int(k))
        object.__setattr__(self, "l", int(l))
        object.__setattr__(self, "num", tuple(tuple(int(v) for v in row) for row in num))
        object.__setattr__(self, "den", tuple(int(v) for v in den))
        object.__setattr__(self, "b", tuple(int(v) for v in b))
        object.__setattr__(self, "c", tuple(int(v) for v in c))
        object.__setattr__(self, "guard", guard)
        if len(self.num) != self.l or any(len(row) != self.k for row in self.num):
            raise DimensionMismatchError("numerator matrix must be l rows of k entries")
        if len(self.den) != self.l or len(self.b) != self.l or len(self.c) != self.k:
            raise DimensionMismatchError("offset/denominator arity mismatch")
        if any(d < 1 for d in self.den):
            raise FormatError("denominators must be at least 1")
        if any(v < 0 for v in self.b) or any(v < 0 for v in self.c):
            raise FormatError("offsets must be nonnegative")


def eval_piece(piece: AffinePiece, x: Sequence[int]) -> tuple[Fraction, ...] | None:
    """Exact rational value of the piece at x, or None if the guard fails.

    Raises DomainConsistencyError when the guard holds but some input is
    below its declared offset (caller's guard does not cover the domain).
    """
    if len(x) != piece.k:
        raise DimensionMismatchError("input arity mismatch")
    if not eval_guard(piece.guard, x):
        return None
    shifted = []
    for i, (xi, ci) in enumerate(zip(x, piece.c)):
        if xi < ci:
            raise DomainConsistencyError(
                f"guard holds at {tuple(x)} but x({i + 1}) = {xi} < offset {ci}"
            )
        shifted.append(int(xi) - ci)
    out = []
    for j in range(piece.l):
        s = sum(piece.num[j][i] * shifted[i] for i in range(piece.k))
        out.append(piece.b[j] + Fraction(s, piece.den[j]))
    return tuple(out)


@dataclass(frozen=True)
class PiecewiseAffineFn:
    """Ordered list of affine pieces sharing arity; first match wins."""

    pieces: tuple[AffinePiece, ...]
    input_names: tuple[str, ...] = ()

    def __init__(self, pieces: Sequence[AffinePiece], input_names: Sequence[str] = ()):
        object.__setattr__(self, "pieces", tuple(pieces))
        if not self.pieces:
            raise FormatError("piecewise function needs at least one piece")
        k, l = self.pieces[0].k, self.pieces[0].l
        if any(p.k != k or p.l != l for p in self.pieces):
            raise DimensionMismatchError("pieces have mixed arities")
        names = tuple(input_names) if input_names else tuple(f"x{i + 1}" for i in range(k))
        if len(names) != k:
            raise DimensionMismatchError("input name count differs from arity")
        object.__setattr__(self, "input_names", names)

    @property
    def k(self) -> int:
        return self.pieces[0].k

    @property
    def l(self) -> int:
        return self.pieces[0].l


def eval_fn(fn: PiecewiseAffineFn, x: Sequence[int]) -> tuple[int, ...]:
    """Reference oracle: value of the first piece whose guard holds at x.

    Raises TotalityError when no guard holds, IllFormedFunctionError when
    the selected piece yields a non-integer or negative coordinate.
    """
    for piece in fn.pieces:
        value = eval_piece(piece, x)
        if value is None:
            continue
        out = []
        for j, v in enumerate(value):
            if v.denominator != 1:
                raise IllFormedFunctionError(
                    f"piece value {v} at {tuple(x)} is not an integer (output {j + 1})"
                )
            if v < 0:
                raise IllFormedFunctionError(
                    f"piece value {v} at {tuple(x)} is negative (output {j + 1})"
                )
            out.append(int(v))
        return tuple(out)
    raise TotalityError(f"no piece guard holds at {tuple(x)}")


def disambiguate_guards(fn: PiecewiseAffineFn) -> PiecewiseAffineFn:
    """Make guards mutually exclusive: piece i keeps g_i and not(g_1..g_{i-1}).

    Wherever at least one original guard held, exactly one transformed
    guard holds, and first-match evaluation is unchanged.
    """
    new_pieces = []
    for i, piece in enumerate(fn.pieces):
        if i == 0:
            new_pieces.append(piece)
            continue
        negations = [Guard.not_(fn.pieces[j].guard) for j in range(i)]
        guard = Guard.and_(piece.guard, *negations)
        new_pieces.append(
            AffinePiece(piece.k, piece.l, piece.num, piece.den, piece.b, piece.c, guard)
        )
    return PiecewiseAffineFn(new_pieces, fn.input_names)


# ---------------------------------------------------------------------------
# Set-level and piece-level transforms for the difference encoding


def hat_transform(s: SemilinearSet, k: int, l: int) -> SemilinearSet:
    """Difference encoding of a set over N^(k+l): lift to N^(k+2l).

    Each component's base and periods get l zeros appended, plus one new
    period per output coordinate with 1 in both the produced and consumed
    blocks, so (x, yP, yC) is a member iff yP >= yC coordinate-wise with
    (x, yP - yC) in the original set.
    """
    if s.dim != k + l:
        raise DimensionMismatchError(f"set dimension {s.dim} is not k+l = {k + l}")
    zeros = (0,) * l
    components = []
    for comp in s.components:
        base = comp.base + zeros
        periods = [u + zeros for u in comp.periods]
        for j in range(l):
            unit = tuple(1 if t == j else 0 for t in range(l))
            periods.append((0,) * k + unit + unit)
        components.append(LinearSet(base, periods))
    return SemilinearSet(components)


def hat_fn(piece: AffinePiece) -> tuple[AffinePiece, AffinePiece]:
    """Split a piece into monotone produced/consumed parts (yP, yC).

    yP keeps the positive coefficients and the b offsets; yC is the
    negated sum of the negative coefficients with zero offsets. Both
    share the input offsets and denominators, and yP - yC equals the
    original value on the domain.
    """
    num_p = tuple(tuple(max(0, v) for v in row) for row in piece.num)
    num_c = tuple(tuple(-min(0, v) for v in row) for row in piece.num)
    y_p = AffinePiece(piece.k, piece.l, num_p, piece.den, piece.b, piece.c, piece.guard)
    y_c = AffinePiece(piece.k, piece.l, num_c, piece.den, (0,) * piece.l, piece.c, piece.guard)
    return y_p, y_c


# ---------------------------------------------------------------------------
# JSON schemas: function-spec files and linear-graph-set files


def guard_from_json(doc) -> Guard:
    if doc is True:
        return Guard.true()
    if not isinstance(doc, dict):
        raise FormatError(f"bad guard node {doc!r}")
    if "and" in doc:
        return Guard.and_(*(guard_from_json(d) for d in doc["and"]))
    if "or" in doc:
        return Guard.or_(*(guard_from_json(d) for d in doc["or"]))
    if "not" in doc:
        return Guard.not_(guard_from_json(doc["not"]))
    kind = doc.get("atom")
    if kind == "threshold":
        return Guard.of(Threshold(doc["coeffs"], doc["rel"], doc["const"]))
    if kind == "mod":
        return Guard.of(Mod(doc["coeffs"], doc["m"], doc["r"]))
    raise FormatError(f"bad guard node {doc!r}")


def guard_to_json(g: Guard):
    if g.kind == "true":
        return True
    if g.kind == "and":
        return {"and": [guard_to_json(c) for c in g.children]}
    if g.kind == "or":
        return {"or": [guard_to_json(c) for c in g.children]}
    if g.kind == "not":
        return {"not": guard_to_json(g.children[0])}
    atom = g.atom
    if isinstance(atom, Threshold):
        return {"atom": "threshold", "coeffs": list(atom.coeffs), "rel": atom.rel, "const": atom.const}
    return {"atom": "mod", "coeffs": list(atom.coeffs), "m": atom.modulus, "r": atom.residue}


def fn_from_json(doc: dict) -> PiecewiseAffineFn:
    try:
        inputs = list(doc["inputs"])
        l = int(doc["outputs"])
        pieces_doc = doc["pieces"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"function spec missing field: {exc}") from None
    k = len(inputs)
    pieces = []
    for pd in pieces_doc:
        pieces.append(
            AffinePiece(
                k, l, pd["num"], pd["den"], pd["b"], pd["c"], guard_from_json(pd["guard"])
            )
        )
    return PiecewiseAffineFn(pieces, inputs)


def fn_to_json(fn: PiecewiseAffineFn) -> dict:
    return {
        "inputs": list(fn.input_names),
        "outputs": fn.l,
        "pieces": [
            {
                "guard": guard_to_json(p.guard),
                "num": [list(row) for row in p.num],
                "den": list(p.den),
                "b": list(p.b),
                "c": list(p.c),
            }
            for p in fn.pieces
        ],
    }


def load_fn(path: str | Path) -> PiecewiseAffineFn:
    return fn_from_json(json.loads(Path(path).read_text()))


def save_fn(path: str | Path, fn: PiecewiseAffineFn) -> None:
    Path(path).write_text(json.dumps(fn_to_json(fn), indent=2) + "\n")


def graph_sets_from_json(doc: dict) -> tuple[int, int, SemilinearSet]:
    try:
        k, l = int(doc["dim_in"]), int(doc["dim_out"])
        sets = doc["sets"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"graph-set file missing field: {exc}") from None
    comps = [LinearSet(s["base"], s.get("periods", [])) for s in sets]
    s = SemilinearSet(comps)
    if s.dim != k + l:
        raise FormatError(f"set dimension {s.dim} does not match dim_in+dim_out = {k + l}")
    return k, l, s


def graph_sets_to_json(k: int, l: int, s: SemilinearSet) -> dict:
    return {
        "dim_in": k,
        "dim_out": l,
        "sets": [
            {"base": list(c.base), "periods": [list(u) for u in c.periods]}
            for c in s.components
        ],
    }


def load_graph_sets(path: str | Path) -> tuple[int, int, SemilinearSet]:
    return graph_sets_from_json(json.loads(Path(path).read_text()))
