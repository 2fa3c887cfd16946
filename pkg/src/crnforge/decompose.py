"""Affine extraction: turn a linear graph set into an affine piece.

A linear set over N^(k+l) that is the graph of a partial function
determines, per output coordinate, a unique affine expression. The
coefficients come from a left-inverse of the matrix whose columns are a
basis extension of the projected periods; everything runs over exact
rationals and the denominators are cleared into the piece's d[j].
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .errors import NotAGraphError
from .exact import SpanTracker, solve_exact, solve_in_span
from .semilinear import AffinePiece, Guard, LinearSet


def _unit(dim: int, at: int) -> tuple[int, ...]:
    return tuple(1 if i == at else 0 for i in range(dim))


def _witness_pair(g: LinearSet, coeffs: list[Fraction]):
    """Two points of g with equal inputs and different outputs.

    coeffs is a rational combination of the projected periods equal to the
    output unit vector; scaling it to integers and splitting by sign gives
    two natural-coefficient points whose projections differ only in the
    output coordinate.
    """
    mult = lcm(*(c.denominator for c in coeffs)) if coeffs else 1
    ints = [int(c * mult) for c in coeffs]
    z1 = list(g.base)
    z2 = list(g.base)
    for m, u in zip(ints, g.periods):
        target, n = (z1, m) if m > 0 else (z2, -m)
        if n:
            for t in range(len(target)):
                target[t] += n * u[t]
    return tuple(z1), tuple(z2)


def extract_affine(g: LinearSet, k: int, l: int) -> AffinePiece:
    """Affine piece whose graph contains g (guard left as True).

    Checks, per output coordinate j, that the output unit vector is not in
    the rational span of the periods projected to (inputs, output j); a
    failure means two equal-input points have different outputs, and the
    error carries such a witness pair. The caller attaches guards; the
    domain of the piece is the projection of g.
    """
    if g.dim != k + l:
        raise ValueError(f"set dimension {g.dim} is not k+l = {k + l}")
    num: list[tuple[int, ...]] = []
    den: list[int] = []
    for j in range(l):
        proj = [tuple(u[:k]) + (u[k + j],) for u in g.periods]
        proj = [u for u in proj if any(u)]
        e_out = _unit(k + 1, k)
        combo = solve_in_span(proj, e_out)
        if combo is not None:
            # Map the projected combination back onto the surviving periods.
            full = [u for u in g.periods if any(tuple(u[:k]) + (u[k + j],))]
            witness = _witness_pair(LinearSet(g.base, full), combo)
            raise NotAGraphError(
                f"output {j + 1} is not a function of the inputs: points "
                f"{witness[0]} and {witness[1]} share an input block",
                witness,
            )
        span = SpanTracker(k + 1)      # span of the chosen basis vectors
        closure = SpanTracker(k + 1)   # same plus the output direction
        closure.add(e_out)
        basis: list[tuple[int, ...]] = []
        for u in proj:
            if span.add(u):
                closure.add(u)
                basis.append(u)
        for cand in [_unit(k + 1, i) for i in range(k)] + [
            _unit(k + 1, i)[:k] + (1,) for i in range(k)
        ]:
            if span.rank == k:
                break
            # Outside the closure span means: grows the rank and keeps the
            # output direction out of the extended span.
            if not closure.contains(cand):
                span.add(cand)
                closure.add(cand)
                basis.append(tuple(cand))
        assert span.rank == k, "basis extension failed after function-ness check"
        # Columns of V are the basis vectors restricted to the input block,
        # so the rows of V^T are exactly those restrictions.
        v_transpose = [list(w[:k]) for w in basis]
        w_last = [w[k] for w in basis]
        coeffs = solve_exact(v_transpose, w_last)
        d_j = lcm(*(c.denominator for c in coeffs)) if coeffs else 1
        num.append(tuple(int(c * d_j) for c in coeffs))
        den.append(d_j)
    b_out = tuple(g.base[k + j] for j in range(l))
    c_in = tuple(g.base[:k])
    return AffinePiece(k, l, num, den, b_out, c_in, Guard.true())
