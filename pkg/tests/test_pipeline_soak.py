"""Randomized end-to-end soak: spec -> compile -> simulate vs oracle.

Random piecewise functions (random coefficients, offsets, denominators,
threshold/mod guards, final catch-all piece) compile and simulate to
the reference evaluator's value on every well-formed input. Inputs
where the selected piece is non-integer or negative are skipped: the
spec is ill-formed there and stable computation is undefined.
"""

import random

from crnforge.compiler import compile_piecewise
from crnforge.errors import DomainConsistencyError, IllFormedFunctionError, TotalityError
from crnforge.kinetics import simulate
from crnforge.semilinear import (
    AffinePiece,
    Guard,
    Mod,
    PiecewiseAffineFn,
    Threshold,
    eval_fn,
)
from crnforge.verifier import inputs_up_to_norm


def random_guard(rng, k):
    kind = rng.randrange(3)
    coeffs = tuple(rng.randrange(-2, 3) for _ in range(k))
    if kind == 0:
        return Guard.of(Threshold(coeffs, rng.choice(["<", "<=", "=", ">=", ">"]),
                                  rng.randrange(-2, 3)))
    if kind == 1:
        m = rng.randrange(2, 4)
        return Guard.of(Mod(coeffs, m, rng.randrange(m)))
    return Guard.not_(random_guard(rng, k))


def random_fn(rng):
    k = rng.randrange(1, 3)
    l = rng.randrange(1, 3)
    pieces = []
    for i in range(rng.randrange(1, 3)):
        num = [[rng.randrange(-2, 4) for _ in range(k)] for _ in range(l)]
        den = [rng.choice([1, 1, 2]) for _ in range(l)]
        b = [rng.randrange(0, 3) for _ in range(l)]
        c = [rng.randrange(0, 2) for _ in range(k)]
        pieces.append(AffinePiece(k, l, num, den, b, c, random_guard(rng, k)))
    num = [[rng.randrange(0, 3) for _ in range(k)] for _ in range(l)]
    pieces.append(
        AffinePiece(k, l, num, [1] * l, [0] * l, [0] * k, Guard.true())
    )
    return PiecewiseAffineFn(pieces)


def test_random_specs_compile_and_compute():
    rng = random.Random(24601)
    compiled = 0
    compared = 0
    while compiled < 40:
        fn = random_fn(rng)
        try:
            crc, _ = compile_piecewise(fn)
        except (TotalityError, DomainConsistencyError):
            continue  # random guards may dodge coverage contracts; resample
        compiled += 1
        for x in inputs_up_to_norm(fn.k, 6):
            try:
                expected = eval_fn(fn, x)
            except (TotalityError, IllFormedFunctionError, DomainConsistencyError):
                continue  # spec ill-formed at this input; nothing to stably compute
            res = simulate(crc, x, seed=rng.randrange(10_000))
            assert res.terminal, (fn, x)
            assert res.output == expected, (fn, x, res.output, expected)
            compared += 1
    assert compared > 300
