"""Sets, guards, pieces, the reference evaluator, and the set transforms."""

import json
import random
from fractions import Fraction

import pytest

from crnforge.errors import (
    DimensionMismatchError,
    DomainConsistencyError,
    IllFormedFunctionError,
    TotalityError,
)
from crnforge.semilinear import (
    AffinePiece,
    Guard,
    LinearSet,
    Mod,
    PiecewiseAffineFn,
    SemilinearSet,
    Threshold,
    disambiguate_guards,
    enumerate_linear,
    eval_fn,
    eval_guard,
    eval_piece,
    fn_from_json,
    fn_to_json,
    guard_from_json,
    guard_to_json,
    hat_fn,
    hat_transform,
    linear_contains,
    semilinear_contains,
)

MAX_SPEC = PiecewiseAffineFn(
    [
        AffinePiece(2, 1, [[2, -1]], [1], [0], [0, 0], Guard.of(Threshold((1, -1), ">=", 0))),
        AffinePiece(2, 1, [[0, 1]], [1], [0], [0, 0], Guard.true()),
    ]
)


class TestLinearContains:
    def test_simple_ray(self):
        ls = LinearSet((0, 0), [(1, 2)])
        assert linear_contains(ls, (3, 6))
        assert not linear_contains(ls, (3, 5))

    def test_dependent_periods_member(self):
        # brute-force oracle: coefficients up to 2 suffice, e.g. (2,0,0) or (0,1,1)
        ls = LinearSet((0, 0, 0), [(1, 1, 1), (2, 0, 1), (0, 2, 1)])
        assert (2, 2, 2) in enumerate_linear(ls, 2)
        assert linear_contains(ls, (2, 2, 2))

    def test_dependent_periods_nonmember(self):
        ls = LinearSet((0, 0, 0), [(1, 1, 1), (2, 0, 1), (0, 2, 1)])
        assert (1, 0, 1) not in enumerate_linear(ls, 6)
        assert not linear_contains(ls, (1, 0, 1))

    def test_matches_enumeration_oracle(self):
        # Any v in [0, 8]^d needs coefficients at most 8 (periods are
        # nonnegative and nonzero), so enumeration to 8 is a complete oracle
        # for points sampled from that box.
        rng = random.Random(77)
        for _ in range(60):
            dim = rng.randrange(1, 5)
            base = tuple(rng.randrange(3) for _ in range(dim))
            periods = [
                tuple(rng.randrange(4) for _ in range(dim))
                for _ in range(rng.randrange(0, 4))
            ]
            ls = LinearSet(base, periods)
            points = enumerate_linear(ls, 8)
            for _ in range(20):
                v = tuple(rng.randrange(9) for _ in range(dim))
                assert linear_contains(ls, v) == (v in points)

    def test_all_zero_period_skipped(self):
        ls = LinearSet((1,), [(0,), (2,)])
        assert linear_contains(ls, (5,))
        assert not linear_contains(ls, (2,))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            linear_contains(LinearSet((0,)), (1, 2))


class TestSemilinearContains:
    def test_union(self):
        s = SemilinearSet([LinearSet((0, 1), [(1, 0)]), LinearSet((5, 5), [(0, 1)])])
        assert semilinear_contains(s, (5, 7))

    def test_singleton(self):
        s = SemilinearSet([LinearSet((2, 3))])
        assert semilinear_contains(s, (2, 3))
        assert not semilinear_contains(s, (2, 4))

    def test_below_base_everywhere(self):
        s = SemilinearSet([LinearSet((1, 1), [(1, 0)]), LinearSet((0, 2), [(1, 1)])])
        assert not semilinear_contains(s, (0, 0))


class TestGuards:
    def test_threshold_lt(self):
        g = Guard.of(Threshold((1, -1), "<", 0))
        assert eval_guard(g, (3, 5))
        assert not eval_guard(g, (5, 3))
        assert not eval_guard(g, (4, 4))

    def test_mod(self):
        g = Guard.of(Mod((1, 1), 2, 0))
        assert eval_guard(g, (1, 3))
        assert not eval_guard(g, (1, 2))

    def test_not_true(self):
        assert not eval_guard(Guard.not_(Guard.true()), (0,))

    def test_connectives(self):
        ge = Guard.of(Threshold((1, -1), ">=", 0))
        twice = Guard.of(Threshold((1, -2), ">=", 0))
        g = Guard.and_(ge, Guard.not_(twice))
        assert eval_guard(g, (3, 2))
        assert not eval_guard(g, (4, 2))
        assert not eval_guard(g, (1, 2))

    def test_json_round_trip(self):
        g = Guard.or_(
            Guard.and_(Guard.of(Threshold((1, 0), ">", 2)), Guard.true()),
            Guard.not_(Guard.of(Mod((1, 1), 3, 2))),
        )
        doc = guard_to_json(g)
        again = guard_from_json(json.loads(json.dumps(doc)))
        for x in [(0, 0), (1, 2), (3, 0), (2, 3), (5, 5)]:
            assert eval_guard(again, x) == eval_guard(g, x)


class TestEvalPiece:
    def test_half_sum(self):
        p = AffinePiece(2, 1, [[1, 1]], [2], [0], [0, 0], Guard.true())
        assert eval_piece(p, (2, 4)) == (Fraction(3),)

    def test_two_x1_minus_x2(self):
        p = MAX_SPEC.pieces[0]
        assert eval_piece(p, (4, 2)) == (Fraction(6),)

    def test_constant(self):
        p = AffinePiece(1, 1, [[0]], [1], [5], [0], Guard.true())
        assert eval_piece(p, (9,)) == (Fraction(5),)

    def test_guard_false_is_undefined(self):
        p = MAX_SPEC.pieces[0]
        assert eval_piece(p, (1, 4)) is None

    def test_offset_violation(self):
        p = AffinePiece(1, 1, [[1]], [1], [0], [2], Guard.true())
        with pytest.raises(DomainConsistencyError):
            eval_piece(p, (1,))


class TestEvalFn:
    def test_max_spec(self):
        assert eval_fn(MAX_SPEC, (2, 5)) == (5,)
        assert eval_fn(MAX_SPEC, (4, 2)) == (6,)

    def test_totality_error(self):
        half_only = PiecewiseAffineFn(
            [AffinePiece(2, 1, [[1, 1]], [2], [0], [0, 0], Guard.of(Mod((1, 1), 2, 0)))]
        )
        assert eval_fn(half_only, (1, 3)) == (2,)
        with pytest.raises(TotalityError):
            eval_fn(half_only, (1, 2))

    def test_non_integer_is_ill_formed(self):
        bad = PiecewiseAffineFn(
            [AffinePiece(1, 1, [[1]], [2], [0], [0], Guard.true())]
        )
        with pytest.raises(IllFormedFunctionError):
            eval_fn(bad, (3,))

    def test_json_round_trip(self):
        doc = fn_to_json(MAX_SPEC)
        again = fn_from_json(json.loads(json.dumps(doc)))
        for x in [(0, 0), (3, 1), (1, 3), (4, 4)]:
            assert eval_fn(again, x) == eval_fn(MAX_SPEC, x)


class TestDisambiguate:
    def test_true_tail_becomes_negation(self):
        fn2 = disambiguate_guards(MAX_SPEC)
        g2 = fn2.pieces[1].guard
        assert g2.kind == "and"
        assert eval_guard(g2, (1, 3))
        assert not eval_guard(g2, (3, 1))

    def test_single_piece_unchanged(self):
        fn = PiecewiseAffineFn([MAX_SPEC.pieces[0]])
        assert disambiguate_guards(fn).pieces[0].guard is fn.pieces[0].guard

    def test_exactly_one_holds(self):
        overlapping = PiecewiseAffineFn(
            [
                AffinePiece(1, 1, [[1]], [1], [0], [0], Guard.of(Threshold((1,), ">=", 2))),
                AffinePiece(1, 1, [[2]], [1], [0], [0], Guard.of(Threshold((1,), ">=", 1))),
                AffinePiece(1, 1, [[0]], [1], [0], [0], Guard.true()),
            ]
        )
        fn2 = disambiguate_guards(overlapping)
        for x in range(8):
            holds = [eval_guard(p.guard, (x,)) for p in fn2.pieces]
            assert sum(holds) == 1

    def test_first_match_preserved(self):
        overlapping = PiecewiseAffineFn(
            [
                AffinePiece(1, 1, [[1]], [1], [0], [0], Guard.of(Threshold((1,), ">=", 2))),
                AffinePiece(1, 1, [[2]], [1], [0], [0], Guard.true()),
            ]
        )
        fn2 = disambiguate_guards(overlapping)
        for x in range(8):
            assert eval_fn(fn2, (x,)) == eval_fn(overlapping, (x,))


def brute_hat_member(x, yp, yc, graph: SemilinearSet) -> bool:
    return yp >= yc and semilinear_contains(graph, (x, yp - yc))


class TestHatTransform:
    def test_identity_graph(self):
        graph = SemilinearSet([LinearSet((0, 0), [(1, 1)])])
        hat = hat_transform(graph, 1, 1)
        comp = hat.components[0]
        assert comp.base == (0, 0, 0)
        assert comp.periods == ((1, 1, 0), (0, 1, 1))
        # 2 = 5 - 3, established by brute-force membership
        assert brute_hat_member(2, 5, 3, graph)
        assert semilinear_contains(hat, (2, 5, 3))

    def test_singleton_base(self):
        graph = SemilinearSet([LinearSet((1, 2))])
        hat = hat_transform(graph, 1, 1)
        assert hat.components[0].base == (1, 2, 0)
        assert hat.components[0].periods == ((0, 1, 1),)

    def test_membership_equivalence_exhaustive(self):
        graph = SemilinearSet(
            [LinearSet((0, 0), [(1, 1)]), LinearSet((2, 0), [(1, 0)])]
        )
        hat = hat_transform(graph, 1, 1)
        for x in range(5):
            for yp in range(5):
                for yc in range(5):
                    assert semilinear_contains(hat, (x, yp, yc)) == brute_hat_member(
                        x, yp, yc, graph
                    )

    def test_dimension_check(self):
        with pytest.raises(DimensionMismatchError):
            hat_transform(SemilinearSet([LinearSet((0, 0))]), 2, 1)


class TestHatFn:
    def test_difference_split(self):
        p = AffinePiece(2, 1, [[1, -1]], [1], [0], [0, 0], Guard.true())
        yp, yc = hat_fn(p)
        assert yp.num == ((1, 0),)
        assert yc.num == ((0, 1),)

    def test_all_nonnegative(self):
        p = AffinePiece(2, 1, [[2, 1]], [1], [3], [0, 0], Guard.true())
        yp, yc = hat_fn(p)
        assert yc.num == ((0, 0),)
        assert yp.num == p.num and yp.b == p.b

    def test_arithmetic(self):
        p = MAX_SPEC.pieces[0]
        yp, yc = hat_fn(p)
        assert eval_piece(yp, (4, 2)) == (Fraction(8),)
        assert eval_piece(yc, (4, 2)) == (Fraction(2),)

    def test_difference_identity_up_to_norm_20(self):
        p = AffinePiece(2, 2, [[3, -2], [1, 1]], [1, 2], [1, 0], [1, 0], Guard.true())
        yp, yc = hat_fn(p)
        for x1 in range(1, 21):
            for x2 in range(21 - x1):
                if 3 * (x1 - 1) - 2 * x2 + 1 < 0:
                    continue  # off-domain for output 1
                vp = eval_piece(yp, (x1, x2))
                vc = eval_piece(yc, (x1, x2))
                base = eval_piece(p, (x1, x2))
                assert all(v >= 0 for v in vp) and all(v >= 0 for v in vc)
                assert tuple(a - b for a, b in zip(vp, vc)) == base
