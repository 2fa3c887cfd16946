"""Propensities, the direct-method kernel, trial statistics, determinism."""

import math
import os
import random
import statistics
from fractions import Fraction

import pytest

from crnforge import _simcore
from crnforge.core import Configuration, Crc, Crn, Reaction, is_terminal
from crnforge.errors import ArityError, CountBoundViolationError, UnboundedNetworkError
from crnforge.kinetics import (
    SimLimits,
    VolumePolicy,
    default_limits,
    propensity,
    propensity_sum,
    run_trials,
    simulate,
    simulate_config,
    step,
    trial_rows_csv,
)
from crnforge.rng import Stream, mix64, raw64, stream_key

H10 = sum(1 / i for i in range(1, 11))
H100 = sum(1 / i for i in range(1, 101))


def crn_of(*lines):
    rxns = [Reaction.parse(line) for line in lines]
    species = sorted({n for r in rxns for n in r.species_names()})
    return Crn(species, rxns)


class TestRng:
    def test_python_matches_kernel(self):
        import numpy as np

        for key in (0, 1, 42, 2**63, 2**64 - 1):
            for ctr in (0, 1, 7, 1000):
                got = int(_simcore.raw64_nb(np.uint64(key), np.uint64(ctr)))
                assert raw64(key, ctr) == got

    def test_streams_distinct(self):
        keys = {stream_key(5, t) for t in range(100)}
        assert len(keys) == 100
        assert stream_key(5, 1) != stream_key(6, 1)

    def test_uniform_range(self):
        s = Stream(stream_key(9))
        draws = [s.uniform() for _ in range(1000)]
        assert all(0.0 <= u < 1.0 for u in draws)
        assert 0.4 < statistics.fmean(draws) < 0.6

    def test_mix64_spreads(self):
        outs = {mix64(z) for z in range(1, 200)}
        assert len(outs) == 199
        assert mix64(1) != mix64(2)


class TestPropensity:
    def test_unimolecular(self):
        crn = crn_of("X -> 2 Y")
        c = Configuration.from_dict(crn, {"X": 7})
        assert propensity(crn.reactions[0], c, 123.0) == 7.0

    def test_bimolecular_same(self):
        crn = crn_of("2 X -> Y")
        c = Configuration.from_dict(crn, {"X": 5})
        assert propensity(crn.reactions[0], c, 10.0) == pytest.approx(1.0)

    def test_bimolecular_distinct_zero(self):
        crn = crn_of("X + Y -> Z")
        c = Configuration.from_dict(crn, {"Y": 4})
        assert propensity(crn.reactions[0], c, 1.0) == 0.0

    def test_higher_order_rejected(self):
        crn = crn_of("3 X -> Y")
        c = Configuration.from_dict(crn, {"X": 5})
        with pytest.raises(ArityError):
            propensity(crn.reactions[0], c, 1.0)
        with pytest.raises(ArityError):
            simulate_config(crn, c, 1.0, SimLimits(10), 0)

    def test_closed_forms_random_triples(self):
        # exact-arithmetic cross-check of the closed forms
        rng = random.Random(314159)
        for _ in range(1000):
            kind = rng.randrange(3)
            k = rng.choice([1.0, 0.5, 2.0])
            v = rng.randrange(1, 50)
            x = rng.randrange(0, 40)
            y = rng.randrange(0, 40)
            if kind == 0:
                crn = Crn(["X", "Y"], [Reaction({"X": 1}, {"Y": 1}, k)])
                expect = Fraction(k) * x
            elif kind == 1:
                crn = Crn(["X", "Y", "Z"], [Reaction({"X": 1, "Y": 1}, {"Z": 1}, k)])
                expect = Fraction(k) * x * y / v
            else:
                crn = Crn(["X", "Y"], [Reaction({"X": 2}, {"Y": 1}, k)])
                expect = Fraction(k) * x * (x - 1) / (2 * v)
            c = Configuration.from_dict(crn, {"X": x, "Y": y})
            assert propensity(crn.reactions[0], c, float(v)) == pytest.approx(
                float(expect), rel=1e-12
            )

    def test_sum_zero_iff_terminal(self):
        crn = crn_of("X + Y -> Z", "Z -> X")
        for x in range(3):
            for y in range(3):
                for z in range(3):
                    c = Configuration.from_dict(crn, {"X": x, "Y": y, "Z": z})
                    assert (propensity_sum(crn, c, 5.0) == 0.0) == is_terminal(crn, c)


class TestStep:
    def test_single_reaction_chosen(self):
        crn = crn_of("X -> Y")
        c = Configuration.from_dict(crn, {"X": 1})
        nxt = step(crn, c, 1.0, Stream(stream_key(0)))
        assert nxt is not None
        new_c, dt, idx = nxt
        assert idx == 0 and dt > 0 and new_c.as_dict() == {"Y": 1}

    def test_terminal_returns_none(self):
        crn = crn_of("X -> Y")
        c = Configuration.from_dict(crn, {"Y": 3})
        assert step(crn, c, 1.0, Stream(stream_key(0))) is None

    def test_selection_frequency_three_to_one(self):
        # propensities 3 and 1: first chosen 75% of the time
        crn = crn_of("X -> Y", "Z -> Y")
        c = Configuration.from_dict(crn, {"X": 3, "Z": 1})
        stream = Stream(stream_key(2024))
        hits = 0
        trials = 10_000
        for _ in range(trials):
            _, _, idx = step(crn, c, 1.0, stream)
            hits += idx == 0
        assert abs(hits / trials - 0.75) < 0.02


class TestSimulate:
    def test_death_process_mean(self):
        crn = crn_of("X -> 0")
        times = []
        for t in range(10_000):
            res = simulate_config(
                crn,
                Configuration.from_dict(crn, {"X": 1}),
                1.0,
                default_limits(crn, 1),
                stream_key(8, t),
            )
            times.append(res.end_time)
        assert abs(statistics.fmean(times) - 1.0) < 0.05

    def test_unary_conversion_harmonic_mean(self):
        crn = crn_of("X -> 2 Y")
        times = []
        for t in range(3_000):
            res = simulate_config(
                crn,
                Configuration.from_dict(crn, {"X": 100}),
                100.0,
                default_limits(crn, 100),
                stream_key(9, t),
            )
            times.append(res.end_time)
        assert abs(statistics.fmean(times) - H100) < 0.15

    def test_leader_coupon_collector(self):
        crn = crn_of("L + X -> L + X'")
        times = []
        for t in range(3_000):
            res = simulate_config(
                crn,
                Configuration.from_dict(crn, {"L": 1, "X": 10}),
                10.0,
                default_limits(crn, 10),
                stream_key(10, t),
            )
            times.append(res.end_time)
        assert abs(statistics.fmean(times) - 10 * H10) < 1.5

    def test_censoring_via_event_limit(self):
        crn = crn_of("X -> Y", "Y -> X")
        res = simulate_config(
            crn, Configuration.from_dict(crn, {"X": 1}), 1.0, SimLimits(1), 3
        )
        assert not res.terminal and res.events == 1 and res.status == "event-limit"

    def test_time_limit(self):
        crn = crn_of("X -> Y", "Y -> X")
        res = simulate_config(
            crn,
            Configuration.from_dict(crn, {"X": 1}),
            1.0,
            SimLimits(10**9, max_time=2.5),
            3,
        )
        assert not res.terminal and res.end_time == 2.5 and res.status == "time-limit"

    def test_volume_policy(self):
        assert VolumePolicy().resolve(0) == 1.0
        assert VolumePolicy().resolve(17) == 17.0
        assert VolumePolicy.fixed(3.5).resolve(100) == 3.5

    def test_kernel_terminality_matches_model(self):
        # the kernel stops on zero total propensity; the discrete model
        # must agree that the final configuration is terminal
        for lines, init in [
            (("2 X -> Y",), {"X": 9}),
            (("X1 -> Z1 + Y", "X2 -> Z2 + Y", "Z1 + Z2 -> K", "K + Y -> 0"),
             {"X1": 4, "X2": 7}),
            (("X1 + X2 -> B", "X1 + B -> X1 + Y", "B + Y -> 2 B"), {"X1": 5, "X2": 3}),
        ]:
            crn = crn_of(*lines)
            c = Configuration.from_dict(crn, init)
            res = simulate_config(crn, c, 10.0, default_limits(crn, 12), 99)
            assert res.terminal
            assert is_terminal(crn, res.final_config)
            assert propensity_sum(crn, res.final_config, 10.0) == 0.0

    def test_machine_interface_and_conv_time(self):
        crn = crn_of("2 X -> Y")
        crc = Crc(crn, ("X",), ("Y",))
        res = simulate(crc, (9,), seed=12)
        assert res.terminal and res.output == (4,)
        assert 0 < res.last_output_change_time <= res.end_time

    def test_decider_vote_output(self):
        from crnforge.compiler import compile_threshold

        d = compile_threshold((1, -1), "<", 0)
        assert simulate(d, (3, 5), seed=1).output == "yes"
        assert simulate(d, (5, 3), seed=1).output == "no"

    def test_declared_bound_enforced(self):
        crn = crn_of("X -> 3 Y")
        crc = Crc(crn, ("X",), ("Y",), declared_count_bound=(0, 1))
        with pytest.raises(CountBoundViolationError):
            simulate(crc, (5,), seed=0)

    def test_unbounded_refused(self):
        crn = crn_of("X -> 2 X", "X -> Y")
        crc = Crc(crn, ("X",), ("Y",), bounded=False)
        with pytest.raises(UnboundedNetworkError):
            simulate(crc, (1,), seed=0)


class TestKernelAgainstStep:
    def test_trajectories_bit_identical(self):
        # step() draws (waiting time, selection) in the same order as the
        # kernel, so replaying the same stream must reproduce the whole
        # trajectory: events, end time, final configuration, count peak
        cases = [
            (("2 X -> Y",), {"X": 12}),
            (("X1 -> Z1 + Y", "X2 -> Z2 + Y", "Z1 + Z2 -> K", "K + Y -> 0"),
             {"X1": 5, "X2": 4}),
            (("X1 + X2 -> B", "X1 + B -> X1 + Y", "B + Y -> 2 B"),
             {"X1": 6, "X2": 3}),
        ]
        for lines, init in cases:
            crn = crn_of(*lines)
            start = Configuration.from_dict(crn, init)
            for key in (3, 77, 2024):
                fast = simulate_config(crn, start, 7.0, default_limits(crn, 20), key)
                stream = Stream(key)
                c = start
                t = 0.0
                events = 0
                peak = c.total()
                while True:
                    nxt = step(crn, c, 7.0, stream)
                    if nxt is None:
                        break
                    c, dt, _ = nxt
                    t += dt
                    events += 1
                    peak = max(peak, c.total())
                assert fast.events == events
                assert fast.final_config == c
                assert fast.end_time == t
                assert fast.count_peak == peak


class TestTrials:
    def test_stable_computation_always_correct(self):
        crn = crn_of("X -> 2 Y")
        crc = Crc(crn, ("X",), ("Y",))
        stats = run_trials(crc, (3,), 100, seed=6, expected_output=(6,))
        assert stats.fraction_correct == 1.0
        assert stats.censored_fraction == 0.0

    def test_single_trial_matches_stream_zero(self):
        crn = crn_of("2 X -> Y")
        crc = Crc(crn, ("X",), ("Y",))
        stats = run_trials(crc, (8,), 1, seed=77)
        solo = simulate(crc, (8,), seed=77, stream=0)
        assert stats.rows[0].end_time == solo.end_time
        assert stats.rows[0].events == solo.events

    def test_bit_identical_statistics(self):
        crn = crn_of("2 X -> Y")
        crc = Crc(crn, ("X",), ("Y",))
        a = run_trials(crc, (20,), 50, seed=5)
        b = run_trials(crc, (20,), 50, seed=5)
        assert a == b
        assert trial_rows_csv(20, 5, a) == trial_rows_csv(20, 5, b)

    def test_threaded_merge_matches_sequential(self):
        crn = crn_of("2 X -> Y")
        crc = Crc(crn, ("X",), ("Y",))
        sequential = run_trials(crc, (12,), 40, seed=3)
        os.environ["CRNFORGE_THREADS"] = "4"
        try:
            threaded = run_trials(crc, (12,), 40, seed=3)
        finally:
            os.environ["CRNFORGE_THREADS"] = "1"
        assert threaded == sequential

    def test_censored_excluded_from_means(self):
        # a ping-pong network never terminates; all trials censor
        crn = Crn(["X", "Y", "W"], [Reaction.parse("X -> Y"), Reaction.parse("Y -> X")])
        machine = Crc(crn, ("X",), ("W",))
        stats = run_trials(machine, (1,), 5, seed=1, limits=SimLimits(3))
        assert stats.censored_fraction == 1.0
        assert math.isnan(stats.mean_conv_time)
