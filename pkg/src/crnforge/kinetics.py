"""Stochastic kinetics: Gillespie direct method under the volume model.

Propensities follow the standard stochastic model (rate constants 1 by
default): #X for a unimolecular reaction, #X*#Y/v for distinct
bimolecular reactants and #X(#X-1)/(2v) for a doubled reactant. Only
reactions with one or two reactants are simulable; the default volume
equals the total initial molecular count (finite density constraint).

Convergence time is reported as the time of the last event that changed
the observable (output counts for a computer, the vote for a decider)
within a run; runs stopped by limits are flagged censored and excluded
from time statistics.
"""

from __future__ import annotations

import math
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import _simcore
from .core import Configuration, Crc, Crd, Crn, Reaction
from .errors import ArityError, CountBoundViolationError, UnboundedNetworkError
from .rng import Stream, stream_key


@dataclass(frozen=True)
class VolumePolicy:
    """auto: v = max(1, total initial count); fixed: the given volume."""

    mode: str = "auto"
    volume: float = 0.0

    def __post_init__(self):
        if self.mode not in ("auto", "fixed"):
            raise ValueError(f"unknown volume mode {self.mode!r}")
        if self.mode == "fixed" and not self.volume > 0:
            raise ValueError("fixed volume must be positive")

    @staticmethod
    def fixed(v: float) -> "VolumePolicy":
        return VolumePolicy("fixed", float(v))

    def resolve(self, initial_total: int) -> float:
        if self.mode == "fixed":
            return self.volume
        return float(max(1, initial_total))


AUTO_VOLUME = VolumePolicy()


@dataclass(frozen=True)
class SimLimits:
    max_events: int
    max_time: float = math.inf

    def __post_init__(self):
        if self.max_events <= 0 or not self.max_time > 0:
            raise ValueError("limits must be positive")


def default_limits(crn: Crn, n: int) -> SimLimits:
    """Generous multiple of the n log n target, so censoring signals a bug."""
    n = max(int(n), 1)
    log_term = math.ceil(math.log2(max(n, 2))) + 1
    return SimLimits(max_events=50 * n * log_term * max(len(crn.reactions), 1))


@dataclass(frozen=True)
class SimResult:
    final_config: Configuration
    terminal: bool
    events: int
    end_time: float
    last_output_change_time: float
    output: tuple[int, ...] | str
    count_peak: int
    status: str  # terminal | event-limit | time-limit

    @property
    def censored(self) -> bool:
        return not self.terminal


def propensity(rxn: Reaction, c: Configuration, v: float) -> float:
    """Closed-form propensity of one reaction in configuration c."""
    arity = rxn.num_reactants
    if arity == 0 or arity > 2:
        raise ArityError(f"kinetics needs 1 or 2 reactants, got {arity} in {rxn}")
    k = rxn.rate_constant
    if arity == 1:
        (name, _), = rxn.reactants
        return k * c.get(name)
    if len(rxn.reactants) == 2:
        (n1, _), (n2, _) = rxn.reactants
        return k * c.get(n1) * c.get(n2) / v
    (name, _), = rxn.reactants
    x = c.get(name)
    return k * 0.5 * x * (x - 1) / v


def propensity_sum(crn: Crn, c: Configuration, v: float) -> float:
    return sum(propensity(rxn, c, v) for rxn in crn.reactions)


def step(crn: Crn, c: Configuration, v: float, stream: Stream):
    """One direct-method step: (next configuration, dt, reaction index).

    Returns None when c is terminal (total propensity zero). Consumes two
    draws per step: waiting time, then reaction selection.
    """
    props = [propensity(rxn, c, v) for rxn in crn.reactions]
    total = sum(props)
    if total <= 0.0:
        return None
    dt = stream.exponential(total)
    target = stream.uniform() * total
    acc = 0.0
    chosen = 0
    for i, p in enumerate(props):
        if p > 0.0:
            acc += p
            chosen = i
            if acc >= target:
                break
    from .core import apply as apply_rxn

    return apply_rxn(c, crn.reactions[chosen]), dt, chosen


def _kernel_arrays(crn: Crn):
    R = len(crn.reactions)
    rtype = np.zeros(R, dtype=np.int8)
    ridx = np.full((R, 2), -1, dtype=np.int64)
    rates = np.zeros(R, dtype=np.float64)
    for r, rxn in enumerate(crn.reactions):
        arity = rxn.num_reactants
        if arity == 0 or arity > 2:
            raise ArityError(f"kinetics needs 1 or 2 reactants, got {arity} in {rxn}")
        rates[r] = rxn.rate_constant
        if arity == 1:
            rtype[r] = 0
            ridx[r, 0] = crn.index_of(rxn.reactants[0][0])
        elif len(rxn.reactants) == 2:
            rtype[r] = 1
            ridx[r, 0] = crn.index_of(rxn.reactants[0][0])
            ridx[r, 1] = crn.index_of(rxn.reactants[1][0])
        else:
            rtype[r] = 2
            ridx[r, 0] = crn.index_of(rxn.reactants[0][0])
    _, _, net = crn.matrices()
    return rtype, ridx, rates, net


_STATUS_NAMES = {0: "terminal", 1: "event-limit", 2: "time-limit", 3: "bound-violation"}


def simulate_config(
    crn: Crn,
    init: Configuration,
    volume: float,
    limits: SimLimits,
    key: int,
    output_species: Sequence[str] = (),
    voters: Mapping[str, int] | None = None,
    bound_total: int = -1,
) -> SimResult:
    """Run one trajectory from an explicit configuration (low-level entry)."""
    rtype, ridx, rates, net = _kernel_arrays(crn)
    net_total = net.sum(axis=1)
    counts = np.array(init.counts, dtype=np.int64)

    is_crd = voters is not None
    touches = np.zeros(len(crn.reactions), dtype=np.bool_)
    net_yes = np.zeros(len(crn.reactions), dtype=np.int64)
    net_no = np.zeros(len(crn.reactions), dtype=np.int64)
    yes0 = no0 = 0
    if is_crd:
        yes_idx = [crn.index_of(n) for n, b in voters.items() if b == 1]
        no_idx = [crn.index_of(n) for n, b in voters.items() if b == 0]
        net_yes = net[:, yes_idx].sum(axis=1) if yes_idx else net_yes
        net_no = net[:, no_idx].sum(axis=1) if no_idx else net_no
        yes0 = int(counts[yes_idx].sum()) if yes_idx else 0
        no0 = int(counts[no_idx].sum()) if no_idx else 0
    elif output_species:
        out_idx = [crn.index_of(n) for n in output_species]
        touches = (net[:, out_idx] != 0).any(axis=1)

    status, events, t, t_last, peak, vote_code = _simcore.run_gillespie(
        rtype, ridx, rates, net, net_total, touches, net_yes, net_no,
        is_crd, counts, yes0, no0, float(volume),
        np.int64(limits.max_events), float(limits.max_time),
        np.int64(bound_total), np.uint64(key),
    )
    if status == _simcore.STATUS_BOUND_VIOLATION:
        raise CountBoundViolationError(
            f"total count {peak} exceeded the declared bound {bound_total}"
        )
    final = Configuration(crn, tuple(int(x) for x in counts))
    if is_crd:
        output: tuple[int, ...] | str = {1: "yes", 0: "no", -1: "undefined"}[vote_code]
    else:
        output = tuple(int(counts[crn.index_of(n)]) for n in output_species)
    return SimResult(
        final_config=final,
        terminal=status == _simcore.STATUS_TERMINAL,
        events=int(events),
        end_time=float(t),
        last_output_change_time=float(t_last),
        output=output,
        count_peak=int(peak),
        status=_STATUS_NAMES[int(status)],
    )


def simulate(
    machine: Crc | Crd,
    x: Sequence[int],
    policy: VolumePolicy = AUTO_VOLUME,
    limits: SimLimits | None = None,
    seed: int = 0,
    stream: int = 0,
) -> SimResult:
    """Simulate a machine on input x until terminal or a limit is hit."""
    from .core import initial_configuration

    if isinstance(machine, Crc) and not machine.bounded:
        raise UnboundedNetworkError(
            "machine is flagged unbounded (search backend); kinetics undefined"
        )
    init = initial_configuration(machine, x)
    n = sum(int(v) for v in x)
    volume = policy.resolve(init.total())
    if limits is None:
        limits = default_limits(machine.crn, n)
    bound_total = -1
    if isinstance(machine, Crc) and machine.declared_count_bound is not None:
        c0, c1 = machine.declared_count_bound
        bound_total = c0 + c1 * n
    if isinstance(machine, Crd):
        return simulate_config(
            machine.crn, init, volume, limits, stream_key(seed, stream),
            voters=machine.voters,
        )
    return simulate_config(
        machine.crn, init, volume, limits, stream_key(seed, stream),
        output_species=machine.output_species, bound_total=bound_total,
    )


@dataclass(frozen=True)
class TrialRow:
    trial: int
    conv_time: float
    end_time: float
    events: int
    terminal: bool
    correct: bool | None
    count_peak: int
    output: tuple[int, ...] | str = ()


@dataclass(frozen=True)
class TrialStats:
    trials: int
    mean_conv_time: float
    median_conv_time: float
    stddev_conv_time: float
    censored_fraction: float
    fraction_terminal: float
    fraction_correct: float | None
    mean_count_peak: float
    rows: tuple[TrialRow, ...]


def worker_count() -> int:
    """Worker cap from CRNFORGE_THREADS (default 1 = sequential)."""
    try:
        return max(1, int(os.environ.get("CRNFORGE_THREADS", "1")))
    except ValueError:
        return 1


def run_trials(
    machine: Crc | Crd,
    x: Sequence[int],
    trials: int,
    seed: int = 0,
    policy: VolumePolicy = AUTO_VOLUME,
    limits: SimLimits | None = None,
    expected_output: Sequence[int] | str | None = None,
) -> TrialStats:
    """Independent seeded trials with deterministic per-trial streams.

    Trial t uses sub-stream t of the master seed, so results are
    bit-identical for a fixed (seed, trials) regardless of scheduling.
    Time statistics cover uncensored (terminal) trials only.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    expected = tuple(expected_output) if isinstance(expected_output, (list, tuple)) else expected_output

    def one(t: int) -> TrialRow:
        res = simulate(machine, x, policy=policy, limits=limits, seed=seed, stream=t)
        correct: bool | None = None
        if expected is not None:
            correct = res.terminal and res.output == expected
        return TrialRow(
            trial=t,
            conv_time=res.last_output_change_time,
            end_time=res.end_time,
            events=res.events,
            terminal=res.terminal,
            correct=correct,
            count_peak=res.count_peak,
            output=res.output,
        )

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, range(trials)))
    else:
        rows = [one(t) for t in range(trials)]

    done = [r for r in rows if r.terminal]
    conv = [r.conv_time for r in done]
    mean = statistics.fmean(conv) if conv else math.nan
    median = statistics.median(conv) if conv else math.nan
    std = statistics.pstdev(conv) if len(conv) > 1 else 0.0 if conv else math.nan
    frac_correct = None
    if expected is not None:
        frac_correct = sum(1 for r in rows if r.correct) / trials
    return TrialStats(
        trials=trials,
        mean_conv_time=mean,
        median_conv_time=median,
        stddev_conv_time=std,
        censored_fraction=1.0 - len(done) / trials,
        fraction_terminal=len(done) / trials,
        fraction_correct=frac_correct,
        mean_count_peak=statistics.fmean(r.count_peak for r in rows),
        rows=tuple(rows),
    )


def trial_rows_csv(n: int, seed: int, stats: TrialStats) -> str:
    """Per-trial CSV: n,trial,seed,conv_time,end_time,events,terminal,correct,count_peak."""
    lines = ["n,trial,seed,conv_time,end_time,events,terminal,correct,count_peak"]
    for r in stats.rows:
        correct = "" if r.correct is None else int(r.correct)
        lines.append(
            f"{n},{r.trial},{seed},{r.conv_time!r},{r.end_time!r},{r.events},"
            f"{int(r.terminal)},{correct},{r.count_peak}"
        )
    return "\n".join(lines) + "\n"
