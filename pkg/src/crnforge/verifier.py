"""Exhaustive bounded reachability analysis: the ground-truth oracle.

check_stable_computation() certifies, per input, the reachability
definition of stable computation: every reachable configuration can
reach an output-stable configuration with the oracle's output counts,
and no reachable output-stable configuration disagrees with the oracle.
check_stable_decision() is the analogue with the unanimous vote in
place of output counts. Both raise CapExceededError rather than
silently truncating; the error reports per-depth growth to help tell
undersized caps apart from genuinely unbounded networks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _reachcore
from .core import Configuration, Crc, Crd, Crn, initial_configuration
from .errors import (
    CapExceededError,
    CountOverflowError,
    IllFormedFunctionError,
    TotalityError,
)

DEFAULT_CAP = 2_000_000


@dataclass
class ReachGraph:
    """Closure of the reachable set with shortest-derivation back-pointers."""

    crn: Crn
    root: Configuration
    cap: int
    nodes: np.ndarray  # (n, S) int16, BFS discovery order
    parent: np.ndarray
    via: np.ndarray
    edges: int
    depth: int
    level_sizes: tuple[int, ...]
    table_bits: int

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    def config(self, i: int) -> Configuration:
        return Configuration(self.crn, tuple(int(v) for v in self.nodes[i]))

    def trace_to(self, i: int) -> list[int]:
        """Reaction-index sequence from the root to node i (replayable)."""
        steps: list[int] = []
        while self.parent[i] >= 0:
            steps.append(int(self.via[i]))
            i = int(self.parent[i])
        steps.reverse()
        return steps


def replay(crn: Crn, init: Configuration, trace: Sequence[int]) -> Configuration:
    """Apply a reaction-index sequence; validates a counterexample trace."""
    from .core import apply as apply_rxn

    c = init
    for r in trace:
        c = apply_rxn(c, crn.reactions[r])
    return c


def _sparse_reactants(crn: Crn):
    re_m, _, net = crn.matrices()
    ptr = [0]
    sp: list[int] = []
    co: list[int] = []
    for r in range(re_m.shape[0]):
        for s in np.nonzero(re_m[r])[0]:
            sp.append(int(s))
            co.append(int(re_m[r, s]))
        ptr.append(len(sp))
    return (
        np.array(ptr, dtype=np.int64),
        np.array(sp, dtype=np.int64),
        np.array(co, dtype=np.int64),
        net,
    )


def _table_bits(cap: int) -> int:
    return max(8, math.ceil(math.log2(2 * cap)))


def reachable_set(crn: Crn, init: Configuration, cap: int = DEFAULT_CAP) -> ReachGraph:
    """Breadth-first closure; errors if more than cap nodes would be needed."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    re_ptr, re_sp, re_co, net = _sparse_reactants(crn)
    bits = _table_bits(cap)
    init_vec = np.array(init.counts, dtype=np.int64)
    status, nodes, n, parent, via, edges, depth, levels = _reachcore.explore(
        re_ptr, re_sp, re_co, net, init_vec, np.int64(cap), bits
    )
    if status == _reachcore.EXPLORE_COUNT_RANGE:
        raise CountOverflowError(
            "a reachable count exceeded the verifier's 16-bit storage range"
        )
    if status == _reachcore.EXPLORE_CAP:
        growth = ", ".join(str(int(v)) for v in levels[-6:])
        raise CapExceededError(
            f"state space exceeds cap {cap} at depth {depth} "
            f"(nodes per recent BFS depth: {growth}); raise --cap if the "
            f"network is bounded but large",
            nodes=n,
            depth=depth,
            level_sizes=[int(v) for v in levels],
        )
    sizes = [int(v) for v in levels]
    while sizes and sizes[-1] == 0:
        sizes.pop()
    return ReachGraph(
        crn=crn,
        root=init,
        cap=cap,
        nodes=nodes[:n].copy(),
        parent=parent[:n].copy(),
        via=via[:n].copy(),
        edges=int(edges),
        depth=int(depth),
        level_sizes=tuple(sizes),
        table_bits=bits,
    )


def _analyze(graph: ReachGraph, is_crd: bool, obs_idx, yes_idx, no_idx, correct_key: int):
    re_ptr, re_sp, re_co, net = _sparse_reactants(graph.crn)
    return _reachcore.analyze(
        graph.nodes, graph.size, re_ptr, re_sp, re_co, net, graph.table_bits,
        is_crd,
        np.array(obs_idx, dtype=np.int64),
        np.array(yes_idx, dtype=np.int64),
        np.array(no_idx, dtype=np.int64),
        np.int64(correct_key),
    )


def _pack_outputs(values: Sequence[int]) -> int:
    if len(values) > 4:
        raise ValueError("verifier packs at most 4 output species")
    key = 0
    for t, v in enumerate(values):
        if not 0 <= v < (1 << 16):
            raise CountOverflowError("output count beyond 16-bit packing range")
        key |= int(v) << (16 * t)
    return key


def output_stable_set(graph: ReachGraph, crc: Crc) -> list[Configuration]:
    """Configurations whose entire forward closure keeps the output counts."""
    obs_idx = [graph.crn.index_of(n) for n in crc.output_species]
    _, stable, _, _ = _analyze(graph, False, obs_idx, [], [], 0)
    return [graph.config(i) for i in np.nonzero(stable)[0]]


@dataclass(frozen=True)
class Counterexample:
    input: tuple[int, ...]
    config: dict[str, int]
    reason: str  # wrong-stable-output-reachable | correct-stable-unreachable
    trace: tuple[int, ...]
    observed: tuple[int, ...] | str | None = None


@dataclass(frozen=True)
class InputStats:
    input: tuple[int, ...]
    nodes: int
    edges: int


@dataclass
class VerifyReport:
    verdict: str  # pass | fail
    counterexample: Counterexample | None = None
    stats: list[InputStats] = field(default_factory=list)
    skipped: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json_dict(self) -> dict:
        doc: dict = {
            "verdict": self.verdict,
            "stats": [
                {"input": list(s.input), "nodes": s.nodes, "edges": s.edges}
                for s in self.stats
            ],
        }
        if self.skipped:
            doc["skipped_inputs"] = [list(x) for x in self.skipped]
        if self.counterexample is not None:
            ce = self.counterexample
            doc["counterexample"] = {
                "input": list(ce.input),
                "configuration": ce.config,
                "reason": ce.reason,
                "trace": list(ce.trace),
                "observed": list(ce.observed)
                if isinstance(ce.observed, tuple)
                else ce.observed,
            }
        return doc

    def render_text(self) -> str:
        lines = [f"verdict: {self.verdict}"]
        total_nodes = sum(s.nodes for s in self.stats)
        lines.append(
            f"inputs checked: {len(self.stats)} "
            f"(total {total_nodes} configurations explored)"
        )
        if self.skipped:
            lines.append(f"inputs skipped (oracle undefined): {len(self.skipped)}")
        if self.counterexample is not None:
            ce = self.counterexample
            lines.append(f"counterexample at input {ce.input}: {ce.reason}")
            if ce.observed is not None:
                lines.append(f"  observed output: {ce.observed}")
            lines.append(f"  configuration: {ce.config}")
            lines.append(f"  trace (reaction indices from initial): {list(ce.trace)}")
        return "\n".join(lines) + "\n"


def _first_violation(graph: ReachGraph, stable, reach, value, correct_key):
    """(node, reason, observed_key) for the earliest-discovered violation."""
    wrong = np.nonzero(stable & (value != correct_key))[0]
    if wrong.size:
        i = int(wrong[0])
        return i, "wrong-stable-output-reachable", int(value[i])
    missing = np.nonzero(~reach)[0]
    if missing.size:
        i = int(missing[0])
        return i, "correct-stable-unreachable", None
    return None


def _unpack_outputs(key: int, l: int) -> tuple[int, ...]:
    return tuple((key >> (16 * t)) & 0xFFFF for t in range(l))


def check_stable_computation(
    crc: Crc,
    oracle: Callable[[Sequence[int]], Sequence[int]],
    inputs: Iterable[Sequence[int]],
    cap: int = DEFAULT_CAP,
    allow_partial: bool = False,
) -> VerifyReport:
    """Certify stable computation of oracle() on every given input."""
    from .errors import UnboundedNetworkError

    if not crc.bounded:
        raise UnboundedNetworkError("cannot exhaustively verify an unbounded machine")
    obs_idx = [crc.crn.index_of(n) for n in crc.output_species]
    report = VerifyReport(verdict="pass")
    for x in inputs:
        x = tuple(int(v) for v in x)
        try:
            expected = tuple(oracle(x))
        except (TotalityError, IllFormedFunctionError):
            if allow_partial:
                report.skipped.append(x)
                continue
            raise
        correct_key = _pack_outputs(expected)
        graph = reachable_set(crc.crn, initial_configuration(crc, x), cap)
        _, stable, reach, value = _analyze(graph, False, obs_idx, [], [], correct_key)
        report.stats.append(InputStats(x, graph.size, graph.edges))
        hit = _first_violation(graph, stable, reach, value, correct_key)
        if hit is not None:
            i, reason, observed_key = hit
            observed = (
                _unpack_outputs(observed_key, len(obs_idx))
                if observed_key is not None
                else None
            )
            report.verdict = "fail"
            report.counterexample = Counterexample(
                input=x,
                config=graph.config(i).as_dict(),
                reason=reason,
                trace=tuple(graph.trace_to(i)),
                observed=observed,
            )
            return report
    return report


def check_stable_decision(
    crd: Crd,
    oracle: Callable[[Sequence[int]], bool],
    inputs: Iterable[Sequence[int]],
    cap: int = DEFAULT_CAP,
    allow_partial: bool = False,
) -> VerifyReport:
    """Certify stable decision of a predicate on every given input."""
    yes_idx = [crd.crn.index_of(n) for n, b in sorted(crd.voters.items()) if b == 1]
    no_idx = [crd.crn.index_of(n) for n, b in sorted(crd.voters.items()) if b == 0]
    report = VerifyReport(verdict="pass")
    for x in inputs:
        x = tuple(int(v) for v in x)
        try:
            expected = bool(oracle(x))
        except (TotalityError, IllFormedFunctionError):
            if allow_partial:
                report.skipped.append(x)
                continue
            raise
        correct_key = 1 if expected else 0
        graph = reachable_set(crd.crn, initial_configuration(crd, x), cap)
        _, stable, reach, value = _analyze(graph, True, [], yes_idx, no_idx, correct_key)
        report.stats.append(InputStats(x, graph.size, graph.edges))
        hit = _first_violation(graph, stable, reach, value, correct_key)
        if hit is not None:
            i, reason, observed_key = hit
            observed = None
            if observed_key is not None:
                observed = {1: "yes", 0: "no"}.get(observed_key, "undefined")
            report.verdict = "fail"
            report.counterexample = Counterexample(
                input=x,
                config=graph.config(i).as_dict(),
                reason=reason,
                trace=tuple(graph.trace_to(i)),
                observed=observed,
            )
            return report
    return report


def inputs_up_to_norm(k: int, max_norm: int) -> list[tuple[int, ...]]:
    """All x in N^k with ||x||_1 <= max_norm, ordered by norm then lex."""
    if k == 0:
        return [()]
    out: list[tuple[int, ...]] = []

    def compositions(prefix: tuple[int, ...], remaining: int, slots: int):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for v in range(remaining + 1):
            compositions(prefix + (v,), remaining - v, slots - 1)

    for total in range(max_norm + 1):
        compositions((), total, k)
    return out
