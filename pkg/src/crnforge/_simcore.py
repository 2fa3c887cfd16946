"""JIT-compiled Gillespie direct-method kernel.

One call runs a whole trajectory: per event it recomputes all reaction
propensities (unimolecular #X, bimolecular #X*#Y/v or #X(#X-1)/(2v)),
draws the exponential waiting time and the next reaction from the
counter-based RNG, applies the stoichiometry, and tracks the last time
the observable (output counts or the vote) changed, the running total
count and its peak.

Status codes: 0 terminal, 1 event limit, 2 time limit, 3 declared
count bound exceeded.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0

STATUS_TERMINAL = 0
STATUS_EVENT_LIMIT = 1
STATUS_TIME_LIMIT = 2
STATUS_BOUND_VIOLATION = 3


@njit(cache=True, nogil=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return z ^ (z >> U64(31))


@njit(cache=True, nogil=True, inline="always")
def _raw64(key, counter):
    return _mix64(key + (counter + U64(1)) * _GOLDEN)


@njit(cache=True, nogil=True)
def raw64_nb(key, counter):
    """Exposed for cross-checking against the pure-Python rng module."""
    return _raw64(U64(key), U64(counter))


@njit(cache=True, nogil=True, inline="always")
def _uniform(key, counter):
    return float(_raw64(key, counter) >> U64(11)) * _INV53


@njit(cache=True, nogil=True, inline="always")
def _vote_of(yes_sum, no_sum):
    if yes_sum > 0 and no_sum == 0:
        return 1
    if no_sum > 0 and yes_sum == 0:
        return 0
    return -1


@njit(cache=True, nogil=True)
def run_gillespie(
    rtype,        # (R,) int8: 0 uni, 1 bi distinct, 2 bi same
    ridx,         # (R, 2) int64 species indices (second is -1 when unused)
    rates,        # (R,) float64
    net,          # (R, S) int64
    net_total,    # (R,) int64 row sums of net
    touches,      # (R,) bool: reaction can change the output counts (CRC)
    net_yes,      # (R,) int64 net change of yes-voter total (CRD)
    net_no,       # (R,) int64 net change of no-voter total (CRD)
    is_crd,       # bool
    counts,       # (S,) int64, mutated in place
    yes_sum0,     # int64 initial yes-voter total
    no_sum0,      # int64 initial no-voter total
    volume,       # float64
    max_events,   # int64
    max_time,     # float64
    bound_total,  # int64, -1 disables enforcement
    key,          # uint64 stream key
):
    R = rtype.shape[0]
    props = np.zeros(R, dtype=np.float64)
    ctr = U64(0)
    t = 0.0
    t_last = 0.0
    events = np.int64(0)
    total_count = np.int64(0)
    for s in range(counts.shape[0]):
        total_count += counts[s]
    peak = total_count
    yes_sum = yes_sum0
    no_sum = no_sum0
    vote = _vote_of(yes_sum, no_sum)
    status = STATUS_EVENT_LIMIT

    while True:
        total_prop = 0.0
        for r in range(R):
            i = ridx[r, 0]
            c = counts[i]
            if rtype[r] == 0:
                p = rates[r] * c
            elif rtype[r] == 1:
                p = rates[r] * c * counts[ridx[r, 1]] / volume
            else:
                p = rates[r] * 0.5 * c * (c - 1) / volume
            if p < 0.0:
                p = 0.0
            props[r] = p
            total_prop += p
        if total_prop <= 0.0:
            status = STATUS_TERMINAL
            break
        if events >= max_events:
            status = STATUS_EVENT_LIMIT
            break
        u1 = _uniform(key, ctr)
        ctr += U64(1)
        dt = -math.log1p(-u1) / total_prop
        if t + dt > max_time:
            t = max_time
            status = STATUS_TIME_LIMIT
            break
        t += dt
        u2 = _uniform(key, ctr)
        ctr += U64(1)
        target = u2 * total_prop
        acc = 0.0
        chosen = -1
        for r in range(R):
            if props[r] > 0.0:
                acc += props[r]
                chosen = r
                if acc >= target:
                    break
        for s in range(counts.shape[0]):
            counts[s] += net[chosen, s]
        events += 1
        total_count += net_total[chosen]
        if total_count > peak:
            peak = total_count
        if bound_total >= 0 and total_count > bound_total:
            status = STATUS_BOUND_VIOLATION
            break
        if is_crd:
            yes_sum += net_yes[chosen]
            no_sum += net_no[chosen]
            new_vote = _vote_of(yes_sum, no_sum)
            if new_vote != vote:
                vote = new_vote
                t_last = t
        elif touches[chosen]:
            t_last = t

    return status, events, t, t_last, peak, vote
