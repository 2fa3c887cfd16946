"""JIT-compiled reachability engine.

explore(): breadth-first closure of the reachable configuration set
under a node budget, storing configurations as int16 count rows in an
open-addressing hash table (keys hashed over the full count vector).

analyze(): iterative Tarjan condensation over the closed graph, then a
single pass in SCC emission order (children first) folds, per SCC, the
set of observable values in its forward closure (saturating at "more
than one") and whether a correct output-stable SCC is reachable. A
configuration is output-stable iff its SCC folds to exactly one defined
value; the verdict data returned per node drives the verifier report.

Observable values are packed into one int64: up to four output counts
of 16 bits each for computers, or the vote (1 yes, 0 no, -2 undefined)
for deciders.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64
_FNV_OFFSET = U64(0xCBF29CE484222325)
_FNV_PRIME = U64(0x100000001B3)

EXPLORE_OK = 0
EXPLORE_CAP = 1
EXPLORE_COUNT_RANGE = 2

VOTE_UNDEF_KEY = np.int64(-2)
_KEY_NONE = np.int64(-(2**62))


@njit(cache=True, nogil=True, inline="always")
def _hash_vec(vec):
    h = _FNV_OFFSET
    for i in range(vec.shape[0]):
        h = (h ^ U64(vec[i] + 1)) * _FNV_PRIME
        h = h ^ (h >> U64(29))
    return h


@njit(cache=True, nogil=True, inline="always")
def _find_slot(table, nodes, vec):
    """Slot of vec in the table: either its entry or the first empty slot."""
    mask = U64(table.shape[0] - 1)
    slot = _hash_vec(vec) & mask
    while True:
        idx = table[slot]
        if idx < 0:
            return slot
        row = nodes[idx]
        same = True
        for i in range(vec.shape[0]):
            if row[i] != vec[i]:
                same = False
                break
        if same:
            return slot
        slot = (slot + U64(1)) & mask


@njit(cache=True, nogil=True)
def explore(re_ptr, re_sp, re_co, net, init, cap, table_bits):
    """BFS closure from init. Returns

    (status, nodes, n, parent, via, edges, depth, level_sizes)

    nodes is an (allocated, S) int16 array whose first n rows are the
    discovered configurations in BFS order; parent/via give a shortest
    derivation (reaction index sequence) for each node.
    """
    S = init.shape[0]
    R = re_ptr.shape[0] - 1
    table = np.full(1 << table_bits, -1, dtype=np.int64)
    capacity = 1024 if cap > 1024 else int(cap)
    nodes = np.zeros((capacity, S), dtype=np.int16)
    parent = np.full(capacity, -1, dtype=np.int64)
    via = np.full(capacity, -1, dtype=np.int32)

    scratch = np.zeros(S, dtype=np.int64)
    for i in range(S):
        if init[i] > 32000:
            return EXPLORE_COUNT_RANGE, nodes, 0, parent, via, np.int64(0), 0, np.zeros(1, np.int64)
        scratch[i] = init[i]
        nodes[0, i] = np.int16(init[i])
    slot = _find_slot(table, nodes, scratch)
    table[slot] = 0
    n = 1

    level_sizes = np.zeros(64, dtype=np.int64)
    level_sizes[0] = 1
    depth = 0
    level_end = 1
    edges = np.int64(0)
    status = EXPLORE_OK

    head = 0
    while head < n:
        if head == level_end:
            depth += 1
            level_end = n
        for r in range(R):
            ok = True
            for e in range(re_ptr[r], re_ptr[r + 1]):
                if nodes[head, re_sp[e]] < re_co[e]:
                    ok = False
                    break
            if not ok:
                continue
            edges += 1
            overflow = False
            for i in range(S):
                val = np.int64(nodes[head, i]) + net[r, i]
                if val > 32000:
                    overflow = True
                scratch[i] = val
            if overflow:
                return EXPLORE_COUNT_RANGE, nodes, n, parent, via, edges, depth, level_sizes[: depth + 1]
            slot = _find_slot(table, nodes, scratch)
            if table[slot] < 0:
                if n >= cap:
                    return EXPLORE_CAP, nodes, n, parent, via, edges, depth, level_sizes[: depth + 1]
                if n >= capacity:
                    new_capacity = capacity * 2
                    if new_capacity > cap:
                        new_capacity = int(cap)
                    grown = np.zeros((new_capacity, S), dtype=np.int16)
                    grown[:n] = nodes[:n]
                    nodes = grown
                    grown_p = np.full(new_capacity, -1, dtype=np.int64)
                    grown_p[:n] = parent[:n]
                    parent = grown_p
                    grown_v = np.full(new_capacity, -1, dtype=np.int32)
                    grown_v[:n] = via[:n]
                    via = grown_v
                    capacity = new_capacity
                for i in range(S):
                    nodes[n, i] = np.int16(scratch[i])
                parent[n] = head
                via[n] = r
                table[slot] = n
                if depth + 1 >= level_sizes.shape[0]:
                    bigger = np.zeros(level_sizes.shape[0] * 2, dtype=np.int64)
                    bigger[: level_sizes.shape[0]] = level_sizes
                    level_sizes = bigger
                level_sizes[depth + 1] += 1
                n += 1
        head += 1
    return status, nodes, n, parent, via, edges, depth, level_sizes[: depth + 2]


@njit(cache=True, nogil=True)
def _node_keys(nodes, n, is_crd, obs_idx, yes_idx, no_idx):
    keys = np.zeros(n, dtype=np.int64)
    if is_crd:
        for v in range(n):
            yes = 0
            for t in range(yes_idx.shape[0]):
                yes += nodes[v, yes_idx[t]]
            no = 0
            for t in range(no_idx.shape[0]):
                no += nodes[v, no_idx[t]]
            if yes > 0 and no == 0:
                keys[v] = 1
            elif no > 0 and yes == 0:
                keys[v] = 0
            else:
                keys[v] = VOTE_UNDEF_KEY
    else:
        for v in range(n):
            k = np.int64(0)
            for t in range(obs_idx.shape[0]):
                k |= np.int64(nodes[v, obs_idx[t]]) << np.int64(16 * t)
            keys[v] = k
    return keys


@njit(cache=True, nogil=True)
def analyze(
    nodes, n, re_ptr, re_sp, re_co, net, table_bits,
    is_crd, obs_idx, yes_idx, no_idx, correct_key,
):
    """Condensation + stability fold. Returns per-node arrays

    (scc_id, stable, reach_correct, value_key)

    stable[v]: v is output-stable; value_key[v]: the folded observable of
    v's forward closure (only meaningful when stable); reach_correct[v]:
    some correct output-stable configuration is reachable from v.
    """
    S = nodes.shape[1]
    R = re_ptr.shape[0] - 1
    # Rebuild the hash table (explore() does not return it).
    table = np.full(1 << table_bits, -1, dtype=np.int64)
    scratch = np.zeros(S, dtype=np.int64)
    for v in range(n):
        for i in range(S):
            scratch[i] = nodes[v, i]
        table[_find_slot(table, nodes, scratch)] = v

    keys = _node_keys(nodes, n, is_crd, obs_idx, yes_idx, no_idx)

    # Iterative Tarjan over on-the-fly successors.
    index = np.full(n, -1, dtype=np.int64)
    low = np.zeros(n, dtype=np.int64)
    onstk = np.zeros(n, dtype=np.bool_)
    scc_id = np.full(n, -1, dtype=np.int64)
    tstack = np.zeros(n, dtype=np.int64)
    tsp = 0
    dfs_v = np.zeros(n, dtype=np.int64)
    dfs_r = np.zeros(n, dtype=np.int64)
    next_index = 0
    scc_count = 0

    for root in range(n):
        if index[root] >= 0:
            continue
        dfs_v[0] = root
        dfs_r[0] = 0
        dsp = 1
        index[root] = next_index
        low[root] = next_index
        next_index += 1
        tstack[tsp] = root
        tsp += 1
        onstk[root] = True
        while dsp > 0:
            v = dfs_v[dsp - 1]
            r = dfs_r[dsp - 1]
            if r < R:
                dfs_r[dsp - 1] = r + 1
                ok = True
                for e in range(re_ptr[r], re_ptr[r + 1]):
                    if nodes[v, re_sp[e]] < re_co[e]:
                        ok = False
                        break
                if ok:
                    for i in range(S):
                        scratch[i] = np.int64(nodes[v, i]) + net[r, i]
                    w = table[_find_slot(table, nodes, scratch)]
                    if index[w] < 0:
                        index[w] = next_index
                        low[w] = next_index
                        next_index += 1
                        tstack[tsp] = w
                        tsp += 1
                        onstk[w] = True
                        dfs_v[dsp] = w
                        dfs_r[dsp] = 0
                        dsp += 1
                    elif onstk[w]:
                        if index[w] < low[v]:
                            low[v] = index[w]
            else:
                dsp -= 1
                if low[v] == index[v]:
                    while True:
                        w = tstack[tsp - 1]
                        tsp -= 1
                        onstk[w] = False
                        scc_id[w] = scc_count
                        if w == v:
                            break
                    scc_count += 1
                if dsp > 0:
                    u = dfs_v[dsp - 1]
                    if low[v] < low[u]:
                        low[u] = low[v]

    # Group members by SCC (emission order: all successors of an SCC have
    # smaller ids, so processing ids ascending folds children first).
    counts = np.zeros(scc_count, dtype=np.int64)
    for v in range(n):
        counts[scc_id[v]] += 1
    offsets = np.zeros(scc_count + 1, dtype=np.int64)
    for c in range(scc_count):
        offsets[c + 1] = offsets[c] + counts[c]
    cursor = offsets[:scc_count].copy()
    members = np.zeros(n, dtype=np.int64)
    for v in range(n):
        c = scc_id[v]
        members[cursor[c]] = v
        cursor[c] += 1

    merged = np.full(scc_count, _KEY_NONE, dtype=np.int64)
    multi = np.zeros(scc_count, dtype=np.bool_)
    reach_ok = np.zeros(scc_count, dtype=np.bool_)
    stable = np.zeros(scc_count, dtype=np.bool_)

    for c in range(scc_count):
        mk = _KEY_NONE
        is_multi = False
        reach = False
        for m in range(offsets[c], offsets[c + 1]):
            v = members[m]
            kv = keys[v]
            if mk == _KEY_NONE:
                mk = kv
            elif mk != kv:
                is_multi = True
            for r in range(R):
                ok = True
                for e in range(re_ptr[r], re_ptr[r + 1]):
                    if nodes[v, re_sp[e]] < re_co[e]:
                        ok = False
                        break
                if not ok:
                    continue
                for i in range(S):
                    scratch[i] = np.int64(nodes[v, i]) + net[r, i]
                w = table[_find_slot(table, nodes, scratch)]
                cw = scc_id[w]
                if cw != c:
                    if multi[cw]:
                        is_multi = True
                    elif mk == _KEY_NONE:
                        mk = merged[cw]
                    elif merged[cw] != mk:
                        is_multi = True
                    if reach_ok[cw]:
                        reach = True
        merged[c] = mk
        multi[c] = is_multi
        ok_stable = not is_multi
        if is_crd and mk == VOTE_UNDEF_KEY:
            ok_stable = False
        stable[c] = ok_stable
        if ok_stable and mk == correct_key:
            reach = True
        reach_ok[c] = reach

    node_stable = np.zeros(n, dtype=np.bool_)
    node_reach = np.zeros(n, dtype=np.bool_)
    node_value = np.zeros(n, dtype=np.int64)
    for v in range(n):
        c = scc_id[v]
        node_stable[v] = stable[c]
        node_reach[v] = reach_ok[c]
        node_value[v] = merged[c]
    return scc_id, node_stable, node_reach, node_value
