"""Exhaustive schedule search for desk-scale instances.

Both searches run breadth-first over global holding states in the same
abstract full-duplex model the simulator uses without interference: a
transmission carries at most ``compression`` rumors, every out-neighbor
of the sender receives it, and simultaneous receptions all succeed.

Optimality survives two aggressive prunings.  First, only *maximal*
batches are expanded: growing a batch up to the compression cap only
grows what receivers learn, and holdings never shrink, so any schedule
can be rewritten move for move into one the restricted search visits
without getting longer.  Second, only *useful* batches are expanded
(some receiver still lacks part of the batch); a useless transmission
changes nothing.  For the round search the same monotonicity argument
shows that silence is dominated too, so every node that owns a useful
batch sends one each round and the per-round branching is the product
of per-node batch choices.

Costs still explode with node and rumor counts, so both entry points
enforce small-instance guards and a visited-state budget.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence

from .central import Batch, Rumor, Schedule, Transmission
from .model import NetworkGraph

MAX_SEARCH_NODES = 12
MAX_SEARCH_RUMORS = 6
DEFAULT_STATE_BUDGET = 2_000_000
JOINT_BRANCH_CAP = 50_000


class SearchError(ValueError):
    """The instance is too large, malformed, or has no feasible schedule."""


def _prepare(g: NetworkGraph, rumors: Sequence[Rumor], compression: int):
    """Validate inputs and compile them to bitmask form.

    Returns node ids in canonical order, the sorted rumor list (bit i of a
    holding mask is rumor i), per-node out-neighbor index tuples, the
    initial state, and the all-rumors mask.
    """
    if compression < 1:
        raise SearchError(f"compression must be >= 1, got {compression}")
    ids = g.node_ids
    if len(ids) > MAX_SEARCH_NODES:
        raise SearchError(
            f"{len(ids)} nodes exceed the search limit {MAX_SEARCH_NODES}")
    rlist = sorted(set(rumors))
    if not rlist:
        raise SearchError("no rumors to schedule")
    if len(rlist) != len(rumors):
        raise SearchError("duplicate rumors in placement")
    if len(rlist) > MAX_SEARCH_RUMORS:
        raise SearchError(
            f"{len(rlist)} rumors exceed the search limit {MAX_SEARCH_RUMORS}")
    index = {nid: i for i, nid in enumerate(ids)}
    for r in rlist:
        if r.source not in index:
            raise SearchError(f"unknown rumor source {r.source!r}")
    out_idx = tuple(tuple(index[v] for v in g.adjacency[nid]) for nid in ids)
    start = [0] * len(ids)
    for bit, r in enumerate(rlist):
        start[index[r.source]] |= 1 << bit
    full = (1 << len(rlist)) - 1
    return ids, rlist, out_idx, tuple(start), full


def _maximal_batches(mask: int, cap: int) -> tuple[int, ...]:
    """All batch masks of maximal size a holder of ``mask`` can send."""
    if mask.bit_count() <= cap:
        return (mask,)
    bits = [b for b in range(mask.bit_length()) if mask >> b & 1]
    out = []
    for combo in itertools.combinations(bits, cap):
        m = 0
        for b in combo:
            m |= 1 << b
        out.append(m)
    return tuple(out)


def _mask_to_batch(mask: int, rlist: Sequence[Rumor]) -> Batch:
    # rlist is sorted and unique, so the Batch invariant holds for free.
    return Batch(tuple(r for b, r in enumerate(rlist) if mask >> b & 1))


def min_message_schedule(g: NetworkGraph, rumors: Sequence[Rumor],
                         compression: int, *,
                         state_budget: int = DEFAULT_STATE_BUDGET) -> Schedule:
    """A schedule delivering every rumor to every node with fewest messages.

    Transmissions are serialized one per round; only the total count is
    optimal, callers must not read timing out of the witness.  Raises
    SearchError when some node can never receive some rumor.
    """
    ids, rlist, out_idx, start, full = _prepare(g, rumors, compression)
    if all(m == full for m in start):
        return Schedule(rounds=())
    parent: dict = {start: None}
    frontier = [start]
    while frontier:
        nxt = []
        for st in frontier:
            for u, outs in enumerate(out_idx):
                if not st[u] or not outs:
                    continue
                for bm in _maximal_batches(st[u], compression):
                    if not any(bm & ~st[v] for v in outs):
                        continue
                    new = list(st)
                    for v in outs:
                        new[v] |= bm
                    tnew = tuple(new)
                    if tnew in parent:
                        continue
                    parent[tnew] = (st, u, bm)
                    if len(parent) > state_budget:
                        raise SearchError("message search exceeded its "
                                          f"state budget {state_budget}")
                    if all(m == full for m in tnew):
                        return _serial_witness(parent, tnew, ids, rlist)
                    nxt.append(tnew)
        frontier = nxt
    raise SearchError("no schedule can deliver every rumor to every node")


def _serial_witness(parent: dict, state, ids, rlist) -> Schedule:
    moves = []
    while parent[state] is not None:
        state, u, bm = parent[state]
        moves.append(Transmission(ids[u], _mask_to_batch(bm, rlist)))
    moves.reverse()
    return Schedule(rounds=tuple((tx,) for tx in moves))


def min_makespan_schedule(g: NetworkGraph, rumors: Sequence[Rumor],
                          compression: int, *,
                          state_budget: int = DEFAULT_STATE_BUDGET) -> Schedule:
    """A schedule delivering every rumor to every node in fewest rounds.

    Message count in the witness is incidental: every node that can still
    teach a neighbor something transmits every round.
    """
    ids, rlist, out_idx, start, full = _prepare(g, rumors, compression)
    if all(m == full for m in start):
        return Schedule(rounds=())
    parent: dict = {start: None}
    frontier = [start]
    while frontier:
        nxt = []
        for st in frontier:
            options = []
            for u, outs in enumerate(out_idx):
                if not st[u] or not outs:
                    continue
                useful = [bm for bm in _maximal_batches(st[u], compression)
                          if any(bm & ~st[v] for v in outs)]
                if useful:
                    options.append((u, useful))
            if not options:
                continue
            width = 1
            for _, choices in options:
                width *= len(choices)
            if width > JOINT_BRANCH_CAP:
                raise SearchError(
                    f"round branching {width} exceeds cap {JOINT_BRANCH_CAP}")
            senders = tuple(u for u, _ in options)
            for combo in itertools.product(*(c for _, c in options)):
                new = list(st)
                for u, bm in zip(senders, combo):
                    for v in out_idx[u]:
                        new[v] |= bm
                tnew = tuple(new)
                if tnew in parent:
                    continue
                parent[tnew] = (st, senders, combo)
                if len(parent) > state_budget:
                    raise SearchError("round search exceeded its "
                                      f"state budget {state_budget}")
                if all(m == full for m in tnew):
                    return _round_witness(parent, tnew, ids, rlist)
                nxt.append(tnew)
        frontier = nxt
    raise SearchError("no schedule can deliver every rumor to every node")


def _round_witness(parent: dict, state, ids, rlist) -> Schedule:
    rounds = []
    while parent[state] is not None:
        state, senders, combo = parent[state]
        rounds.append(tuple(
            Transmission(ids[u], _mask_to_batch(bm, rlist))
            for u, bm in zip(senders, combo)))
    rounds.reverse()
    return Schedule(rounds=tuple(rounds))
