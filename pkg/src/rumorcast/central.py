"""Centralized rumor scheduling over a backbone, and round simulation.

Schedules are explicit: a tuple of rounds, each round a tuple of
transmissions (sender plus a batch of rumors).  A batch counts as one
message regardless of how many rumors it carries, up to the compression
factor.  The model is an abstract broadcast medium: every out-neighbor of a
sender hears the batch, a node may send and receive in the same round, and
two senders sharing an out-neighbor interfere at that common receiver.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .backbone import Backbone, validate_backbone
from .model import ModelError, NetworkGraph

PLANNER_ROUND_CAP = 100_000


class ScheduleError(ValueError):
    """A schedule is structurally invalid or violates causality."""


@dataclass(frozen=True, order=True)
class Rumor:
    """One rumor, identified by its source node and a sequence number."""

    source: int | str
    seq: int = 0


@dataclass(frozen=True)
class Batch:
    """A compressed bundle of rumors sent as a single message."""

    rumors: tuple[Rumor, ...]

    def __post_init__(self):
        if not self.rumors:
            raise ScheduleError("empty batch")
        if list(self.rumors) != sorted(set(self.rumors)):
            raise ScheduleError("batch rumors must be sorted and unique")

    def __len__(self) -> int:
        return len(self.rumors)


@dataclass(frozen=True)
class Transmission:
    sender: int | str
    batch: Batch


@dataclass(frozen=True)
class Schedule:
    """Rounds of simultaneous transmissions, in execution order."""

    rounds: tuple[tuple[Transmission, ...], ...]

    @property
    def makespan(self) -> int:
        return len(self.rounds)

    @property
    def message_count(self) -> int:
        return sum(len(r) for r in self.rounds)

    def rumors(self) -> frozenset[Rumor]:
        return frozenset(r for rnd in self.rounds
                         for tx in rnd for r in tx.batch.rumors)


@dataclass(frozen=True)
class Metrics:
    """Outcome of simulating a schedule."""

    messages: int
    makespan: int
    collisions: int
    delivery_time: Mapping[Rumor, Mapping[int | str, int]]

    def nodes_holding(self, rumor: Rumor) -> frozenset:
        return frozenset(self.delivery_time.get(rumor, {}))


def _batch(rumors: Iterable[Rumor]) -> Batch:
    return Batch(tuple(sorted(set(rumors))))


def _rounds_from_map(by_round: Mapping[int, list[Transmission]]) -> Schedule:
    """Assemble rounds in index order, dropping empty ones."""
    rounds = []
    for t in sorted(by_round):
        txs = by_round[t]
        if txs:
            rounds.append(tuple(sorted(txs, key=lambda tx: tx.sender)))
    return Schedule(rounds=tuple(rounds))


def _attach_member(g: NetworkGraph, bb: Backbone, node: int | str) -> int | str:
    members = set(bb.members)
    if node in members:
        return node
    hooks = [v for v in g.adjacency[node] if v in members]
    if not hooks:
        raise ScheduleError(
            f"source {node!r} has no backbone member in its reach")
    return min(hooks)


def broadcast_schedule(g: NetworkGraph, bb: Backbone,
                       source: int | str) -> Schedule:
    """Deliver one rumor from ``source`` to every node via the backbone.

    The rumor hops to the smallest reachable member if the source is not
    one, then floods member to member in breadth-first waves; every member
    transmits exactly once, which covers all dominated nodes.
    """
    validate_backbone(g, bb)
    if source not in g.adjacency:
        raise ModelError(f"unknown source {source!r}")
    rumor = Rumor(source, 0)
    members = set(bb.members)
    by_round: dict[int, list[Transmission]] = {}
    t0 = 0
    entry = _attach_member(g, bb, source)
    if entry != source:
        by_round[1] = [Transmission(source, _batch([rumor]))]
        t0 = 1
    wave = [entry]
    seen = {entry}
    depth = 0
    while wave:
        for u in wave:
            by_round.setdefault(t0 + depth + 1, []).append(
                Transmission(u, _batch([rumor])))
        nxt = []
        for u in wave:
            for v in g.adjacency[u]:
                if v in members and v not in seen:
                    seen.add(v)
                    nxt.append(v)
        wave = sorted(nxt)
        depth += 1
    return _rounds_from_map(by_round)


def multibroadcast_schedule(g: NetworkGraph, bb: Backbone,
                            sources: Sequence[int | str],
                            compression: int) -> Schedule:
    """Deliver one rumor per source to every node, batching rumors.

    At most ``compression`` rumors ride in one message.  Collection: rumors
    climb the backbone arborescence; a relay forwards a full batch as soon
    as it holds one and drains the remainder once its whole subtree has
    arrived, so a relay with s subtree rumors sends exactly
    ceil(s/compression) messages.  Distribution: the root re-packs all
    rumors into fixed chunks that ripple down the arborescence in a
    pipeline, one chunk per relay per round; members whose transmission
    would cover nobody new are pruned first.  A single source delegates to
    broadcast_schedule, with an identical message count.
    """
    c = compression
    if c < 1:
        raise ScheduleError(f"compression factor must be >= 1, got {c}")
    if not sources:
        raise ScheduleError("no sources given")
    for s in sources:
        if s not in g.adjacency:
            raise ModelError(f"unknown source {s!r}")
    if len(sources) == 1:
        return broadcast_schedule(g, bb, sources[0])
    validate_backbone(g, bb)

    members = set(bb.members)
    rumors = [Rumor(s, i) for i, s in enumerate(sources)]

    # planner units: members plus non-member sources hanging off their
    # attach member; parent links define the collection tree
    parent: dict = dict(bb.parent)
    own: dict = {u: [] for u in members}
    for r in rumors:
        if r.source in members:
            own[r.source].append(r)
        else:
            hook = _attach_member(g, bb, r.source)
            if r.source not in own:
                own[r.source] = []
                parent[r.source] = hook
            own[r.source].append(r)
    units = set(own)

    children: dict = {u: set() for u in units}
    for u in units:
        p = parent[u]
        if p is not None:
            children[p].add(u)

    expected: dict = {u: len(own[u]) for u in units}

    def subtree_total(u) -> int:
        return expected[u] + sum(subtree_total(v) for v in children[u])

    need = {u: subtree_total(u) for u in units}

    # collection: round-by-round greedy pipeline
    unsent = {u: sorted(own[u]) for u in units}
    received = {u: len(own[u]) for u in units}
    by_round: dict[int, list[Transmission]] = {}
    t = 0
    root = bb.root
    while any(u != root and (unsent[u] or received[u] < need[u])
              for u in units):
        t += 1
        if t > PLANNER_ROUND_CAP:
            raise ScheduleError("collection planner did not converge")
        arrivals: dict = {}
        for u in sorted(units):
            if u == root:
                continue
            backlog = unsent[u]
            complete = received[u] == need[u]
            if len(backlog) >= c or (complete and backlog):
                batch, unsent[u] = backlog[:c], backlog[c:]
                by_round.setdefault(t, []).append(
                    Transmission(u, _batch(batch)))
                arrivals.setdefault(parent[u], []).extend(batch)
        for p, got in arrivals.items():
            unsent[p] = sorted(unsent[p] + got)
            received[p] += len(got)
    collect_end = t

    # distribution: fixed chunks pipelined down the pruned arborescence
    ordered = sorted(rumors)
    chunk_count = -(-len(ordered) // c)
    chunks = [_batch(ordered[i * c:(i + 1) * c]) for i in range(chunk_count)]

    senders = set(members)
    pruned = True
    while pruned:
        pruned = False
        for m in sorted(senders, reverse=True):
            if m == root:
                continue
            if any(parent.get(x) == m for x in senders if x in members):
                continue  # not a leaf of the remaining sender tree
            rest = senders - {m}
            covered = set(rest)
            for w in rest:
                covered.update(g.adjacency[w])
            if covered == set(g.node_ids):
                senders.remove(m)
                pruned = True
                break

    depth_in_senders = {root: 0}
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for v in sorted(senders):
                if bb.parent.get(v) == u and v not in depth_in_senders:
                    depth_in_senders[v] = depth_in_senders[u] + 1
                    nxt.append(v)
        frontier = nxt

    for m in senders:
        for j, chunk in enumerate(chunks, start=1):
            t_send = collect_end + j + depth_in_senders[m]
            by_round.setdefault(t_send, []).append(Transmission(m, chunk))

    return _rounds_from_map(by_round)


def make_collision_free(g: NetworkGraph, sched: Schedule) -> Schedule:
    """Split each round so no two simultaneous senders share a receiver.

    Greedy coloring in ascending sender order: a transmission goes into the
    earliest sub-round where it shares no out-neighbor with any sender
    already placed there.  Message multiset and per-sender order are
    preserved; the round count grows by at most the largest interference
    set size (and never shrinks a conflict-free schedule).
    """
    out_rounds: list[tuple[Transmission, ...]] = []
    for rnd in sched.rounds:
        groups: list[list[Transmission]] = []
        group_cover: list[set] = []
        for tx in sorted(rnd, key=lambda tx: tx.sender):
            reach = set(g.adjacency[tx.sender])
            placed = False
            for i, cover in enumerate(group_cover):
                if not (cover & reach):
                    groups[i].append(tx)
                    cover |= reach
                    placed = True
                    break
            if not placed:
                groups.append([tx])
                group_cover.append(set(reach))
        out_rounds.extend(tuple(grp) for grp in groups)
    return Schedule(rounds=tuple(out_rounds))


def simulate_schedule(g: NetworkGraph, sched: Schedule,
                      *, interference: bool = False) -> Metrics:
    """Execute a schedule round by round and measure it.

    Causality is checked against interference-free holdings: every sender
    must already hold each rumor it sends, where holdings grow as if all
    receptions succeed.  With ``interference=True`` each reception that is
    jammed by a second in-neighbor transmitting in the same round counts as
    one collision (losses are counted, not propagated).  Delivery times
    record when each node actually first held each rumor; a rumor's source
    holds it at round 0.
    """
    plan_hold: dict = {u: set() for u in g.node_ids}
    actual_hold: dict = {u: set() for u in g.node_ids}
    delivery: dict[Rumor, dict] = {}
    for rnd in sched.rounds:
        for tx in rnd:
            for r in tx.batch.rumors:
                if r.source not in g.adjacency:
                    raise ScheduleError(f"rumor source {r.source!r} unknown")
                plan_hold[r.source].add(r)
                actual_hold[r.source].add(r)
                delivery.setdefault(r, {})[r.source] = 0

    collisions = 0
    for t, rnd in enumerate(sched.rounds, start=1):
        seen_senders = set()
        for tx in rnd:
            if tx.sender not in g.adjacency:
                raise ScheduleError(f"round {t}: unknown sender {tx.sender!r}")
            if tx.sender in seen_senders:
                raise ScheduleError(
                    f"round {t}: sender {tx.sender!r} transmits twice")
            seen_senders.add(tx.sender)
            missing = [r for r in tx.batch.rumors
                       if r not in plan_hold[tx.sender]]
            if missing:
                raise ScheduleError(
                    f"round {t}: sender {tx.sender!r} does not hold "
                    f"{missing[0]}")
        # receptions
        for tx in rnd:
            for v in g.adjacency[tx.sender]:
                jammed = interference and any(
                    other is not tx and v in g.adjacency[other.sender]
                    for other in rnd)
                if jammed:
                    collisions += 1
                else:
                    for r in tx.batch.rumors:
                        if r not in actual_hold[v]:
                            actual_hold[v].add(r)
                            delivery.setdefault(r, {})[v] = t
                for r in tx.batch.rumors:
                    plan_hold[v].add(r)
    frozen = {r: dict(times) for r, times in delivery.items()}
    return Metrics(messages=sched.message_count, makespan=sched.makespan,
                   collisions=collisions, delivery_time=frozen)


# --- serialization ---------------------------------------------------------

def schedule_to_dict(sched: Schedule) -> dict:
    return {"rounds": [[{"sender": tx.sender,
                         "rumors": [{"source": r.source, "seq": r.seq}
                                    for r in tx.batch.rumors]}
                        for tx in rnd]
                       for rnd in sched.rounds]}


def schedule_from_dict(data: Mapping) -> Schedule:
    try:
        rounds = tuple(
            tuple(Transmission(tx["sender"],
                               _batch(Rumor(r["source"], int(r["seq"]))
                                      for r in tx["rumors"]))
                  for tx in rnd)
            for rnd in data["rounds"])
    except (KeyError, TypeError) as exc:
        raise ScheduleError(f"malformed schedule description: {exc}") from exc
    return Schedule(rounds=rounds)


def save_schedule(sched: Schedule, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(schedule_to_dict(sched), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_schedule(path: str) -> Schedule:
    with open(path, encoding="utf-8") as fh:
        return schedule_from_dict(json.load(fh))


def schedule_to_csv(g: NetworkGraph, sched: Schedule, path: str) -> None:
    """Write one row per transmission: round, sender, batch, audience size."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["round", "sender", "batch_rumors",
                         "recipients_reached"])
        for t, rnd in enumerate(sched.rounds, start=1):
            for tx in rnd:
                rumors = "|".join(f"{r.source}:{r.seq}"
                                  for r in tx.batch.rumors)
                writer.writerow([t, tx.sender, rumors,
                                 len(g.adjacency[tx.sender])])
