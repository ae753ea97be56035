"""Slot-based distributed transmission: randomized rounds with and without
collision detection.

A round spans 2m slots where m = ceil(slot_factor * max_degree).  Data goes
out in the first half on a uniformly random slot per sender.  In the
collision-detecting mode, listeners that heard garbage echo an error in the
matching second-half slot and a sender only declares victory over a silent
second half.  In the acknowledgement mode, each addressed listener that
received the data picks a random second-half slot and acks; unacknowledged
listeners stay on the sender's list for the next round.

Every node owns an independent deterministic random stream derived from
(seed, node id), so runs replay bit-for-bit.  A node transmits in at most
one slot per round: data senders never echo, and ackers never send data.
"""

from __future__ import annotations

import csv
import json
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping, Sequence

from .backbone import Backbone, validate_backbone
from .central import Rumor, Batch
from .model import ModelError, NetworkGraph


class DistributedError(ValueError):
    """Invalid simulator configuration or node state."""


@dataclass(frozen=True)
class SimConfig:
    """Knobs for the slot-based simulator.

    ``slot_factor`` scales the per-half slot count (slots = ceil(slot_factor
    * max degree)).  ``degree_knowledge`` is "exact" when nodes know the true
    maximum degree and "supplied" when tests inject an estimate through
    ``supplied_max_degree``.
    """

    slot_factor: float
    mode: str = "cd"
    seed: int = 0
    max_rounds: int = 10_000
    degree_knowledge: str = "exact"
    supplied_max_degree: int | None = None

    def __post_init__(self):
        if self.slot_factor <= 0:
            raise DistributedError("slot_factor must be positive")
        if self.mode not in ("cd", "nocd"):
            raise DistributedError(f"unknown mode {self.mode!r}")
        if self.max_rounds < 1:
            raise DistributedError("max_rounds must be >= 1")
        if self.degree_knowledge not in ("exact", "supplied"):
            raise DistributedError(
                f"unknown degree_knowledge {self.degree_knowledge!r}")
        if self.degree_knowledge == "supplied":
            if not self.supplied_max_degree or self.supplied_max_degree < 1:
                raise DistributedError(
                    "degree_knowledge='supplied' needs supplied_max_degree>=1")


def node_rng(seed: int, node_id: int | str) -> random.Random:
    """Deterministic per-node stream; string seeding is process-stable."""
    return random.Random(f"{seed}:{node_id}")


def slot_count(g: NetworkGraph, cfg: SimConfig) -> int:
    """Slots per half-round under the configured degree knowledge."""
    if cfg.degree_knowledge == "supplied":
        top = cfg.supplied_max_degree
    else:
        top = g.max_degree
    return max(1, math.ceil(cfg.slot_factor * top))


@dataclass
class NodeState:
    """Mutable per-node simulator state."""

    held_rumors: set = field(default_factory=set)
    pending: deque = field(default_factory=deque)
    awaiting_ack: set = field(default_factory=set)
    rng_stream: random.Random = field(default_factory=random.Random)


def init_states(g: NetworkGraph, cfg: SimConfig) -> dict:
    return {u: NodeState(rng_stream=node_rng(cfg.seed, u))
            for u in g.node_ids}


@dataclass(frozen=True)
class SlotRecord:
    """One transmission event, for JSONL traces."""

    round: int
    slot: int
    transmitter: int | str
    kind: str  # data | error | ack
    receivers_ok: tuple
    receivers_collided: tuple

    def to_json(self) -> str:
        return json.dumps({
            "round": self.round, "slot": self.slot,
            "transmitter": self.transmitter, "kind": self.kind,
            "receivers_ok": list(self.receivers_ok),
            "receivers_collided": list(self.receivers_collided),
        }, sort_keys=True)


@dataclass(frozen=True)
class RoundLog:
    """What one simulated round did."""

    records: tuple[SlotRecord, ...]
    succeeded: frozenset
    data_messages: int
    control_messages: int
    collisions_heard: int


@dataclass(frozen=True)
class DistMetrics:
    """Aggregate outcome of a distributed run."""

    rounds: int
    data_messages: int
    control_messages: int
    retransmissions_per_node: Mapping[int | str, int]
    undelivered: frozenset
    collisions_heard: int = 0

    @property
    def delivered_everything(self) -> bool:
        return not self.undelivered

    def to_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "data_messages": self.data_messages,
            "control_messages": self.control_messages,
            "retransmissions_per_node": {
                str(k): v for k, v in
                sorted(self.retransmissions_per_node.items(), key=str)},
            "undelivered": [[node, {"source": r.source, "seq": r.seq}]
                            for node, r in sorted(self.undelivered, key=str)],
            "collisions_heard": self.collisions_heard,
        }


def dist_metrics_to_csv(metrics: DistMetrics, path: str) -> None:
    """One row per transmitting node, with run totals repeated."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "retransmissions", "rounds",
                         "data_messages", "control_messages",
                         "collisions_heard", "undelivered_count"])
        for node in sorted(metrics.retransmissions_per_node, key=str):
            writer.writerow([node, metrics.retransmissions_per_node[node],
                             metrics.rounds, metrics.data_messages,
                             metrics.control_messages,
                             metrics.collisions_heard,
                             len(metrics.undelivered)])


def _emit(trace: IO | None, record: SlotRecord) -> None:
    if trace is not None:
        trace.write(record.to_json() + "\n")


def run_round_cd(g: NetworkGraph, states: Mapping, transmitters: Iterable,
                 cfg: SimConfig, *, round_index: int = 1,
                 trace: IO | None = None) -> RoundLog:
    """One collision-detecting round.

    Each transmitter sends the front batch of its pending queue in a random
    first-half slot.  A listener hearing two or more overlapping senders in
    a slot notes a collision and, unless it transmitted data itself this
    round, echoes an error in the matching second-half slot (for the first
    collision it heard).  A sender declares success only if its entire
    second half was silent; successful senders pop their batch.  When a
    sender declares success, every neighbor that was listening during its
    slot has received the batch.
    """
    if cfg.mode != "cd":
        raise DistributedError("run_round_cd needs cfg.mode == 'cd'")
    senders = sorted(set(transmitters))
    for u in senders:
        if u not in g.adjacency:
            raise ModelError(f"unknown transmitter {u!r}")
        if not states[u].pending:
            raise DistributedError(f"transmitter {u!r} has no batch to send")
    half = slot_count(g, cfg)
    slot_of = {u: states[u].rng_stream.randint(1, half) for u in senders}

    records: list[SlotRecord] = []
    collisions_heard = 0
    first_collision: dict = {}
    for s in sorted(set(slot_of.values())):
        talking = [u for u in senders if slot_of[u] == s]
        audible: dict = {}
        for v in g.node_ids:
            if v in talking:
                continue  # deaf while transmitting
            heard = [u for u in talking if u in g.in_neighbors(v)]
            if heard:
                audible[v] = heard
        for v, heard in audible.items():
            if len(heard) == 1:
                states[v].held_rumors.update(states[heard[0]].pending[0].rumors)
            else:
                collisions_heard += 1
                first_collision.setdefault(v, s)
        for u in talking:
            ok = tuple(sorted(v for v, heard in audible.items()
                              if heard == [u]))
            bad = tuple(sorted(v for v, heard in audible.items()
                               if u in heard and len(heard) > 1))
            rec = SlotRecord(round_index, s, u, "data", ok, bad)
            records.append(rec)
            _emit(trace, rec)

    echoers = {v: half + first_collision[v] for v in first_collision
               if v not in slot_of}
    for s in sorted(set(echoers.values())):
        yelling = sorted(v for v, es in echoers.items() if es == s)
        audible = {}
        for w in g.node_ids:
            if w in yelling:
                continue
            heard = [v for v in yelling if v in g.in_neighbors(w)]
            if heard:
                audible[w] = heard
        for w, heard in audible.items():
            if len(heard) > 1:
                collisions_heard += 1
        for v in yelling:
            ok = tuple(sorted(w for w, heard in audible.items()
                              if heard == [v]))
            bad = tuple(sorted(w for w, heard in audible.items()
                               if v in heard and len(heard) > 1))
            rec = SlotRecord(round_index, s, v, "error", ok, bad)
            records.append(rec)
            _emit(trace, rec)

    succeeded = set()
    for u in senders:
        noisy = any(v in g.in_neighbors(u) for v in echoers)
        if not noisy:
            succeeded.add(u)
            states[u].pending.popleft()
    return RoundLog(records=tuple(records), succeeded=frozenset(succeeded),
                    data_messages=len(senders),
                    control_messages=len(echoers),
                    collisions_heard=collisions_heard)


def run_round_nocd(g: NetworkGraph, states: Mapping, transmitters: Iterable,
                   cfg: SimConfig, *, round_index: int = 1,
                   trace: IO | None = None) -> RoundLog:
    """One acknowledgement round.

    Each transmitter sends its front batch addressed to its awaiting_ack
    list.  Any listener with a clean reception takes the data; listeners
    that received something this round ack once in a random second-half
    slot.  An ack lands at a sender when the slot is free of the acker's
    neighborhood and of the sender's other in-neighbors, and the acker
    provably holds the whole batch; such listeners leave the list.  A
    transmitter whose list empties pops its batch.
    """
    if cfg.mode != "nocd":
        raise DistributedError("run_round_nocd needs cfg.mode == 'nocd'")
    senders = sorted(set(transmitters))
    for u in senders:
        if u not in g.adjacency:
            raise ModelError(f"unknown transmitter {u!r}")
        if not states[u].pending:
            raise DistributedError(f"transmitter {u!r} has no batch to send")
        if not states[u].awaiting_ack:
            raise DistributedError(f"transmitter {u!r} has nobody to address")
        extra = states[u].awaiting_ack - set(g.adjacency[u])
        if extra:
            raise DistributedError(
                f"transmitter {u!r} addresses non-neighbors {sorted(extra, key=str)}")
    half = slot_count(g, cfg)
    slot_of = {u: states[u].rng_stream.randint(1, half) for u in senders}

    records: list[SlotRecord] = []
    collisions_heard = 0
    got_data: set = set()
    for s in sorted(set(slot_of.values())):
        talking = [u for u in senders if slot_of[u] == s]
        audible: dict = {}
        for v in g.node_ids:
            if v in talking:
                continue
            heard = [u for u in talking if u in g.in_neighbors(v)]
            if heard:
                audible[v] = heard
        for v, heard in audible.items():
            if len(heard) == 1:
                states[v].held_rumors.update(states[heard[0]].pending[0].rumors)
                got_data.add(v)
            else:
                collisions_heard += 1
        for u in talking:
            ok = tuple(sorted(v for v, heard in audible.items()
                              if heard == [u]))
            bad = tuple(sorted(v for v, heard in audible.items()
                               if u in heard and len(heard) > 1))
            rec = SlotRecord(round_index, s, u, "data", ok, bad)
            records.append(rec)
            _emit(trace, rec)

    # every listener that received data this round acks once; ackers are
    # never simultaneously data senders, so one slot each suffices
    ackers = sorted(v for v in got_data if v not in slot_of)
    ack_slot = {v: half + states[v].rng_stream.randint(1, half)
                for v in ackers}
    listed_by = {v: [u for u in senders if v in states[u].awaiting_ack]
                 for v in ackers}
    for v in ackers:
        ok = []
        bad = []
        for u in listed_by[v]:
            rivals = [z for z in ackers
                      if z != v and ack_slot[z] == ack_slot[v]
                      and (z in g.adjacency[v] or z in g.in_neighbors(u))]
            if rivals:
                bad.append(u)
                collisions_heard += 1
            elif set(states[u].pending[0].rumors) <= states[v].held_rumors:
                ok.append(u)
                states[u].awaiting_ack.discard(v)
        rec = SlotRecord(round_index, ack_slot[v], v, "ack",
                         tuple(sorted(ok)), tuple(sorted(bad)))
        records.append(rec)
        _emit(trace, rec)

    succeeded = set()
    for u in senders:
        if not states[u].awaiting_ack:
            succeeded.add(u)
            states[u].pending.popleft()
    return RoundLog(records=tuple(records), succeeded=frozenset(succeeded),
                    data_messages=len(senders),
                    control_messages=len(ackers),
                    collisions_heard=collisions_heard)


def _chunked(rumors: Sequence[Rumor], size: int) -> list[Batch]:
    ordered = sorted(rumors)
    return [Batch(tuple(ordered[i:i + size]))
            for i in range(0, len(ordered), size)]


def _collection_stages(g: NetworkGraph, bb: Backbone,
                       rumors: Sequence[Rumor], compression: int):
    """Stages of (unit, batches, audience) triples, deepest first.

    Mirrors the centralized collection tree: non-member sources hand their
    rumors to their smallest member neighbor, then each depth band forwards
    whole subtree loads to parents.  Within a stage all units contend; a
    unit's audience is the single node that must confirm reception.
    """
    members = set(bb.members)
    parent: dict = dict(bb.parent)
    own: dict = {u: [] for u in members}
    for r in rumors:
        if r.source in members:
            own[r.source].append(r)
        else:
            hooks = [v for v in g.adjacency[r.source] if v in members]
            if not hooks:
                raise DistributedError(
                    f"source {r.source!r} has no member in reach")
            own.setdefault(r.source, [])
            own[r.source].append(r)
            parent[r.source] = min(hooks)

    children: dict = {u: set() for u in own}
    for u in own:
        p = parent[u]
        if p is not None and u != bb.root:
            children.setdefault(p, set()).add(u)

    def subtree(u) -> list[Rumor]:
        out = list(own[u])
        for v in children.get(u, ()):
            out.extend(subtree(v))
        return out

    stages = []
    outsiders = sorted(u for u in own if u not in members)
    if outsiders:
        stages.append([(u, _chunked(own[u], compression), {parent[u]})
                       for u in outsiders])
    depth = {m: bb.depth_of(m) for m in members}
    for level in range(max(depth.values()), 0, -1):
        band = []
        for m in sorted(members):
            if depth[m] != level:
                continue
            load = subtree(m)
            if load:
                band.append((m, _chunked(load, compression), {parent[m]}))
        if band:
            stages.append(band)
    return stages


def _distribution_stages(g: NetworkGraph, bb: Backbone,
                         rumors: Sequence[Rumor], compression: int):
    """Stages of (unit, batches, audience): one per (chunk, member depth).

    The sender set is pruned bottom-up like the centralized scheduler; an
    audience excludes senders at the same or smaller depth since those
    provably hold the chunk already (they relayed or are relaying it).
    """
    members = set(bb.members)
    root = bb.root
    senders = set(members)
    pruned = True
    while pruned:
        pruned = False
        for m in sorted(senders, reverse=True):
            if m == root:
                continue
            if any(bb.parent.get(x) == m for x in senders):
                continue
            rest = senders - {m}
            covered = set(rest)
            for w in rest:
                covered.update(g.adjacency[w])
            if covered == set(g.node_ids):
                senders.remove(m)
                pruned = True
                break

    depth = {root: 0}
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for v in sorted(senders):
                if bb.parent.get(v) == u and v not in depth:
                    depth[v] = depth[u] + 1
                    nxt.append(v)
        frontier = nxt

    chunks = _chunked(rumors, compression)
    stages = []
    for chunk in chunks:
        for level in range(0, max(depth.values()) + 1):
            band = []
            for m in sorted(senders):
                if depth[m] != level:
                    continue
                holders = {x for x in senders if depth[x] <= level}
                audience = {v for v in g.adjacency[m] if v not in holders}
                if audience:
                    band.append((m, [chunk], audience))
            if band:
                stages.append(band)
    return stages


def run_distributed_multibroadcast(g: NetworkGraph, bb: Backbone,
                                   sources: Sequence[int | str],
                                   compression: int, cfg: SimConfig,
                                   trace: IO | None = None) -> DistMetrics:
    """Gather all rumors to the backbone root and push them back out,
    driving every hop with the configured slot-based round routine.

    Stages run one at a time (no cross-stage pipelining): first non-member
    sources hand off to the backbone, then each depth band forwards subtree
    loads upward, then every repacked chunk ripples down band by band.
    Contention inside a stage is resolved by the randomized rounds.  When
    max_rounds runs out the metrics report whatever is still undelivered.
    """
    if compression < 1:
        raise DistributedError(
            f"compression factor must be >= 1, got {compression}")
    if not sources:
        raise DistributedError("no sources given")
    if not g.symmetric:
        raise DistributedError(
            "the distributed simulator needs a symmetric network")
    validate_backbone(g, bb)
    for s in sources:
        if s not in g.adjacency:
            raise ModelError(f"unknown source {s!r}")

    rumors = [Rumor(s, i) for i, s in enumerate(sources)]
    states = init_states(g, cfg)
    for r in rumors:
        states[r.source].held_rumors.add(r)

    run_round = run_round_cd if cfg.mode == "cd" else run_round_nocd
    stages = (_collection_stages(g, bb, rumors, compression)
              + _distribution_stages(g, bb, rumors, compression))

    rounds = 0
    data_messages = 0
    control_messages = 0
    collisions_heard = 0
    retx: dict = {}
    out_of_time = False
    for stage in stages:
        queue = {u: deque(batches) for u, batches, _ in stage}
        audience_of = {u: set(aud) for u, _, aud in stage}
        attempts: dict = {}
        for u in sorted(queue):
            states[u].pending = deque(queue[u])
            states[u].awaiting_ack = set(audience_of[u])
            retx.setdefault(u, 0)
        active = {u for u in queue if states[u].pending}
        while active:
            if rounds >= cfg.max_rounds:
                out_of_time = True
                break
            rounds += 1
            for u in active:
                key = (u, len(states[u].pending))
                attempts[key] = attempts.get(key, 0) + 1
                if attempts[key] > 1:
                    retx[u] += 1
            log = run_round(g, states, active, cfg,
                            round_index=rounds, trace=trace)
            data_messages += log.data_messages
            control_messages += log.control_messages
            collisions_heard += log.collisions_heard
            for u in log.succeeded:
                if states[u].pending:
                    states[u].awaiting_ack = set(audience_of[u])
            active = {u for u in active if states[u].pending}
        if out_of_time:
            break

    undelivered = frozenset(
        (node, r) for node in g.node_ids for r in rumors
        if r not in states[node].held_rumors)
    return DistMetrics(rounds=rounds, data_messages=data_messages,
                       control_messages=control_messages,
                       retransmissions_per_node=dict(sorted(retx.items(),
                                                            key=str)),
                       undelivered=undelivered,
                       collisions_heard=collisions_heard)
