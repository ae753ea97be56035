"""Named test networks: random unit-disk graphs, the hub-and-ring stress
case, the star-with-tail timing case, and a three-tier covering reduction.

All generators are deterministic: equal inputs give equal graphs.
"""

from __future__ import annotations

import math
import random
from typing import Sequence

from .model import (
    NetworkGraph,
    NodeSpec,
    Obstacle,
    bfs_distances,
    build_network,
    is_strongly_connected,
)


class FixtureError(ValueError):
    """A generator could not produce the requested network."""


def gen_random_udg(n: int, radius: float, area_side: float = 1.0,
                   seed: int = 0, connect_retry: int = 50,
                   alpha: float = 2.0) -> NetworkGraph:
    """Uniform points in a square with one shared radio radius.

    Resamples up to connect_retry times until the graph is connected.
    Equal power makes every link symmetric.
    """
    if n < 1:
        raise FixtureError(f"need at least one node, got {n}")
    if radius <= 0 or area_side <= 0:
        raise FixtureError("radius and area_side must be positive")
    rng = random.Random(seed)
    power = radius ** alpha
    for _ in range(max(1, connect_retry)):
        nodes = [NodeSpec(i, rng.uniform(0, area_side),
                          rng.uniform(0, area_side), power)
                 for i in range(n)]
        g = build_network(nodes, alpha=alpha)
        if is_strongly_connected(g):
            return g
    raise FixtureError(
        f"no connected placement of {n} nodes in {connect_retry} tries; "
        f"increase radius (currently {radius})")


def gen_ring_fixture(ring_size: int) -> NetworkGraph:
    """Hub-and-ring network whose diameter is always 4.

    ring_size outer nodes form a cycle, each with a pendant tip, and a hub
    touches every outer node. The tips force every outer node into any
    connected dominating set, so the smallest one is the full outer cycle,
    whose own hop-diameter grows with ring_size while the graph's stays 4.
    Built as explicit adjacency; the layout is structural, not geometric.
    """
    if ring_size < 6:
        raise FixtureError(f"ring_size must be >= 6, got {ring_size}")
    adj: dict = {"hub": [f"o{i}" for i in range(ring_size)]}
    for i in range(ring_size):
        adj[f"o{i}"] = ["hub", f"o{(i - 1) % ring_size}",
                        f"o{(i + 1) % ring_size}", f"t{i}"]
        adj[f"t{i}"] = [f"o{i}"]
    return NetworkGraph.from_adjacency(adj)


def gen_star_path(k: int, d: int) -> tuple[NetworkGraph, list]:
    """Star of k source leaves plus a tail of d hops from the center.

    The tail's far end is named "r"; the graph's diameter is d + 1 and the
    best possible gossip makespan is ceil(k/c) + d.
    """
    if k < 1 or d < 1:
        raise FixtureError("k and d must be >= 1")
    tail = [f"t{i}" for i in range(1, d)] + ["r"]
    sources = [f"p{i}" for i in range(1, k + 1)]
    adj: dict = {"c": sources + [tail[0]]}
    for name in sources:
        adj[name] = ["c"]
    chain = ["c"] + tail
    for idx, cur in enumerate(tail, start=1):
        adj[cur] = [chain[idx - 1]]
        if idx + 1 < len(chain):
            adj[cur].append(chain[idx + 1])
    return NetworkGraph.from_adjacency(adj), sources


def gen_set_cover_reduction(universe, subsets: Sequence,
                            gossip_k: int = 1) -> tuple[NetworkGraph, list]:
    """Three-tier covering network realized with powers and obstacles.

    Sources sit far above with just enough power to reach every middle-tier
    node and nothing below; middle-tier nodes share a large power that
    reaches each other and the whole bottom tier; bottom-tier nodes are
    mute. A short wall across each non-member (middle, bottom) segment
    removes exactly the links outside the membership relation, so message
    flow is sources -> middle tier -> covered elements.
    """
    universe = set(universe)
    if not universe:
        raise FixtureError("universe must be non-empty")
    if gossip_k < 1:
        raise FixtureError("gossip_k must be >= 1")
    covered = set()
    for s in subsets:
        extra = set(s) - universe
        if extra:
            raise FixtureError(f"subset values outside universe: {sorted(map(str, extra))}")
        covered |= set(s)
    if covered != universe:
        raise FixtureError(
            f"subsets do not cover the universe; missing {sorted(map(str, universe - covered))}")
    elems = sorted(universe, key=str)
    if len(elems) > 99:
        raise FixtureError("at most 99 distinct elements supported")
    spacing = 100.0
    m = len(subsets)
    ground_span = spacing * (m - 1) + len(elems) + 2
    half_span = spacing * (m - 1) / 2 + gossip_k + 1
    height = (half_span + ground_span) ** 2 + 1

    nodes = [NodeSpec(f"elem{i}", float(i), 0.0, 0.5 ** 2)
             for i in range(len(elems))]
    nodes += [NodeSpec(f"set{j}", spacing * j, 1.0, ground_span ** 2)
              for j in range(m)]
    reach = math.hypot(half_span, height - 1) + 0.001
    sources = [f"src{t}" for t in range(gossip_k)]
    nodes += [NodeSpec(name, spacing * (m - 1) / 2 + t, height, reach ** 2)
              for t, name in enumerate(sources)]

    index_of = {v: i for i, v in enumerate(elems)}
    walls = []
    for j, s in enumerate(subsets):
        members = {index_of[v] for v in set(s)}
        for i in range(len(elems)):
            if i not in members:
                center = (spacing * j + i) / 2
                walls.append(Obstacle(center - 0.2, 0.5, center + 0.2, 0.5))
    return build_network(nodes, walls, alpha=2.0), sources


def gen_leaf_source_path() -> tuple[NetworkGraph, str]:
    """Four-node path with the rumor starting at an end node.

    The smallest backbone is the two middle nodes, and broadcasting from
    the leaf costs one extra hand-off message.
    """
    g = NetworkGraph.from_adjacency(
        {"a": ["b"], "b": ["a", "c"], "c": ["b", "d"], "d": ["c"]})
    return g, "a"


def gen_internal_source_path() -> tuple[NetworkGraph, str]:
    """Same path, rumor starting on a backbone node: no hand-off needed."""
    g, _ = gen_leaf_source_path()
    return g, "b"


def pick_sources(g: NetworkGraph, count: int) -> list:
    """Deterministic well-spread source pick, diametral endpoint first.

    Starting from an endpoint of a longest shortest path keeps the graph
    diameter a valid floor on any gossip makespan; the rest are chosen by
    farthest-point insertion with id tie-breaks.
    """
    ids = list(g.node_ids)
    if not 1 <= count <= len(ids):
        raise FixtureError(f"need 1..{len(ids)} sources, got {count}")
    dist = {u: bfs_distances(g, u) for u in ids}
    best = None
    for u in ids:
        for v, d in dist[u].items():
            if best is None or d > best[0]:
                best = (d, u, v)
    chosen = [best[1]]
    while len(chosen) < count:
        candidates = sorted(
            (u for u in ids if u not in chosen),
            key=lambda u: (-min(dist[c].get(u, 0) for c in chosen), str(u)))
        chosen.append(candidates[0])
    return chosen
