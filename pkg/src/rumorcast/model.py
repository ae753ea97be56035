"""Radio network model: nodes with transmit power, obstacles, directed reach.

A node u reaches node v when the Euclidean distance d(u, v) is at most
u's transmission radius power**(1/alpha) and the open segment between them
does not properly cross any obstacle segment.  Reach is directed: unequal
powers give asymmetric links.  When every node has the same power the graph
is symmetric (a unit-disk graph scaled to that radius).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

GEOM_EPS = 1e-9

ALPHA_MIN = 2.0
ALPHA_MAX = 4.0


class ModelError(ValueError):
    """Invalid model input (bad exponent, duplicate ids, unknown node...)."""


class DisconnectedError(ModelError):
    """Raised when an operation needs a connected graph and gets none."""


@dataclass(frozen=True)
class NodeSpec:
    """A radio node: identifier, planar position, transmit power."""

    id: int | str
    x: float
    y: float
    power: float

    def radius(self, alpha: float) -> float:
        """Transmission radius under path-loss exponent alpha."""
        return self.power ** (1.0 / alpha)


@dataclass(frozen=True)
class Obstacle:
    """An opaque wall segment from (x1, y1) to (x2, y2)."""

    x1: float
    y1: float
    x2: float
    y2: float


def _orient_sign(ax: float, ay: float, bx: float, by: float,
                 cx: float, cy: float) -> int:
    """Sign of the cross product (b - a) x (c - a), 0 within GEOM_EPS."""
    cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    if cross > GEOM_EPS:
        return 1
    if cross < -GEOM_EPS:
        return -1
    return 0


def segments_properly_cross(px1: float, py1: float, px2: float, py2: float,
                            qx1: float, qy1: float, qx2: float, qy2: float) -> bool:
    """True when two segments cross at a single interior point of both.

    Touching at an endpoint or overlapping collinearly does not count: only
    a strict straddle in both directions blocks a radio link.
    """
    o1 = _orient_sign(px1, py1, px2, py2, qx1, qy1)
    o2 = _orient_sign(px1, py1, px2, py2, qx2, qy2)
    if o1 * o2 >= 0:
        return False
    o3 = _orient_sign(qx1, qy1, qx2, qy2, px1, py1)
    o4 = _orient_sign(qx1, qy1, qx2, qy2, px2, py2)
    return o3 * o4 < 0


def _link_blocked(a: NodeSpec, b: NodeSpec, obstacles: Sequence[Obstacle]) -> bool:
    for ob in obstacles:
        if segments_properly_cross(a.x, a.y, b.x, b.y,
                                   ob.x1, ob.y1, ob.x2, ob.y2):
            return True
    return False


@dataclass(frozen=True)
class NetworkGraph:
    """A directed reachability graph over radio nodes.

    ``adjacency`` maps each node id to its out-neighbors sorted by id.
    ``symmetric`` reports whether every link is bidirectional, which holds
    automatically when all powers are equal (``uniform_power``).
    """

    nodes: tuple[NodeSpec, ...]
    obstacles: tuple[Obstacle, ...]
    alpha: float
    adjacency: Mapping[int | str, tuple[int | str, ...]]
    strict: bool = False
    _in_neighbors: Mapping[int | str, tuple[int | str, ...]] = field(
        repr=False, default_factory=dict)

    @property
    def node_ids(self) -> tuple[int | str, ...]:
        return tuple(sorted(self.adjacency))

    @property
    def uniform_power(self) -> bool:
        powers = {n.power for n in self.nodes}
        return len(powers) <= 1

    @property
    def combinatorial(self) -> bool:
        """True for graphs built from explicit adjacency without geometry.

        Geometric construction rejects non-positive powers, so the
        zero-power placeholder records of ``from_adjacency`` identify
        these graphs unambiguously.
        """
        return all(n.power == 0 for n in self.nodes)

    @property
    def symmetric(self) -> bool:
        for u, outs in self.adjacency.items():
            for v in outs:
                if u not in self.adjacency[v]:
                    return False
        return True

    def node(self, node_id: int | str) -> NodeSpec:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise ModelError(f"unknown node id {node_id!r}")

    def out_neighbors(self, node_id: int | str) -> tuple[int | str, ...]:
        try:
            return self.adjacency[node_id]
        except KeyError:
            raise ModelError(f"unknown node id {node_id!r}") from None

    def in_neighbors(self, node_id: int | str) -> tuple[int | str, ...]:
        if node_id not in self.adjacency:
            raise ModelError(f"unknown node id {node_id!r}")
        return self._in_neighbors.get(node_id, ())

    def degree(self, node_id: int | str) -> int:
        """Out-degree of a node."""
        return len(self.out_neighbors(node_id))

    @property
    def max_degree(self) -> int:
        return max((len(v) for v in self.adjacency.values()), default=0)

    @classmethod
    def from_adjacency(cls, adjacency: Mapping[int | str, Iterable[int | str]],
                       *, alpha: float = 2.0) -> "NetworkGraph":
        """Build a graph directly from an explicit adjacency mapping.

        Synthesizes degenerate node records (zero position and power) so the
        combinatorial operations work without geometry.  Every referenced
        neighbor must itself be a key.
        """
        adj: dict[int | str, tuple[int | str, ...]] = {}
        for u, outs in adjacency.items():
            outs = tuple(sorted(set(outs)))
            for v in outs:
                if v not in adjacency:
                    raise ModelError(f"neighbor {v!r} of {u!r} is not a node")
                if v == u:
                    raise ModelError(f"self-loop on {u!r}")
            adj[u] = outs
        nodes = tuple(NodeSpec(i, 0.0, 0.0, 0.0) for i in sorted(adj))
        return cls(nodes=nodes, obstacles=(), alpha=alpha,
                   adjacency=adj, _in_neighbors=_invert(adj))


def _invert(adj: Mapping[int | str, tuple[int | str, ...]]) -> dict:
    inn: dict[int | str, list] = {u: [] for u in adj}
    for u, outs in adj.items():
        for v in outs:
            inn[v].append(u)
    return {u: tuple(sorted(vs)) for u, vs in inn.items()}


def build_network(nodes: Sequence[NodeSpec],
                  obstacles: Sequence[Obstacle] = (),
                  alpha: float = 2.0,
                  *, strict: bool = False) -> NetworkGraph:
    """Construct the directed reachability graph for a node placement.

    An edge (u, v) exists when d(u, v) <= u.radius(alpha) and no obstacle
    properly crosses the segment u-v.  By default the boundary is inclusive
    up to GEOM_EPS; with ``strict=True`` links exactly at the radius are
    excluded instead.

    Raises ModelError for alpha outside [2, 4], duplicate ids, or
    non-positive powers.
    """
    if not ALPHA_MIN <= alpha <= ALPHA_MAX:
        raise ModelError(f"alpha must lie in [{ALPHA_MIN}, {ALPHA_MAX}], "
                         f"got {alpha}")
    seen: set[int | str] = set()
    for n in nodes:
        if n.id in seen:
            raise ModelError(f"duplicate node id {n.id!r}")
        seen.add(n.id)
        if n.power <= 0:
            raise ModelError(f"node {n.id!r} has non-positive power {n.power}")

    obstacles = tuple(obstacles)
    adj: dict[int | str, tuple[int | str, ...]] = {}
    for u in nodes:
        reach = u.radius(alpha)
        outs = []
        for v in nodes:
            if v.id == u.id:
                continue
            dist = math.hypot(v.x - u.x, v.y - u.y)
            if strict:
                in_range = dist < reach - GEOM_EPS
            else:
                in_range = dist <= reach + GEOM_EPS
            if in_range and not _link_blocked(u, v, obstacles):
                outs.append(v.id)
        adj[u.id] = tuple(sorted(outs))
    return NetworkGraph(nodes=tuple(nodes), obstacles=obstacles, alpha=alpha,
                        adjacency=adj, strict=strict,
                        _in_neighbors=_invert(adj))


def hop_distance(g: NetworkGraph, src: int | str, dst: int | str) -> int | None:
    """Directed hop count from src to dst by BFS, or None if unreachable."""
    if src not in g.adjacency or dst not in g.adjacency:
        raise ModelError("hop_distance got an unknown node id")
    if src == dst:
        return 0
    dist = {src: 0}
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for v in g.adjacency[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    if v == dst:
                        return dist[v]
                    nxt.append(v)
        frontier = nxt
    return None


def bfs_distances(g: NetworkGraph, src: int | str) -> dict[int | str, int]:
    """Directed hop counts from src to every reachable node."""
    dist = {src: 0}
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for v in g.adjacency[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def diameter(g: NetworkGraph) -> int:
    """Largest finite hop distance over all ordered node pairs.

    Raises DisconnectedError naming an unreachable pair if one exists.
    A single-node graph has diameter 0.
    """
    ids = g.node_ids
    if not ids:
        raise ModelError("diameter of an empty graph")
    best = 0
    for u in ids:
        dist = bfs_distances(g, u)
        if len(dist) != len(ids):
            missing = next(v for v in ids if v not in dist)
            raise DisconnectedError(
                f"graph is not strongly connected: no path {u!r} -> {missing!r}")
        best = max(best, max(dist.values()))
    return best


def is_strongly_connected(g: NetworkGraph) -> bool:
    ids = g.node_ids
    if not ids:
        return True
    for u in ids:
        if len(bfs_distances(g, u)) != len(ids):
            return False
    return True


def conflict_set(g: NetworkGraph, within: Iterable[int | str],
                 node_id: int | str) -> frozenset:
    """Nodes of ``within`` whose transmissions can collide with node_id's.

    Restricted to the subgraph induced by ``within``: w conflicts with u
    when some common node of ``within`` hears both, i.e. w has an edge into
    one of u's out-neighbors inside ``within``.  The result never contains
    node_id itself and its size is at most D*(D-1) for D the maximum in- or
    out-degree of the induced subgraph.
    """
    group = set(within)
    if node_id not in group:
        raise ModelError(f"node {node_id!r} is not in the given group")
    for w in group:
        if w not in g.adjacency:
            raise ModelError(f"unknown node id {w!r}")
    rivals: set[int | str] = set()
    for v in g.adjacency[node_id]:
        if v not in group:
            continue
        for w in g.in_neighbors(v):
            if w != node_id and w in group:
                rivals.add(w)
    return frozenset(rivals)


# --- serialization ---------------------------------------------------------

def network_to_dict(g: NetworkGraph) -> dict:
    """JSON form: geometric (nodes/obstacles) or explicit adjacency.

    Combinatorial graphs have no meaningful geometry, so they serialize
    as ``adjacency`` pairs instead; ``network_from_dict`` accepts either
    shape.
    """
    if g.combinatorial:
        return {"alpha": g.alpha,
                "adjacency": [[u, list(g.adjacency[u])]
                              for u in g.node_ids]}
    return {
        "alpha": g.alpha,
        "strict": g.strict,
        "nodes": [{"id": n.id, "x": n.x, "y": n.y, "power": n.power}
                  for n in g.nodes],
        "obstacles": [{"x1": o.x1, "y1": o.y1, "x2": o.x2, "y2": o.y2}
                      for o in g.obstacles],
    }


def network_from_dict(data: Mapping) -> NetworkGraph:
    if "adjacency" in data:
        if "nodes" in data or "obstacles" in data:
            raise ModelError(
                "explicit adjacency excludes nodes and obstacles")
        try:
            adj = {u: outs for u, outs in data["adjacency"]}
            alpha = float(data.get("alpha", 2.0))
        except (TypeError, ValueError) as exc:
            raise ModelError(
                f"malformed network description: {exc}") from exc
        return NetworkGraph.from_adjacency(adj, alpha=alpha)
    try:
        nodes = [NodeSpec(n["id"], float(n["x"]), float(n["y"]),
                          float(n["power"]))
                 for n in data["nodes"]]
        obstacles = [Obstacle(float(o["x1"]), float(o["y1"]),
                              float(o["x2"]), float(o["y2"]))
                     for o in data.get("obstacles", [])]
        alpha = float(data.get("alpha", 2.0))
        strict = bool(data.get("strict", False))
    except (KeyError, TypeError) as exc:
        raise ModelError(f"malformed network description: {exc}") from exc
    return build_network(nodes, obstacles, alpha, strict=strict)


def save_network(g: NetworkGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(network_to_dict(g), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_network(path: str) -> NetworkGraph:
    with open(path, encoding="utf-8") as fh:
        return network_from_dict(json.load(fh))
