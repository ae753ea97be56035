"""Backbone selection: connected dominating sets and clustered variants.

A backbone is a connected dominating set of a symmetric network together
with a root and a spanning arborescence over its members.  Rumor traffic is
collected and redistributed along that arborescence, so backbone size and
induced diameter directly bound message and round counts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .model import (
    DisconnectedError,
    ModelError,
    NetworkGraph,
    bfs_distances,
    diameter,
    is_strongly_connected,
)

BRUTE_FORCE_NODE_LIMIT = 16


class BackboneError(ValueError):
    """A proposed backbone violates domination, connectivity, or shape."""


@dataclass(frozen=True)
class Backbone:
    """A connected dominating set with a rooted spanning arborescence.

    ``parent`` maps every member to its arborescence parent (None for the
    root); parent edges are edges of the network.  ``origin`` records which
    construction produced it: "greedy", "bounded-diameter", "oracle", or
    "explicit".
    """

    members: tuple
    root: int | str
    parent: Mapping[int | str, int | str | None]
    origin: str = "explicit"

    @property
    def size(self) -> int:
        return len(self.members)

    def depth_of(self, member: int | str) -> int:
        """Hop depth of a member below the root along parent links."""
        depth = 0
        cur = self.parent[member]
        while cur is not None:
            depth += 1
            cur = self.parent[cur]
        return depth

    @property
    def max_depth(self) -> int:
        return max(self.depth_of(m) for m in self.members)

    def children_of(self, member: int | str) -> tuple:
        return tuple(sorted(m for m in self.members
                            if self.parent[m] == member))


@dataclass(frozen=True)
class ClusterAssignment:
    """Partition of backbone members into depth bands of a traversal tree.

    ``cluster_of`` maps each member to its band index; ``leaders`` maps each
    band index to its smallest member id.
    """

    cluster_of: Mapping[int | str, int]
    leaders: Mapping[int, int | str]

    @property
    def cluster_count(self) -> int:
        return len(self.leaders)


def _require_symmetric(g: NetworkGraph, what: str) -> None:
    if not g.symmetric:
        raise ModelError(f"{what} requires a symmetric network")


def _covers(g: NetworkGraph, members: Iterable) -> bool:
    covered = set(members)
    for m in list(covered):
        covered.update(g.adjacency[m])
    return covered == set(g.node_ids)


def _members_connected(g: NetworkGraph, members: set) -> bool:
    if not members:
        return False
    start = next(iter(members))
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in g.adjacency[u]:
            if v in members and v not in seen:
                seen.add(v)
                stack.append(v)
    return seen == members


def build_arborescence(g: NetworkGraph, members: Sequence,
                       root: int | str) -> dict:
    """Breadth-first spanning arborescence of the member-induced subgraph.

    Ties are broken toward smaller parent ids (parents are dequeued in BFS
    order and scan their neighbors in ascending id order).  Raises
    BackboneError if some member is unreachable from the root.
    """
    group = set(members)
    if root not in group:
        raise BackboneError(f"root {root!r} is not a member")
    parent: dict = {root: None}
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for v in g.adjacency[u]:
                if v in group and v not in parent:
                    parent[v] = u
                    nxt.append(v)
        frontier = nxt
    if len(parent) != len(group):
        missing = sorted(group - set(parent))[0]
        raise BackboneError(
            f"members are not connected: {missing!r} unreachable from root")
    return parent


def validate_backbone(g: NetworkGraph, bb: Backbone) -> None:
    """Check domination, member connectivity, and arborescence shape.

    Raises BackboneError with a specific message on the first violation.
    """
    members = bb.members
    if not members:
        raise BackboneError("backbone has no members")
    if list(members) != sorted(set(members)):
        raise BackboneError("members must be sorted and unique")
    ids = set(g.node_ids)
    for m in members:
        if m not in ids:
            raise BackboneError(f"member {m!r} is not a node of the network")
    if bb.root not in members:
        raise BackboneError(f"root {bb.root!r} is not a member")
    group = set(members)
    if not _covers(g, group):
        uncovered = sorted(set(g.node_ids) - group
                           - {v for m in group for v in g.adjacency[m]})[0]
        raise BackboneError(f"node {uncovered!r} is not dominated")
    if not _members_connected(g, group):
        raise BackboneError("members do not induce a connected subgraph")
    if set(bb.parent) != group:
        raise BackboneError("parent map must cover exactly the members")
    if bb.parent[bb.root] is not None:
        raise BackboneError("root must have no parent")
    for m in members:
        p = bb.parent[m]
        if m == bb.root:
            continue
        if p not in group:
            raise BackboneError(f"parent of {m!r} is not a member")
        if m not in g.adjacency[p]:
            raise BackboneError(f"parent link {p!r} -> {m!r} is not an edge")
    # every member must reach the root through parent links
    for m in members:
        seen = set()
        cur = m
        while cur is not None:
            if cur in seen:
                raise BackboneError("parent links contain a cycle")
            seen.add(cur)
            cur = bb.parent[cur]
        if bb.root not in seen:
            raise BackboneError(f"member {m!r} is detached from the root")


def greedy_cds(g: NetworkGraph) -> Backbone:
    """Grow a connected dominating set by repeated best-coverage picks.

    Starts from the node covering the most nodes (itself plus neighbors) and
    repeatedly blackens either one covered non-member or a covered/uncovered
    adjacent pair, whichever newly covers the most uncovered nodes.  Ties
    prefer the single pick, then smaller ids.  The chosen set stays connected
    throughout, and its size is within a (2 + ln(max_degree)) factor of the
    minimum for symmetric networks.
    """
    _require_symmetric(g, "greedy_cds")
    if not is_strongly_connected(g):
        raise DisconnectedError("greedy_cds needs a connected network")
    ids = list(g.node_ids)
    if len(ids) == 1:
        only = ids[0]
        return Backbone(members=(only,), root=only, parent={only: None},
                        origin="greedy")

    white = set(ids)
    black: set = set()
    gray: set = set()

    def blacken(u):
        white.discard(u)
        gray.discard(u)
        black.add(u)
        for v in g.adjacency[u]:
            if v in white:
                white.remove(v)
                gray.add(v)

    first = min(ids, key=lambda u: (-len({u} | set(g.adjacency[u])), u))
    blacken(first)

    while white:
        candidates = []
        for v in sorted(gray):
            single = sum(1 for w in g.adjacency[v] if w in white)
            if single:
                candidates.append((-single, 0, (v,)))
            for w in g.adjacency[v]:
                if w not in white:
                    continue
                covered = {w}
                covered.update(x for x in g.adjacency[v] if x in white)
                covered.update(x for x in g.adjacency[w] if x in white)
                candidates.append((-len(covered), 1, (v, w)))
        if not candidates:
            raise DisconnectedError("coverage stalled; network disconnected")
        _, _, pick = min(candidates)
        for u in pick:
            blacken(u)

    members = tuple(sorted(black))
    root = members[0]
    return Backbone(members=members, root=root,
                    parent=build_arborescence(g, members, root),
                    origin="greedy")


def brute_force_mcds(g: NetworkGraph) -> Backbone:
    """Exact minimum connected dominating set by exhaustive search.

    Checks candidate sets in increasing size and lexicographic order, so the
    result is the lexicographically smallest optimum.  Limited to networks
    of at most BRUTE_FORCE_NODE_LIMIT nodes.
    """
    _require_symmetric(g, "brute_force_mcds")
    ids = sorted(g.node_ids)
    n = len(ids)
    if n > BRUTE_FORCE_NODE_LIMIT:
        raise ModelError(
            f"brute_force_mcds is capped at {BRUTE_FORCE_NODE_LIMIT} nodes, "
            f"got {n}")
    if not is_strongly_connected(g):
        raise DisconnectedError("brute_force_mcds needs a connected network")
    bit = {u: 1 << i for i, u in enumerate(ids)}
    full = (1 << n) - 1
    cover = {u: bit[u] | sum(bit[v] for v in g.adjacency[u]) for u in ids}
    for size in range(1, n + 1):
        for combo in itertools.combinations(ids, size):
            mask = 0
            for u in combo:
                mask |= cover[u]
            if mask != full:
                continue
            if not _members_connected(g, set(combo)):
                continue
            root = combo[0]
            return Backbone(members=combo, root=root,
                            parent=build_arborescence(g, combo, root),
                            origin="oracle")
    raise DisconnectedError("no connected dominating set exists")


def dfs_cluster(g: NetworkGraph, members: Sequence) -> ClusterAssignment:
    """Band backbone members by depth-first tree depth in diameter-sized slabs.

    Runs an iterative DFS over the member-induced subgraph from the smallest
    member id, visiting neighbors in ascending order.  A member first reached
    at tree depth h lands in band h // diameter(network); each band's leader
    is its smallest member.
    """
    _require_symmetric(g, "dfs_cluster")
    group = set(members)
    if not group:
        raise BackboneError("cannot cluster an empty member set")
    if not _members_connected(g, group):
        raise BackboneError("members do not induce a connected subgraph")
    slab = max(1, diameter(g))
    root = min(group)
    depth_of = {root: 0}
    stack = [root]
    while stack:
        u = stack.pop()
        for v in sorted((w for w in g.adjacency[u] if w in group),
                        reverse=True):
            if v not in depth_of:
                depth_of[v] = depth_of[u] + 1
                stack.append(v)
    cluster_of = {m: depth_of[m] // slab for m in group}
    leaders: dict[int, int | str] = {}
    for m in sorted(group):
        j = cluster_of[m]
        if j not in leaders:
            leaders[j] = m
    return ClusterAssignment(cluster_of=cluster_of, leaders=leaders)


def _lex_shortest_path(g: NetworkGraph, src: int | str, dst: int | str) -> list:
    """Lexicographically smallest shortest path, as a node list src..dst."""
    dist_src = bfs_distances(g, src)
    dist_dst = bfs_distances(g, dst)
    if dst not in dist_src:
        raise DisconnectedError(f"no path {src!r} -> {dst!r}")
    path = [src]
    cur = src
    while cur != dst:
        step = min(v for v in g.adjacency[cur]
                   if dist_src.get(v) == dist_src[cur] + 1
                   and dist_dst.get(v) == dist_dst[cur] - 1)
        path.append(step)
        cur = step
    return path


def bounded_diameter_cds(g: NetworkGraph,
                         base: Backbone | None = None) -> Backbone:
    """Thicken a dominating backbone so its induced diameter stays small.

    Clusters the base members into diameter-deep DFS bands, then splices the
    lexicographically smallest shortest network paths from each band leader
    back to the base root.  The result keeps every base member, is still a
    connected dominating set, and has at most 3x the base size; its induced
    diameter is bounded by a small multiple of the network diameter because
    every member sits within one band of a leader wired straight to the root.
    """
    _require_symmetric(g, "bounded_diameter_cds")
    if base is None:
        base = greedy_cds(g)
    clusters = dfs_cluster(g, base.members)
    root = min(base.members)
    members = set(base.members)
    for j in sorted(clusters.leaders):
        leader = clusters.leaders[j]
        members.update(_lex_shortest_path(g, root, leader))
    out = tuple(sorted(members))
    return Backbone(members=out, root=root,
                    parent=build_arborescence(g, out, root),
                    origin="bounded-diameter")
