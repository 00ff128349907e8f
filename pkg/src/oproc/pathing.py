"""Candidate routes: k-shortest loopless paths and link-disjoint pairs.

Paths are ranked by hop count, ties broken by the lexicographic order of
their node sequence, so enumeration is fully deterministic.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

from .net_model import Topology


class NoPathError(LookupError):
    pass


@dataclass(frozen=True)
class Path:
    nodes: tuple
    links: tuple

    def __post_init__(self):
        if len(self.links) != len(self.nodes) - 1:
            raise ValueError("a path has exactly one link fewer than nodes")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError(f"path {self.nodes} repeats a node")

    @property
    def hop_count(self) -> int:
        return len(self.links)

    @property
    def src(self):
        return self.nodes[0]

    @property
    def dst(self):
        return self.nodes[-1]

    @property
    def key(self) -> tuple:
        return (len(self.links), self.nodes)

    def link_set(self) -> frozenset:
        return frozenset(self.links)

    def split_at(self, node) -> tuple:
        """(prefix ending at node, suffix starting at node)."""
        i = self.nodes.index(node)
        return (
            Path(self.nodes[: i + 1], self.links[:i]),
            Path(self.nodes[i:], self.links[i:]),
        )

    def __str__(self):
        return "-".join(self.nodes)


def path_from_nodes(topology: Topology, nodes) -> Path:
    nodes = tuple(nodes)
    links = tuple(topology.link_between(u, v).id for u, v in zip(nodes, nodes[1:]))
    return Path(nodes, links)


@dataclass(frozen=True)
class PathPair:
    working: Path
    protection: Path

    def __post_init__(self):
        if (self.working.src, self.working.dst) != (self.protection.src, self.protection.dst):
            raise ValueError("working and protection must share endpoints")
        if self.working.link_set() & self.protection.link_set():
            raise ValueError("working and protection share a link")

    @property
    def hop_count(self) -> int:
        return self.working.hop_count + self.protection.hop_count


def _best_path(topology: Topology, src, dst, banned_nodes, banned_links):
    """Fewest-hop path, lexicographically smallest among ties; None if unreachable."""
    if src in banned_nodes or dst in banned_nodes:
        return None

    def usable(u, v):
        return v not in banned_nodes and topology.link_between(u, v).id not in banned_links

    # hop distance to dst, then greedy walk picking the smallest admissible neighbour
    dist = {dst: 0}
    queue = deque([dst])
    while queue:
        u = queue.popleft()
        for v in topology.neighbors(u):
            if v not in dist and usable(u, v):
                dist[v] = dist[u] + 1
                queue.append(v)
    if src not in dist:
        return None
    nodes = [src]
    while nodes[-1] != dst:
        u = nodes[-1]
        nxt = min(v for v in topology.neighbors(u) if dist.get(v) == dist[u] - 1 and usable(u, v))
        nodes.append(nxt)
    return path_from_nodes(topology, nodes)


def k_shortest_paths(topology: Topology, src, dst, k: int) -> list:
    """Up to ``k`` loopless paths in (hop count, node sequence) order (Yen)."""
    if src == dst:
        raise ValueError("src and dst must differ")
    if k < 1:
        raise ValueError("k must be >= 1")
    first = _best_path(topology, src, dst, frozenset(), frozenset())
    if first is None:
        raise NoPathError(f"no path from {src!r} to {dst!r}")
    found = [first]
    heap = []
    queued = {first.nodes}
    while len(found) < k:
        last = found[-1]
        for i in range(len(last.nodes) - 1):
            root_nodes = last.nodes[: i + 1]
            spur = last.nodes[i]
            banned_links = {
                p.links[i] for p in found if len(p.nodes) > i + 1 and p.nodes[: i + 1] == root_nodes
            }
            banned_nodes = frozenset(root_nodes[:-1])
            tail = _best_path(topology, spur, dst, banned_nodes, banned_links)
            if tail is None:
                continue
            cand = Path(root_nodes + tail.nodes[1:], last.links[:i] + tail.links)
            if cand.nodes not in queued:
                queued.add(cand.nodes)
                heapq.heappush(heap, (cand.key, cand))
        if not heap:
            break
        found.append(heapq.heappop(heap)[1])
    return found


def disjoint_pairs(topology: Topology, src, dst, k: int) -> list:
    """Ordered link-disjoint (working, protection) pairs drawn from the k shortest paths."""
    paths = k_shortest_paths(topology, src, dst, k)
    pairs = []
    for i, p in enumerate(paths):
        for j, q in enumerate(paths):
            if i != j and not (p.link_set() & q.link_set()):
                pairs.append((p.hop_count + q.hop_count, i, j, PathPair(p, q)))
    pairs.sort(key=lambda t: t[:3])
    return [t[3] for t in pairs]
