"""Zone partitions, connected-partition enumeration and cut costs."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Protocol, Sequence

from .errors import ParameterError, TopologyError


class ZoneGraph(Protocol):
    vertices: tuple[int, ...]

    @property
    def edges(self) -> list[tuple[int, int]]: ...


@dataclass(frozen=True)
class SimpleGraph:
    vertices: tuple[int, ...]
    edge_list: tuple[tuple[int, int], ...]

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted(tuple(sorted(e)) for e in self.edge_list)


def _adjacency(graph: ZoneGraph) -> dict[int, set[int]]:
    adj = {v: set() for v in graph.vertices}
    for i, j in graph.edges:
        adj[i].add(j)
        adj[j].add(i)
    return adj


@dataclass(frozen=True)
class Partition:
    """Zone -> cluster label map with canonical labels 1..n.

    Labels are ordered by the smallest zone id in each cluster, so two
    partitions with the same clusters compare equal.
    """

    assignment: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = dict(self.assignment)
        if len(pairs) != len(self.assignment):
            raise ParameterError("zone assigned more than once")
        relabel = {}
        for z in sorted(pairs):
            relabel.setdefault(pairs[z], len(relabel) + 1)
        object.__setattr__(self, "assignment", tuple((z, relabel[pairs[z]]) for z in sorted(pairs)))

    @classmethod
    def from_clusters(cls, clusters: Iterable[Iterable[int]]) -> "Partition":
        return cls(tuple((z, c) for c, members in enumerate(clusters, start=1) for z in members))

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, int]) -> "Partition":
        return cls(tuple(mapping.items()))

    @property
    def mapping(self) -> dict[int, int]:
        return dict(self.assignment)

    @property
    def n(self) -> int:
        return max((c for _, c in self.assignment), default=0)

    @property
    def zones(self) -> tuple[int, ...]:
        return tuple(z for z, _ in self.assignment)

    @property
    def clusters(self) -> list[tuple[int, ...]]:
        out = [[] for _ in range(self.n)]
        for z, c in self.assignment:
            out[c - 1].append(z)
        return [tuple(c) for c in out]

    def crossing_edges(self, graph: ZoneGraph) -> list[tuple[int, int]]:
        m = self.mapping
        return [e for e in graph.edges if m[e[0]] != m[e[1]]]

    def in_cluster_edges(self, graph: ZoneGraph) -> list[tuple[int, int]]:
        m = self.mapping
        return [e for e in graph.edges if m[e[0]] == m[e[1]]]

    def is_connected(self, graph: ZoneGraph) -> bool:
        adj = _adjacency(graph)
        return all(_is_connected_set(c, adj) for c in self.clusters)

    def __str__(self):
        return ",".join("{" + ",".join(map(str, c)) + "}" for c in self.clusters)

    def to_text(self) -> str:
        return "".join(f"{z} -> {c}\n" for z, c in self.assignment)

    @classmethod
    def from_text(cls, text: str) -> "Partition":
        pairs = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                z, c = (int(t) for t in line.split("->"))
            except ValueError:
                raise ParameterError(f"line {lineno}: expected 'zone_id -> cluster_label'") from None
            pairs.append((z, c))
        return cls(tuple(pairs))

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "Partition":
        return cls.from_text(Path(path).read_text())


def _is_connected_set(nodes: Sequence[int], adj: Mapping[int, set[int]]) -> bool:
    nodes = set(nodes)
    if not nodes:
        return False
    start = next(iter(nodes))
    seen, stack = {start}, [start]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u in nodes and u not in seen:
                seen.add(u)
                stack.append(u)
    return seen == nodes


def _connected_sets_with_root(root: int, allowed: frozenset, adj) -> Iterable[frozenset]:
    """All connected vertex sets containing ``root`` inside ``allowed``.

    Standard extension scheme: grow from the current set using a frontier
    and a banned set so each subset is produced once.
    """

    def grow(current: frozenset, frontier: frozenset, banned: frozenset):
        yield current
        banned = set(banned)
        for v in sorted(frontier):
            new_frontier = (frontier | (adj[v] & allowed)) - current - {v} - banned
            yield from grow(current | {v}, frozenset(new_frontier), frozenset(banned))
            banned.add(v)

    yield from grow(frozenset([root]), frozenset(adj[root] & allowed) - {root}, frozenset())


def enumerate_connected_partitions(graph: ZoneGraph, n: int) -> list[Partition]:
    """Every partition into exactly ``n`` clusters that each induce a connected subgraph.

    Clusters are generated in order of their smallest zone, which is also the
    canonical labelling.  Exponential in the number of zones; meant for the
    small buildings used as an exhaustive oracle.
    """
    verts = tuple(sorted(graph.vertices))
    if not 1 <= n <= len(verts):
        raise ParameterError(f"n must lie in [1, {len(verts)}], got {n}")
    if len(verts) > 14:
        warnings.warn("connected-partition enumeration grows exponentially beyond ~12 zones", stacklevel=2)
    adj = {v: frozenset(s) for v, s in _adjacency(graph).items()}
    out: list[Partition] = []

    def rec(remaining: frozenset, clusters: list):
        k = len(clusters)
        if not remaining:
            if k == n:
                out.append(Partition.from_clusters(sorted(c) for c in clusters))
            return
        if k >= n or len(remaining) < n - k:
            return
        root = min(remaining)
        for block in _connected_sets_with_root(root, remaining, adj):
            rest = remaining - block
            if len(rest) < n - k - 1:
                continue
            if k + 1 == n and rest:
                continue
            rec(rest, clusters + [block])

    rec(frozenset(verts), [])
    return out


def cut_cost(graph: ZoneGraph, partition: Partition, weights: Mapping[tuple[int, int], float]) -> float:
    """Sum of edge weights over crossing edges."""
    total = 0.0
    for e in partition.crossing_edges(graph):
        key = e if e in weights else (e[1], e[0])
        if key not in weights:
            raise ParameterError(f"no weight for edge {e}")
        total += weights[key]
    missing = [e for e in graph.edges if e not in weights and (e[1], e[0]) not in weights]
    if missing:
        raise ParameterError(f"no weight for edges {missing}")
    return total


def split_disconnected(partition: Partition, graph: ZoneGraph) -> Partition:
    """Replace each cluster by its connected components."""
    adj = _adjacency(graph)
    clusters = []
    for members in partition.clusters:
        left = set(members)
        while left:
            start = min(left)
            comp, stack = {start}, [start]
            while stack:
                v = stack.pop()
                for u in adj[v]:
                    if u in left and u not in comp:
                        comp.add(u)
                        stack.append(u)
            left -= comp
            clusters.append(sorted(comp))
    clusters.sort(key=min)
    return Partition.from_clusters(clusters)


def check_partition(partition: Partition, graph: ZoneGraph) -> None:
    if sorted(partition.zones) != sorted(graph.vertices):
        raise TopologyError("partition zones do not match graph vertices")
