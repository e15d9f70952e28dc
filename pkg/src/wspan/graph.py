"""Weighted graphs, subgraphs, and canonical shortest paths.

Canonical tie-breaking
----------------------
Among equal-weight shortest paths out of a root ``s`` each node keeps the
smallest-id predecessor. The path from ``s`` to ``t`` is read off the resulting
tree, so it is the lexicographically smallest shortest path when read from
``t`` back to ``s``. Every contiguous subpath of a canonical path, kept in the
same orientation, is itself canonical between its endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, TextIO, Union

import numpy as np

from wspan import kernels


class GraphError(ValueError):
    """Malformed graph input (self-loops, parallel edges, bad weights)."""


class DisconnectedGraphError(GraphError):
    pass


class NoPathError(ValueError):
    pass


class WeightedGraph:
    """Undirected connected graph with positive real edge weights.

    Edge ids are assigned densely in the order edges are given. Instances are
    immutable; all array attributes are read-only.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int, float]]):
        if int(n) != n or n < 1:
            raise GraphError(f"node count must be a positive integer, got {n!r}")
        n = int(n)
        edges = list(edges)
        eu = np.empty(len(edges), dtype=np.int64)
        ev = np.empty(len(edges), dtype=np.int64)
        ew = np.empty(len(edges), dtype=np.float64)
        index: dict[tuple[int, int], int] = {}
        for i, (u, v, w) in enumerate(edges):
            u, v, w = int(u), int(v), float(w)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {i}: endpoint out of range in ({u}, {v})")
            if u == v:
                raise GraphError(f"edge {i}: self-loop at node {u}")
            if not (w > 0 and math.isfinite(w)):
                raise GraphError(f"edge {i}: weight must be positive and finite, got {w!r}")
            key = (u, v) if u < v else (v, u)
            if key in index:
                raise GraphError(f"edge {i}: parallel edge {key}")
            index[key] = i
            eu[i], ev[i], ew[i] = u, v, w
        self.n = n
        self.eu, self.ev, self.ew = eu, ev, ew
        self._index = index
        self._build_csr()
        for arr in (self.eu, self.ev, self.ew):
            arr.flags.writeable = False
        if not self._connected():
            raise DisconnectedGraphError("graph is not connected")

    def _build_csr(self) -> None:
        m = len(self.ew)
        src = np.concatenate([self.eu, self.ev])
        dst = np.concatenate([self.ev, self.eu])
        eid = np.concatenate([np.arange(m), np.arange(m)]).astype(np.int64)
        order = np.lexsort((dst, src))
        self.indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n), out=self.indptr[1:])
        self.nbr = np.ascontiguousarray(dst[order])
        self.nbr_eid = np.ascontiguousarray(eid[order])
        self.nbr_w = np.ascontiguousarray(self.ew[self.nbr_eid])
        for arr in (self.indptr, self.nbr, self.nbr_eid, self.nbr_w):
            arr.flags.writeable = False
        self.full_mask = np.ones(m, dtype=np.uint8)
        self.full_mask.flags.writeable = False

    def _connected(self) -> bool:
        if self.n == 1:
            return True
        dist, *_ = kernels.sssp(
            self.indptr, self.nbr, self.nbr_w, self.nbr_eid, self.full_mask, 0
        )
        return bool(np.isfinite(dist).all())

    @property
    def m(self) -> int:
        return len(self.ew)

    @property
    def max_weight(self) -> float:
        return float(self.ew.max()) if self.m else 0.0

    W = max_weight

    def edges(self) -> Iterator[tuple[int, int, float]]:
        for u, v, w in zip(self.eu.tolist(), self.ev.tolist(), self.ew.tolist()):
            yield u, v, w

    def edge_id(self, u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        try:
            return self._index[key]
        except KeyError:
            raise KeyError(f"no edge between {u} and {v}") from None

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._index

    def weight(self, u: int, v: int) -> float:
        return float(self.ew[self.edge_id(u, v)])

    def degree(self, u: int) -> int:
        return int(self.indptr[u + 1] - self.indptr[u])

    def incident(self, u: int) -> list[tuple[int, int, float]]:
        """(neighbor, edge id, weight) for every edge at ``u``, by neighbor id."""
        lo, hi = self.indptr[u], self.indptr[u + 1]
        return list(
            zip(self.nbr[lo:hi].tolist(), self.nbr_eid[lo:hi].tolist(), self.nbr_w[lo:hi].tolist())
        )

    def check_node(self, u: int) -> int:
        if isinstance(u, bool) or int(u) != u or not 0 <= u < self.n:
            raise ValueError(f"invalid node id {u!r} for graph with {self.n} nodes")
        return int(u)

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, m={self.m}, W={self.max_weight:g})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.eu, other.eu)
            and np.array_equal(self.ev, other.ev)
            and np.array_equal(self.ew, other.ew)
        )

    __hash__ = None  # type: ignore[assignment]


class Subgraph:
    """Edge subset of a parent :class:`WeightedGraph` (all nodes kept)."""

    def __init__(self, graph: WeightedGraph, mask: np.ndarray):
        mask = np.asarray(mask)
        if mask.shape != (graph.m,):
            raise ValueError(f"mask must have shape ({graph.m},), got {mask.shape}")
        self.graph = graph
        self.mask = np.ascontiguousarray(mask, dtype=np.uint8).copy()
        self.mask.flags.writeable = False

    @classmethod
    def empty(cls, graph: WeightedGraph) -> "Subgraph":
        return cls(graph, np.zeros(graph.m, dtype=np.uint8))

    @classmethod
    def full(cls, graph: WeightedGraph) -> "Subgraph":
        return cls(graph, graph.full_mask)

    @classmethod
    def from_edge_ids(cls, graph: WeightedGraph, ids: Iterable[int]) -> "Subgraph":
        mask = np.zeros(graph.m, dtype=np.uint8)
        ids = np.fromiter((int(i) for i in ids), dtype=np.int64)
        if len(ids) and (ids.min() < 0 or ids.max() >= graph.m):
            raise ValueError("edge id out of range for parent graph")
        mask[ids] = 1
        return cls(graph, mask)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def num_edges(self) -> int:
        return int(self.mask.sum())

    def edge_ids(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def edges(self) -> Iterator[tuple[int, int, float]]:
        g = self.graph
        for e in self.edge_ids().tolist():
            yield int(g.eu[e]), int(g.ev[e]), float(g.ew[e])

    def __contains__(self, eid: int) -> bool:
        return bool(self.mask[eid])

    def union(self, other: "Subgraph") -> "Subgraph":
        if other.graph is not self.graph:
            raise ValueError("subgraphs of different parent graphs")
        return Subgraph(self.graph, self.mask | other.mask)

    def issubset(self, other: "Subgraph") -> bool:
        return bool(np.all(self.mask <= other.mask))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subgraph):
            return NotImplemented
        return other.graph is self.graph and np.array_equal(self.mask, other.mask)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Subgraph({self.num_edges}/{self.graph.m} edges)"


GraphLike = Union[WeightedGraph, Subgraph]


def _split(g: GraphLike) -> tuple[WeightedGraph, np.ndarray]:
    if isinstance(g, Subgraph):
        return g.graph, g.mask
    return g, g.full_mask


@dataclass(frozen=True)
class PathRecord:
    """Oriented node sequence ``nodes[0] = s`` to ``nodes[-1] = t``."""

    nodes: tuple[int, ...]
    edge_ids: tuple[int, ...]
    total_weight: float

    @property
    def source(self) -> int:
        return self.nodes[0]

    @property
    def target(self) -> int:
        return self.nodes[-1]

    def __len__(self) -> int:
        return len(self.edge_ids)

    def reversed(self) -> "PathRecord":
        return PathRecord(self.nodes[::-1], self.edge_ids[::-1], self.total_weight)

    def subpath(self, i: int, j: int) -> tuple[int, ...]:
        return self.nodes[i : j + 1]

    @classmethod
    def from_nodes(cls, g: WeightedGraph, nodes: Sequence[int]) -> "PathRecord":
        eids = []
        total = 0.0
        for a, b in zip(nodes, nodes[1:]):
            e = g.edge_id(a, b)
            eids.append(e)
            total += float(g.ew[e])
        return cls(tuple(int(x) for x in nodes), tuple(eids), total)


class DemandPairSet:
    """Distinct unordered node pairs, each stored as ``(min, max)``, sorted."""

    def __init__(self, pairs: Iterable[tuple[int, int]], n: int | None = None):
        norm = set()
        for s, t in pairs:
            s, t = int(s), int(t)
            if s == t:
                raise ValueError(f"demand pair ({s}, {t}) has equal endpoints")
            if n is not None and not (0 <= s < n and 0 <= t < n):
                raise ValueError(f"demand pair ({s}, {t}) out of range for n={n}")
            if s < 0 or t < 0:
                raise ValueError(f"negative node id in pair ({s}, {t})")
            norm.add((s, t) if s < t else (t, s))
        self.pairs: tuple[tuple[int, int], ...] = tuple(sorted(norm))

    @classmethod
    def all_pairs(cls, n: int) -> "DemandPairSet":
        obj = cls.__new__(cls)
        obj.pairs = tuple((s, t) for s in range(n) for t in range(s + 1, n))
        return obj

    @classmethod
    def subset(cls, nodes: Iterable[int]) -> "DemandPairSet":
        s = sorted(set(int(x) for x in nodes))
        obj = cls.__new__(cls)
        obj.pairs = tuple((a, b) for i, a in enumerate(s) for b in s[i + 1 :])
        return obj

    @property
    def p(self) -> int:
        return len(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def by_source(self) -> dict[int, np.ndarray]:
        """Targets grouped under the smaller endpoint."""
        groups: dict[int, list[int]] = {}
        for s, t in self.pairs:
            groups.setdefault(s, []).append(t)
        return {s: np.array(ts, dtype=np.int64) for s, ts in groups.items()}

    def __repr__(self) -> str:
        return f"DemandPairSet(p={self.p})"


# -- shortest paths -----------------------------------------------------------


@dataclass(frozen=True)
class ShortestPathTree:
    """Raw output of one single-source run: distances, parents, settle order."""

    root: int
    dist: np.ndarray
    parent: np.ndarray
    parent_edge: np.ndarray
    order: np.ndarray

    def path_to(self, g: WeightedGraph, t: int) -> PathRecord:
        if not math.isfinite(self.dist[t]):
            raise NoPathError(f"node {t} unreachable from {self.root}")
        nodes = [t]
        eids = []
        v = t
        while v != self.root:
            eids.append(int(self.parent_edge[v]))
            v = int(self.parent[v])
            nodes.append(v)
        nodes.reverse()
        eids.reverse()
        return PathRecord(tuple(nodes), tuple(eids), float(self.dist[t]))


def sssp_tree(g: GraphLike, source: int) -> ShortestPathTree:
    graph, mask = _split(g)
    source = graph.check_node(source)
    dist, parent, pedge, order = kernels.sssp(
        graph.indptr, graph.nbr, graph.nbr_w, graph.nbr_eid, mask, source
    )
    return ShortestPathTree(source, dist, parent, pedge, order)


def dijkstra_sssp(g: GraphLike, source: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact distances and canonical parents from ``source``.

    Unreachable nodes get ``inf`` distance and parent ``-1``; the source has
    parent ``-1`` too.
    """
    tree = sssp_tree(g, source)
    return tree.dist, tree.parent


def shortest_path(g: GraphLike, s: int, t: int) -> PathRecord:
    graph, _ = _split(g)
    graph.check_node(t)
    if s == t:
        raise ValueError("shortest_path needs distinct endpoints")
    return sssp_tree(g, s).path_to(graph, t)


def shortest_path_tree(g: GraphLike, root: int) -> Subgraph:
    graph, _ = _split(g)
    tree = sssp_tree(g, root)
    if len(tree.order) != graph.n:
        raise DisconnectedGraphError("shortest path tree needs a connected graph")
    mask = np.zeros(graph.m, dtype=np.uint8)
    mask[tree.parent_edge[tree.parent_edge >= 0]] = 1
    return Subgraph(graph, mask)


def distance_matrix(g: GraphLike, sources: Iterable[int] | None = None) -> np.ndarray:
    graph, _ = _split(g)
    sources = range(graph.n) if sources is None else list(sources)
    return np.vstack([sssp_tree(g, s).dist for s in sources])


# -- edge-list text format ----------------------------------------------------


def _data_lines(stream: TextIO) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def read_edgelist(stream: TextIO) -> WeightedGraph:
    lines = _data_lines(stream)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise GraphError("empty edge-list input") from None
    parts = header.split()
    if len(parts) != 2:
        raise GraphError(f"line {lineno}: expected header 'n m'")
    n, m = int(parts[0]), int(parts[1])
    edges = []
    for lineno, line in lines:
        parts = line.split()
        if len(parts) != 3:
            raise GraphError(f"line {lineno}: expected 'u v w'")
        edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
    if len(edges) != m:
        raise GraphError(f"header declares {m} edges, found {len(edges)}")
    return WeightedGraph(n, edges)


def write_edgelist(
    g: GraphLike, stream: TextIO, comments: Sequence[str] = ()
) -> None:
    graph, _ = _split(g)
    edges = list(g.edges())
    for c in comments:
        stream.write(f"# {c}\n")
    stream.write(f"{graph.n} {len(edges)}\n")
    for u, v, w in edges:
        stream.write(f"{u} {v} {w!r}\n")


def load_graph(path: str) -> WeightedGraph:
    with open(path) as fh:
        return read_edgelist(fh)


def read_edge_triples(stream: TextIO) -> tuple[int, list[tuple[int, int, float]]]:
    """Parse an edge-list without building a graph (subgraphs may be disconnected)."""
    lines = _data_lines(stream)
    lineno, header = next(lines)
    n, m = (int(x) for x in header.split())
    edges = []
    for lineno, line in lines:
        u, v, w = line.split()
        edges.append((int(u), int(v), float(w)))
    if len(edges) != m:
        raise GraphError(f"header declares {m} edges, found {len(edges)}")
    return n, edges


def read_pairs(stream: TextIO, n: int | None = None) -> DemandPairSet:
    pairs = []
    for lineno, line in _data_lines(stream):
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v'")
        pairs.append((int(parts[0]), int(parts[1])))
    return DemandPairSet(pairs, n)


def read_nodes(stream: TextIO) -> list[int]:
    return [int(tok) for _, line in _data_lines(stream) for tok in line.split()]


def write_pairs(pairs: DemandPairSet, stream: TextIO) -> None:
    for s, t in pairs:
        stream.write(f"{s} {t}\n")
