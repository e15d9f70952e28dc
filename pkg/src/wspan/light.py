"""Light initialization and the neighborhood structure of weighted shortest paths.

Ties among equal-weight edges are broken by edge id everywhere in this module,
so "the d lightest edges at u" is a well-defined set.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from wspan.graph import PathRecord, Subgraph, WeightedGraph


@dataclass(frozen=True)
class LightInitParams:
    d: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d!r}")


def _as_d(params) -> int:
    return params.d if isinstance(params, LightInitParams) else LightInitParams(params).d


def _incident_ranked(g: WeightedGraph, heaviest: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """CSR slots reordered so each node's edges run lightest-first by (w, id)."""
    owner = np.repeat(np.arange(g.n), np.diff(g.indptr))
    key_w = -g.nbr_w if heaviest else g.nbr_w
    order = np.lexsort((g.nbr_eid, key_w, owner))
    rank = np.empty(len(order), dtype=np.int64)
    # position of each slot within its node's block
    rank[order] = np.arange(len(order)) - g.indptr[owner[order]]
    return order, rank


def _select(g: WeightedGraph, d: int, heaviest: bool) -> Subgraph:
    _, rank = _incident_ranked(g, heaviest)
    mask = np.zeros(g.m, dtype=np.uint8)
    mask[g.nbr_eid[rank < d]] = 1
    return Subgraph(g, mask)


def d_light_initialization(g: WeightedGraph, params) -> Subgraph:
    """Each node's ``d`` lightest incident edges (all of them below degree ``d``)."""
    return _select(g, _as_d(params), heaviest=False)


def adversarial_initialization(g: WeightedGraph, params) -> Subgraph:
    """Each node's ``d`` heaviest incident edges.

    A valid d-initialization in the unweighted sense that is deliberately not
    light; it exists to exhibit the counterexample graph's failure mode and is
    never used by the spanner constructions.
    """
    return _select(g, _as_d(params), heaviest=True)


@dataclass(frozen=True)
class NeighborhoodSet:
    owner: int
    d: int
    members: tuple[int, ...]  # ordered lightest-first

    def __contains__(self, x: int) -> bool:
        return x in self.members

    def __len__(self) -> int:
        return len(self.members)

    def as_set(self) -> frozenset[int]:
        return frozenset(self.members)


def d_neighborhood(g: WeightedGraph, u: int, params) -> NeighborhoodSet:
    d = _as_d(params)
    u = g.check_node(u)
    inc = sorted(g.incident(u), key=lambda item: (item[2], item[1]))
    return NeighborhoodSet(u, d, tuple(x for x, _, _ in inc[:d]))


def all_neighborhoods(g: WeightedGraph, params) -> list[frozenset[int]]:
    d = _as_d(params)
    order, rank = _incident_ranked(g)
    out: list[set[int]] = [set() for _ in range(g.n)]
    owner = np.repeat(np.arange(g.n), np.diff(g.indptr))
    sel = rank < d
    for u, x in zip(owner[sel].tolist(), g.nbr[sel].tolist()):
        out[u].add(x)
    return [frozenset(s) for s in out]


# -- missing edges ------------------------------------------------------------


@dataclass(frozen=True)
class MissingEdge:
    edge_id: int
    u: int  # endpoint nearer the path's source
    v: int
    weight: float
    position: int  # index of the edge along the path
    pre_light: bool = True
    post_light: bool = True


@dataclass(frozen=True)
class MissingEdgeList:
    entries: tuple[MissingEdge, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i: int) -> MissingEdge:
        return self.entries[i]

    @property
    def ell(self) -> int:
        return len(self.entries)

    @property
    def weights(self) -> list[float]:
        return [e.weight for e in self.entries]


def missing_edges(path: PathRecord, h: Subgraph) -> MissingEdgeList:
    """Path edges absent from ``h``, in path order, oriented source to target."""
    g = h.graph
    entries = []
    for pos, (a, b, e) in enumerate(zip(path.nodes, path.nodes[1:], path.edge_ids)):
        if not h.mask[e]:
            entries.append(MissingEdge(e, a, b, float(g.ew[e]), pos))
    return classify_missing_edges(MissingEdgeList(tuple(entries)))


def classify_missing_edges(m: MissingEdgeList) -> MissingEdgeList:
    """Set pre/post-light flags.

    An edge is pre-heavy when strictly heavier than its predecessor in the
    list and post-heavy when strictly heavier than its successor; the first
    edge is pre-light and the last post-light regardless.
    """
    w = m.weights
    out = []
    for i, entry in enumerate(m.entries):
        pre = i == 0 or not w[i] > w[i - 1]
        post = i == len(w) - 1 or not w[i] > w[i + 1]
        out.append(replace(entry, pre_light=pre, post_light=post))
    return MissingEdgeList(tuple(out))


def count_prelight_postlight(m: MissingEdgeList) -> tuple[int, int]:
    return (sum(e.pre_light for e in m), sum(e.post_light for e in m))


# -- neighborhood counts ------------------------------------------------------


def adjacent_nodes(path: PathRecord, h: Subgraph) -> set[int]:
    """Nodes joined by an ``h`` edge to at least one path node (path nodes included)."""
    g = h.graph
    out: set[int] = set()
    for u in set(path.nodes):
        for x, e, _ in g.incident(u):
            if h.mask[e]:
                out.add(x)
    return out


def adjacent_node_count(path: PathRecord, h: Subgraph) -> int:
    return len(adjacent_nodes(path, h))


def neighborhood_union(
    path: PathRecord, h: Subgraph, params, *, which: str = "all"
) -> set[int]:
    """Union of the d-neighborhoods of missing-edge left endpoints.

    ``which`` selects the missing edges that contribute: ``"all"``,
    ``"pre_light"`` (the set X*), or ``"post_light"`` (X* for the reversed
    path, i.e. neighborhoods of the right endpoints of post-light edges).
    """
    g = h.graph
    m = missing_edges(path, h)
    out: set[int] = set()
    for e in m:
        if which == "all" or (which == "pre_light" and e.pre_light):
            out.update(d_neighborhood(g, e.u, params).members)
        elif which == "post_light" and e.post_light:
            out.update(d_neighborhood(g, e.v, params).members)
        elif which not in ("all", "pre_light", "post_light"):
            raise ValueError(f"unknown selector {which!r}")
    return out


def x_star_size(path: PathRecord, h: Subgraph, params) -> int:
    """|X*| in the orientation holding the pre-light majority."""
    m = missing_edges(path, h)
    pre, post = count_prelight_postlight(m)
    which = "pre_light" if pre >= post else "post_light"
    return len(neighborhood_union(path, h, params, which=which))


# -- counterexample fixture ---------------------------------------------------


def hub_counterexample(d: int, ell: int, epsilon: float, w_heavy: float) -> WeightedGraph:
    """Light path plus ``d`` hubs tied to every path node by heavy edges.

    Nodes ``0..ell`` form the path (edges ``(i, i+1)`` of weight ``epsilon``,
    ids ``0..ell-1``); nodes ``ell+1..ell+d`` are hubs, hub by hub, each joined
    to path nodes ``0..ell`` in order with weight ``w_heavy``.
    """
    if d < 1 or ell < 1:
        raise ValueError("d and ell must be at least 1")
    if not (epsilon > 0 and w_heavy > 0):
        raise ValueError("weights must be positive")
    if not w_heavy > epsilon * ell:
        raise ValueError(f"need w_heavy > epsilon * ell ({w_heavy} <= {epsilon * ell})")
    edges: list[tuple[int, int, float]] = [(i, i + 1, epsilon) for i in range(ell)]
    for k in range(d):
        hub = ell + 1 + k
        edges.extend((i, hub, w_heavy) for i in range(ell + 1))
    return WeightedGraph(ell + 1 + d, edges)


def hub_counterexample_path(ell: int, g: WeightedGraph) -> PathRecord:
    return PathRecord.from_nodes(g, range(ell + 1))
