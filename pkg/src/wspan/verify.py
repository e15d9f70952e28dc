"""Exact oracles: stretch certification, brute-force distances, lemma harness.

The brute-force routines here deliberately avoid the Dijkstra code in
:mod:`wspan.graph` so that they can serve as independent checks of it.
"""

from __future__ import annotations

import io
import itertools
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from wspan.graph import (
    DemandPairSet,
    GraphLike,
    PathRecord,
    Subgraph,
    WeightedGraph,
    read_edgelist,
    shortest_path,
    sssp_tree,
    write_edgelist,
    _split,
)
from wspan.light import (
    adjacent_node_count,
    adversarial_initialization,
    all_neighborhoods,
    count_prelight_postlight,
    d_light_initialization,
    missing_edges,
    neighborhood_union,
)

BRUTE_FORCE_CAP = 512


class OracleRefused(ValueError):
    pass


# -- stretch ------------------------------------------------------------------


@dataclass(frozen=True)
class StretchReport:
    pairs: np.ndarray  # shape (p, 2)
    dist_g: np.ndarray
    dist_h: np.ndarray
    bound: float

    @property
    def additive_error(self) -> np.ndarray:
        return self.dist_h - self.dist_g

    @property
    def satisfied(self) -> np.ndarray:
        return self.dist_h <= self.dist_g + self.bound

    @property
    def passed(self) -> bool:
        return bool(self.satisfied.all())

    @property
    def max_error(self) -> float:
        return float(self.additive_error.max()) if len(self.pairs) else 0.0

    @property
    def violations(self) -> int:
        return int((~self.satisfied).sum())

    def worst(self, k: int = 10) -> list[dict]:
        if not len(self.pairs):
            return []
        err = self.additive_error
        idx = np.argsort(-err, kind="stable")[:k]
        return [
            {
                "s": int(self.pairs[i, 0]),
                "t": int(self.pairs[i, 1]),
                "dist_g": float(self.dist_g[i]),
                "dist_h": float(self.dist_h[i]),
                "error": float(err[i]),
                "satisfied": bool(self.satisfied[i]),
            }
            for i in idx
        ]

    def records(self) -> Iterable[tuple[tuple[int, int], float, float, float, bool]]:
        for (s, t), dg, dh, ok in zip(
            self.pairs.tolist(), self.dist_g.tolist(), self.dist_h.tolist(), self.satisfied.tolist()
        ):
            yield (s, t), dg, dh, dh - dg, ok


def verify_stretch(
    g: WeightedGraph, h: Subgraph, pairs: DemandPairSet | Iterable[tuple[int, int]], bound: float
) -> StretchReport:
    if h.graph is not g:
        raise ValueError("h is not a subgraph of g")
    if not isinstance(pairs, DemandPairSet):
        pairs = DemandPairSet(pairs)
    for s, t in pairs:
        g.check_node(s)
        g.check_node(t)
    arr = np.array(pairs.pairs, dtype=np.int64).reshape(-1, 2)
    dist_g = np.empty(len(arr))
    dist_h = np.empty(len(arr))
    pos = 0
    for s, ts in pairs.by_source().items():
        k = len(ts)
        dist_g[pos : pos + k] = sssp_tree(g, s).dist[ts]
        dist_h[pos : pos + k] = sssp_tree(h, s).dist[ts]
        pos += k
    return StretchReport(arr, dist_g, dist_h, float(bound))


def near_connected(g: WeightedGraph, h: Subgraph, s: int, v: int) -> bool:
    """Whether some ``h``-neighbor of ``v`` has exact distance from ``s`` in ``h``."""
    g.check_node(v)
    dg = sssp_tree(g, s).dist
    dh = sssp_tree(h, s).dist
    for x, e, _ in g.incident(v):
        if h.mask[e] and dh[x] == dg[x]:
            return True
    return False


# -- brute force --------------------------------------------------------------


def brute_force_distances(g: GraphLike, cap: int = BRUTE_FORCE_CAP) -> np.ndarray:
    """All-pairs table by synchronous edge relaxation from every source.

    Sums accumulate left to right from the source, matching how a label
    setting search adds weights, so results are bit-comparable.
    """
    graph, mask = _split(g)
    n = graph.n
    if n > cap:
        raise OracleRefused(f"brute force refused for n={n} > cap={cap}")
    sel = mask.astype(bool)
    u = np.concatenate([graph.eu[sel], graph.ev[sel]])
    v = np.concatenate([graph.ev[sel], graph.eu[sel]])
    w = np.concatenate([graph.ew[sel], graph.ew[sel]])
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    # rows: target node, columns: source
    dt = dist.T.copy()
    for _ in range(max(n - 1, 0)):
        cand = dt[u] + w[:, None]
        before = dt.copy()
        np.minimum.at(dt, v, cand)
        if np.array_equal(before, dt):
            break
    return dt.T.copy()


def simple_paths(g: GraphLike, s: int, t: int) -> Iterable[list[int]]:
    """Every simple s-t path as a node list (exponential; tiny graphs only)."""
    graph, mask = _split(g)
    adj: list[list[int]] = [[] for _ in range(graph.n)]
    for e, (a, b) in enumerate(zip(graph.eu.tolist(), graph.ev.tolist())):
        if mask[e]:
            adj[a].append(b)
            adj[b].append(a)
    stack = [(s, [s])]
    while stack:
        x, path = stack.pop()
        if x == t:
            yield path
            continue
        for y in adj[x]:
            if y not in path:
                stack.append((y, path + [y]))


def path_weight(g: WeightedGraph, nodes: list[int]) -> float:
    total = 0.0
    for a, b in zip(nodes, nodes[1:]):
        total += g.weight(a, b)
    return total


def brute_force_constrained(
    g: WeightedGraph, h: Subgraph, s: int, t: int, budget: int
) -> tuple[float, list[list[int]]]:
    """Minimum weight over simple paths with at most ``budget`` edges outside ``h``.

    Returns the weight and all optimal node sequences (``inf`` and ``[]`` when
    no path qualifies).
    """
    best = math.inf
    winners: list[list[int]] = []
    for nodes in simple_paths(g, s, t):
        missing = sum(1 for a, b in zip(nodes, nodes[1:]) if not h.mask[g.edge_id(a, b)])
        if missing > budget:
            continue
        wt = path_weight(g, nodes)
        if wt < best:
            best, winners = wt, [nodes]
        elif wt == best:
            winners.append(nodes)
    return best, winners


def all_shortest_paths(g: WeightedGraph, s: int, t: int) -> tuple[float, list[list[int]]]:
    return brute_force_constrained(g, Subgraph.full(g), s, t, g.n)


def connected_graphs(n: int) -> Iterable[list[tuple[int, int]]]:
    """Every connected labeled simple graph on ``n`` nodes, as edge lists."""
    slots = list(itertools.combinations(range(n), 2))
    for bits in range(1 << len(slots)):
        edges = [slots[i] for i in range(len(slots)) if bits >> i & 1]
        if len(edges) < n - 1:
            continue
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        comps = n
        for a, b in edges:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
                comps -= 1
        if comps == 1:
            yield edges


# -- neighborhood lemmas ------------------------------------------------------


@dataclass
class InstanceCheck:
    """Lemma checks for one (graph, d, s, t) instance."""

    d: int
    s: int
    t: int
    ell: int
    adjacent: int
    x_star: int
    prelight: int
    postlight: int
    gap_margin: float  # min over qualifying (i, k) of w_k - sum; inf if none
    shared_max: int
    bounds_apply: bool = True

    @property
    def adjacency_ok(self) -> bool:
        return not self.bounds_apply or self.adjacent * 6 > self.d * self.ell

    @property
    def x_star_ok(self) -> bool:
        return not self.bounds_apply or self.x_star * 6 > self.d * self.ell

    @property
    def weight_gap_ok(self) -> bool:
        return self.gap_margin >= 0

    @property
    def light_count_ok(self) -> bool:
        return self.prelight + self.postlight >= self.ell + 1

    @property
    def shared_neighbor_ok(self) -> bool:
        return self.shared_max <= 3

    def failures(self) -> list[str]:
        # only the light-count bound holds for a non-light initialization
        names = ["adjacency", "x_star", "weight_gap", "light_count", "shared_neighbor"]
        if not self.bounds_apply:
            names = ["light_count"]
        return [n for n in names if not getattr(self, f"{n}_ok")]


def _gap_margin(path: PathRecord, m, nbhd: list[frozenset[int]]) -> float:
    worst = math.inf
    ws = m.weights
    for i in range(len(m)):
        ni = nbhd[m[i].u]
        for k in range(i + 1, len(m)):
            if ni & nbhd[m[k].u]:
                worst = min(worst, ws[k] - math.fsum(ws[i + 1 : k]))
    return worst


def _shared_max(m, nbhd: list[frozenset[int]]) -> int:
    counts: dict[int, int] = {}
    for e in m:
        if e.pre_light:
            for x in nbhd[e.u]:
                counts[x] = counts.get(x, 0) + 1
    return max(counts.values(), default=0)


def check_instance(
    g: WeightedGraph,
    d: int,
    s: int,
    t: int,
    *,
    h: Subgraph | None = None,
    nbhd: list[frozenset[int]] | None = None,
    path: PathRecord | None = None,
) -> InstanceCheck:
    """Run every neighborhood-lemma check on the canonical s-t path.

    The weight-gap and shared-neighbor checks run in both orientations of
    the path.
    """
    h = d_light_initialization(g, d) if h is None else h
    nbhd = all_neighborhoods(g, d) if nbhd is None else nbhd
    path = shortest_path(g, s, t) if path is None else path
    m = missing_edges(path, h)
    back = missing_edges(path.reversed(), h)
    pre, post = count_prelight_postlight(m)
    which = "pre_light" if pre >= post else "post_light"
    return InstanceCheck(
        d=d,
        s=s,
        t=t,
        ell=len(m),
        adjacent=adjacent_node_count(path, h),
        x_star=len(neighborhood_union(path, h, d, which=which)),
        prelight=pre,
        postlight=post,
        gap_margin=min(_gap_margin(path, m, nbhd), _gap_margin(path, back, nbhd)),
        shared_max=max(_shared_max(m, nbhd), _shared_max(back, nbhd)),
    )


@dataclass
class Violation:
    checks: list[str]
    witness: str

    def write(self, directory: str | Path, index: int) -> Path:
        out = Path(directory) / f"witness_{index:04d}.txt"
        out.write_text(self.witness)
        return out


@dataclass
class HarnessSummary:
    trials: int = 0
    eligible: int = 0
    skipped: int = 0
    bounds_apply: bool = True
    min_adjacency_ratio: float = math.inf  # adjacent / (d*ell/6)
    min_x_star_ratio: float = math.inf
    min_gap_margin: float = math.inf
    min_light_count_slack: float = math.inf  # pre + post - (ell + 1)
    max_shared_count: int = 0
    gap_tested: int = 0  # trials where some (i, k) had intersecting neighborhoods
    adjacent_counts: list[int] = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def absorb(self, c: InstanceCheck) -> None:
        self.eligible += 1
        self.adjacent_counts.append(c.adjacent)
        if c.bounds_apply:
            bound = c.d * c.ell / 6
            self.min_adjacency_ratio = min(self.min_adjacency_ratio, c.adjacent / bound)
            self.min_x_star_ratio = min(self.min_x_star_ratio, c.x_star / bound)
        self.min_gap_margin = min(self.min_gap_margin, c.gap_margin)
        self.gap_tested += math.isfinite(c.gap_margin)
        self.min_light_count_slack = min(self.min_light_count_slack, c.prelight + c.postlight - c.ell - 1)
        self.max_shared_count = max(self.max_shared_count, c.shared_max)

    def merge(self, other: "HarnessSummary") -> None:
        self.trials += other.trials
        self.eligible += other.eligible
        self.skipped += other.skipped
        self.min_adjacency_ratio = min(self.min_adjacency_ratio, other.min_adjacency_ratio)
        self.min_x_star_ratio = min(self.min_x_star_ratio, other.min_x_star_ratio)
        self.min_gap_margin = min(self.min_gap_margin, other.min_gap_margin)
        self.min_light_count_slack = min(self.min_light_count_slack, other.min_light_count_slack)
        self.max_shared_count = max(self.max_shared_count, other.max_shared_count)
        self.gap_tested += other.gap_tested
        self.adjacent_counts.extend(other.adjacent_counts)
        self.violations.extend(other.violations)

    def as_dict(self) -> dict:
        def num(x):
            return None if math.isinf(x) else x

        return {
            "trials": self.trials,
            "eligible": self.eligible,
            "skipped": self.skipped,
            "bounds_apply": self.bounds_apply,
            "min_adjacency_ratio": num(self.min_adjacency_ratio),
            "min_x_star_ratio": num(self.min_x_star_ratio),
            "min_gap_margin": num(self.min_gap_margin),
            "min_light_count_slack": num(self.min_light_count_slack),
            "max_shared_count": self.max_shared_count,
            "gap_tested": self.gap_tested,
            "violations": len(self.violations),
            "passed": self.passed,
        }


def serialize_witness(g: WeightedGraph, d: int, s: int, t: int, seed: int, init: str = "light") -> str:
    buf = io.StringIO()
    write_edgelist(g, buf)
    suffix = "" if init == "light" else f" init={init}"
    buf.write(f"d={d} s={s} t={t} seed={seed}{suffix}\n")
    return buf.getvalue()


_SIDECAR = re.compile(r"^d=(\d+) s=(\d+) t=(\d+) seed=(\d+)(?: init=(\w+))?$")


def parse_witness(text: str) -> tuple[WeightedGraph, int, int, int, int, str]:
    lines = text.strip().splitlines()
    match = _SIDECAR.match(lines[-1].strip())
    if not match:
        raise ValueError("witness is missing its 'd=.. s=.. t=.. seed=..' line")
    g = read_edgelist(io.StringIO("\n".join(lines[:-1])))
    d, s, t, seed = (int(x) for x in match.groups()[:4])
    return g, d, s, t, seed, match.group(5) or "light"


def replay_witness(text: str) -> InstanceCheck:
    g, d, s, t, _seed, init = parse_witness(text)
    h = adversarial_initialization(g, d) if init == "adversarial" else None
    check = check_instance(g, d, s, t, h=h)
    check.bounds_apply = init == "light"
    return check


def lemma_harness(
    g: WeightedGraph,
    d: int,
    trials: int,
    seed: int,
    *,
    init: str = "light",
    max_attempts: int | None = None,
) -> HarnessSummary:
    """Randomized lemma checks on ``g`` over pairs with at least one missing edge.

    Pairs are drawn uniformly and redrawn while their canonical path has no
    missing edge. With ``init="adversarial"`` the heaviest-edge initialization
    is used instead and the adjacency bounds are recorded as not
    applicable; only the adjacency counts are collected.
    """
    summary = HarnessSummary(bounds_apply=init == "light")
    if trials <= 0 or g.n < 2:
        return summary
    if init == "light":
        h = d_light_initialization(g, d)
    elif init == "adversarial":
        h = adversarial_initialization(g, d)
    else:
        raise ValueError(f"unknown init {init!r}")
    nbhd = all_neighborhoods(g, d)
    rng = np.random.default_rng(seed)
    trees = {}
    attempts = max_attempts if max_attempts is not None else 200 * trials
    for _ in range(trials):
        summary.trials += 1
        for _ in range(attempts):
            s, t = (int(x) for x in rng.choice(g.n, size=2, replace=False))
            if s not in trees:
                trees[s] = sssp_tree(g, s)
            tree = trees[s]
            path = tree.path_to(g, t)
            if any(not h.mask[e] for e in path.edge_ids):
                break
        else:
            summary.skipped += 1
            continue
        check = check_instance(g, d, s, t, h=h, nbhd=nbhd, path=path)
        check.bounds_apply = init == "light"
        summary.absorb(check)
        failed = check.failures()
        if failed:
            summary.violations.append(
                Violation(failed, serialize_witness(g, d, s, t, seed, init))
            )
    return summary


def unweighted_adjacency_bound(g: WeightedGraph, s: int, t: int) -> int:
    """Max number of nodes on the canonical s-t path adjacent to any single node.

    On unit-weight graphs this never exceeds three.
    """
    path = shortest_path(g, s, t)
    on_path = set(path.nodes)
    best = 0
    for x in range(g.n):
        best = max(best, sum(1 for y, _, _ in g.incident(x) if y in on_path))
    return best
