"""Additive spanner constructions for weighted graphs.

Every construction starts from a d-light initialization, adds the canonical
paths of demand pairs that are missing few edges, and covers the rest through
randomly sampled hubs. Sampling depends only on the seed, ``n``, and the
number of demand pairs. Rounds are repeated with fresh randomness (edges are
unioned) until an exact check certifies every pair, so a returned
:class:`SpannerResult` always satisfies its bound.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from wspan import kernels
from wspan.graph import (
    DemandPairSet,
    PathRecord,
    ShortestPathTree,
    Subgraph,
    WeightedGraph,
    sssp_tree,
)
from wspan.light import d_light_initialization
from wspan.verify import StretchReport, verify_stretch

MULTIPLIERS = {"2w": 2, "4w": 4, "8w": 8}
DEFAULT_MAX_ROUNDS = 200
DEFAULT_BUDGET_CAP = 50_000_000  # label-setting states (n * (budget + 1))

# (d exponent, ell exponent) in d = p^a, ell = n / p^b
_PAIRWISE_EXPONENTS = {
    "2w": (Fraction(1, 3), Fraction(2, 3)),
    "4w": (Fraction(2, 7), Fraction(5, 7)),
    "8w": (Fraction(1, 4), Fraction(3, 4)),
}
# all-pairs threshold p* = n^c
_ALL_PAIRS_EXPONENT = {"2w": Fraction(3, 2), "4w": Fraction(7, 5), "8w": Fraction(4, 3)}


class ConstructionFailure(RuntimeError):
    """Boosting ran out of rounds; carries the pairs still unsatisfied."""

    def __init__(self, message: str, unsatisfied: Sequence[tuple[int, int]]):
        super().__init__(message)
        self.unsatisfied = list(unsatisfied)


def normalize_mode(mode: str) -> str:
    key = str(mode).lower()
    if key not in MULTIPLIERS:
        raise ValueError(f"mode must be one of 2w, 4w, 8w; got {mode!r}")
    return key


# -- parameters ---------------------------------------------------------------


def ceil_power_ratio(num: int, num_exp: Fraction, den: int, den_exp: Fraction) -> int:
    """Exact ``ceil(num**num_exp / den**den_exp)`` for positive integers.

    Uses integer arithmetic so that perfect powers (``8**(1/3)``) do not
    round up through floating-point noise.
    """
    num_exp, den_exp = Fraction(num_exp), Fraction(den_exp)
    k = math.lcm(num_exp.denominator, den_exp.denominator)
    a, b = int(num_exp * k), int(den_exp * k)
    lhs, rhs = den**b, num**a  # want smallest x with x^k * lhs >= rhs
    x = max(0, int(math.floor(num**float(num_exp) / den**float(den_exp))) - 2)
    while x**k * lhs < rhs:
        x += 1
    return x


def _clamp(x: int, lo: int, hi: int) -> int:
    return max(lo, min(hi, x))


@dataclass(frozen=True)
class ConstructionParams:
    d: int
    ell: int
    budget: int | None = None  # missing-edge cap for constrained paths (4w)
    max_rounds: int = DEFAULT_MAX_ROUNDS
    seed: int = 0

    def __post_init__(self):
        if self.d < 1 or self.ell < 1:
            raise ValueError("d and ell must be at least 1")
        if self.budget is not None and self.budget < 0:
            raise ValueError("budget must be non-negative")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


def default_params(
    mode: str,
    n: int,
    p: int,
    *,
    d: int | None = None,
    ell: int | None = None,
    budget: int | None = None,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    seed: int = 0,
) -> ConstructionParams:
    """Parameters balancing the size terms for ``p`` demand pairs.

    Overrides replace the derived value; derived values are ceilings clamped
    to ``[1, n]``.
    """
    mode = normalize_mode(mode)
    p = max(1, int(p))
    d_exp, ell_exp = _PAIRWISE_EXPONENTS[mode]
    if d is None:
        d = _clamp(ceil_power_ratio(p, d_exp, 1, Fraction(0)), 1, n)
    if ell is None:
        ell = _clamp(ceil_power_ratio(n, Fraction(1), p, ell_exp), 1, n)
    if mode == "4w" and budget is None:
        budget = _clamp(-(-n // (d * d)), 1, n)
    return ConstructionParams(d=d, ell=ell, budget=budget, max_rounds=max_rounds, seed=seed)


def all_pairs_threshold(mode: str, n: int) -> int:
    return ceil_power_ratio(n, _ALL_PAIRS_EXPONENT[normalize_mode(mode)], 1, Fraction(0))


def _probability(x: float) -> float:
    return min(1.0, max(x, 0.0)) if x > 0 else 0.0


# -- results ------------------------------------------------------------------


@dataclass(frozen=True)
class SampleSet:
    name: str
    round: int
    nodes: tuple[int, ...]
    probability: float
    seed: int

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass
class SpannerResult:
    spanner: Subgraph
    mode: str
    multiplier: int
    bound: float
    params: ConstructionParams
    initialization: Subgraph
    samples: list[SampleSet] = field(default_factory=list)
    rounds: int = 1
    unsatisfied_history: list[int] = field(default_factory=list)
    certificate: StretchReport | None = None
    p: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def num_edges(self) -> int:
        return self.spanner.num_edges

    @property
    def verified(self) -> bool:
        return self.certificate is not None and self.certificate.passed

    def metadata(self) -> dict:
        g = self.spanner.graph
        cert = self.certificate
        return {
            "schema": 1,
            "mode": self.mode,
            "n": g.n,
            "m": g.m,
            "W": g.max_weight,
            "p": self.p,
            "bound": self.bound,
            "params": asdict(self.params),
            "samples": [
                {"name": s.name, "round": s.round, "size": len(s), "probability": s.probability}
                for s in self.samples
            ],
            "rounds": self.rounds,
            "unsatisfied_history": list(self.unsatisfied_history),
            "init_edges": self.initialization.num_edges,
            "edges": self.num_edges,
            "max_additive_error": cert.max_error if cert is not None else None,
            "verified": self.verified,
            **self.extra,
        }


# -- shared machinery ---------------------------------------------------------


class _Workspace:
    """Per-invocation cache of canonical shortest-path trees of ``g``."""

    def __init__(self, g: WeightedGraph):
        if g.m == 0 and g.n > 1:
            raise ValueError("graph has no edges")
        self.g = g
        self._trees: dict[int, ShortestPathTree] = {}
        self._inits: dict[int, np.ndarray] = {}

    def tree(self, s: int) -> ShortestPathTree:
        t = self._trees.get(s)
        if t is None:
            t = self._trees[s] = sssp_tree(self.g, s)
        return t

    def init_mask(self, d: int) -> np.ndarray:
        m = self._inits.get(d)
        if m is None:
            m = self._inits[d] = d_light_initialization(self.g, d).mask
        return m

    def add_spt(self, r: int, mask: np.ndarray) -> None:
        pe = self.tree(r).parent_edge
        mask[pe[pe >= 0]] = 1

    def add_path(self, s: int, t: int, mask: np.ndarray) -> None:
        tree = self.tree(s)
        kernels.mark_tree_paths(tree.parent, tree.parent_edge, np.array([t], dtype=np.int64), mask)

    def unsatisfied(
        self, mask: np.ndarray, pairs: Sequence[tuple[int, int]], bound: float
    ) -> list[tuple[int, int]]:
        g = self.g
        groups: dict[int, list[int]] = {}
        for s, t in pairs:
            groups.setdefault(s, []).append(t)
        bad = []
        for s, ts in groups.items():
            tarr = np.array(ts, dtype=np.int64)
            dh, *_ = kernels.sssp(g.indptr, g.nbr, g.nbr_w, g.nbr_eid, mask, s)
            limit = self.tree(s).dist[tarr] + bound
            bad.extend((s, int(t)) for t in tarr[dh[tarr] > limit])
        return bad


def _sample(g: WeightedGraph, prob: float, seed: int, round_index: int, tag: int) -> np.ndarray:
    rng = np.random.default_rng([seed, round_index, tag])
    return np.flatnonzero(rng.random(g.n) < prob)


@dataclass
class BoostOutcome:
    mask: np.ndarray
    rounds: int
    history: list[int]
    samples: list[SampleSet]


RoundFn = Callable[[int, list[tuple[int, int]], np.ndarray], list[SampleSet]]


def boost_until_satisfied(
    single_round: RoundFn,
    pairs: DemandPairSet | Sequence[tuple[int, int]],
    bound: float,
    max_rounds: int,
    *,
    workspace: _Workspace,
    mask: np.ndarray | None = None,
) -> BoostOutcome:
    """Repeat independent rounds, unioning edges, until every pair verifies.

    ``single_round(round_index, remaining_pairs, mask)`` adds its edges to
    ``mask`` in place and returns the samples it drew. After each round the
    remaining pairs are re-checked exactly against ``bound``.
    """
    g = workspace.g
    mask = np.zeros(g.m, dtype=np.uint8) if mask is None else mask
    remaining = list(pairs)
    history: list[int] = []
    samples: list[SampleSet] = []
    rounds = 0
    while remaining:
        if rounds >= max_rounds:
            raise ConstructionFailure(
                f"{len(remaining)} demand pairs unsatisfied after {rounds} rounds", remaining
            )
        rounds += 1
        samples.extend(single_round(rounds, remaining, mask))
        remaining = workspace.unsatisfied(mask, remaining, bound)
        history.append(len(remaining))
    return BoostOutcome(mask, rounds, history, samples)


@dataclass
class _PairPlan:
    """Deterministic per-source data: which targets are short, intermediate, long."""

    source: int
    short: np.ndarray
    long: np.ndarray
    long_miss: np.ndarray
    miss: np.ndarray


def _plan(ws: _Workspace, pairs: DemandPairSet, init: np.ndarray, ell: int) -> list[_PairPlan]:
    plans = []
    for s, ts in pairs.by_source().items():
        tree = ws.tree(s)
        miss = kernels.tree_missing_counts(tree.order, tree.parent, tree.parent_edge, init)
        mt = miss[ts]
        sel = mt <= ell
        plans.append(_PairPlan(s, ts[sel], ts[~sel], mt[~sel], miss))
    return plans


def _add_short_paths(ws: _Workspace, plans: list[_PairPlan], mask: np.ndarray) -> None:
    for plan in plans:
        if len(plan.short):
            tree = ws.tree(plan.source)
            kernels.mark_tree_paths(tree.parent, tree.parent_edge, plan.short, mask)


def _add_prefix_suffix(
    ws: _Workspace,
    plans: list[_PairPlan],
    init: np.ndarray,
    ell: int,
    mask: np.ndarray,
    upper: int | None = None,
) -> None:
    """First and last ``ell`` missing edges of each long pair (missing <= upper)."""
    for plan in plans:
        targets = plan.long if upper is None else plan.long[plan.long_miss <= upper]
        if len(targets):
            tree = ws.tree(plan.source)
            kernels.mark_prefix_suffix(
                tree.parent, tree.parent_edge, targets, init, plan.miss, ell, mask
            )


def _finish(
    ws: _Workspace,
    mode: str,
    pairs: DemandPairSet,
    params: ConstructionParams,
    init: np.ndarray,
    outcome: BoostOutcome,
) -> SpannerResult:
    g = ws.g
    mult = MULTIPLIERS[mode.replace("subset-", "")]
    bound = mult * g.max_weight
    spanner = Subgraph(g, outcome.mask)
    cert = verify_stretch(g, spanner, pairs, bound)
    if not cert.passed:  # boosting already checked every pair
        raise AssertionError("certificate disagrees with the boosting check")
    return SpannerResult(
        spanner=spanner,
        mode=mode,
        multiplier=mult,
        bound=bound,
        params=params,
        initialization=Subgraph(g, init),
        samples=outcome.samples,
        rounds=outcome.rounds,
        unsatisfied_history=outcome.history,
        certificate=cert,
        p=pairs.p,
    )


def _check_pairs(g: WeightedGraph, pairs) -> DemandPairSet:
    if not isinstance(pairs, DemandPairSet):
        pairs = DemandPairSet(pairs, g.n)
    for s, t in pairs:
        g.check_node(s)
        g.check_node(t)
    if pairs.p < 1:
        raise ValueError("at least one demand pair is required")
    return pairs


# -- constrained shortest paths -----------------------------------------------


def _trace_state(
    g: WeightedGraph, source: int, width: int, pstate: np.ndarray, pedge: np.ndarray, state: int
) -> tuple[list[int], list[int]]:
    nodes, eids = [state // width], []
    start = source * width
    while state != start:
        eids.append(int(pedge[state]))
        state = int(pstate[state])
        nodes.append(state // width)
    nodes.reverse()
    eids.reverse()
    return nodes, eids


def _constrained_from(
    g: WeightedGraph, mask: np.ndarray, u: int, budget: int, budget_cap: int
):
    budget = min(budget, max(g.n - 1, 0))
    if g.n * (budget + 1) > budget_cap:
        raise ValueError(
            f"constrained search needs {g.n * (budget + 1)} states, above cap {budget_cap}"
        )
    dist, pstate, pedge = kernels.constrained_sssp(
        g.indptr, g.nbr, g.nbr_w, g.nbr_eid, mask, u, budget
    )
    return budget + 1, dist, pstate, pedge


def _best_state(dist: np.ndarray, v: int, width: int) -> int | None:
    row = dist[v]
    k = int(np.argmin(row))  # first minimum: fewest missing edges among ties
    if not math.isfinite(row[k]):
        return None
    return v * width + k


def constrained_shortest_path(
    g: WeightedGraph,
    h: Subgraph,
    u: int,
    v: int,
    budget: int,
    *,
    budget_cap: int = DEFAULT_BUDGET_CAP,
) -> PathRecord | None:
    """Lightest u-v path using at most ``budget`` edges outside ``h``.

    Label-setting search over (node, missing-count) states. Among equal-weight
    optima the one with fewest missing edges wins, then smallest predecessor
    state. Returns ``None`` when no path fits the budget.
    """
    if budget < 0:
        raise ValueError("budget must be non-negative")
    u, v = g.check_node(u), g.check_node(v)
    if h.graph is not g:
        raise ValueError("h is not a subgraph of g")
    width, dist, pstate, pedge = _constrained_from(g, h.mask, u, budget, budget_cap)
    state = _best_state(dist, v, width)
    if state is None:
        return None
    nodes, eids = _trace_state(g, u, width, pstate, pedge, state)
    return PathRecord(tuple(nodes), tuple(eids), float(dist.flat[state]))


# -- subset +4W ---------------------------------------------------------------


def _subset_rounds(
    ws: _Workspace, sources: Sequence[int], d: int, mask: np.ndarray, bound: float
) -> int:
    """Add canonical paths until every source pair is within ``bound``.

    Pairs are visited in lexicographic order. Distances in the growing
    subgraph are recomputed lazily and rechecked right before each addition.
    Returns the number of paths added.
    """
    g = ws.g
    mask |= ws.init_mask(d)
    added = 0
    srcs = sorted(set(int(s) for s in sources))
    for i, s in enumerate(srcs):
        later = np.array(srcs[i + 1 :], dtype=np.int64)
        if not len(later):
            continue
        dg = ws.tree(s).dist
        dh, *_ = kernels.sssp(g.indptr, g.nbr, g.nbr_w, g.nbr_eid, mask, s)
        stale = False
        for t in later[dh[later] > dg[later] + bound].tolist():
            if stale:
                dh, *_ = kernels.sssp(g.indptr, g.nbr, g.nbr_w, g.nbr_eid, mask, s)
                stale = False
            if dh[t] > dg[t] + bound:
                ws.add_path(s, t, mask)
                added += 1
                stale = True
    return added


def subset_spanner_4w(
    g: WeightedGraph,
    sources: Sequence[int],
    d_override: int | None = None,
    *,
    _workspace: _Workspace | None = None,
) -> SpannerResult:
    """+4W spanner for all pairs within ``sources``; deterministic."""
    srcs = sorted(set(g.check_node(s) for s in sources))
    if not srcs:
        raise ValueError("source set must be nonempty")
    ws = _workspace or _Workspace(g)
    sigma = len(srcs)
    d = d_override if d_override is not None else ceil_power_ratio(sigma, Fraction(1, 2), 1, Fraction(0))
    d = _clamp(d, 1, g.n)
    params = ConstructionParams(d=d, ell=1, budget=None, max_rounds=1, seed=0)
    bound = 4 * g.max_weight
    mask = np.zeros(g.m, dtype=np.uint8)
    _subset_rounds(ws, srcs, d, mask, bound)
    pairs = DemandPairSet.subset(srcs)
    outcome = BoostOutcome(mask, 1, [0], [])
    return _finish(ws, "subset-4w", pairs, params, ws.init_mask(d), outcome)


# -- pairwise constructions ---------------------------------------------------


def _pairwise(
    g: WeightedGraph,
    pairs: DemandPairSet,
    mode: str,
    params: ConstructionParams,
    *,
    budget_cap: int = DEFAULT_BUDGET_CAP,
) -> SpannerResult:
    ws = _Workspace(g)
    n = g.n
    d, ell, seed = params.d, params.ell, params.seed
    bound = MULTIPLIERS[mode] * g.max_weight
    init = ws.init_mask(d)
    plans = _plan(ws, pairs, init, ell)

    base = init.copy()
    _add_short_paths(ws, plans, base)
    hub_prob = _probability(1.0 / (ell * d))

    if mode == "2w":

        def single_round(r, remaining, mask):
            mask |= base
            hubs = _sample(g, hub_prob, seed, r, 0)
            for x in hubs.tolist():
                ws.add_spt(x, mask)
            return [SampleSet("R", r, tuple(hubs.tolist()), hub_prob, seed)]

    elif mode == "4w":
        budget = params.budget if params.budget is not None else _clamp(-(-n // (d * d)), 1, n)
        _add_prefix_suffix(ws, plans, init, ell, base, upper=budget)
        far_prob = _probability(d * d / n)

        def single_round(r, remaining, mask):
            mask |= base
            far = _sample(g, far_prob, seed, r, 1)
            for x in far.tolist():
                ws.add_spt(x, mask)
            hubs = _sample(g, hub_prob, seed, r, 2)
            hub_list = hubs.tolist()
            for i, x in enumerate(hub_list):
                later = hub_list[i + 1 :]
                if not later:
                    break
                width, dist, pstate, pedge = _constrained_from(g, mask, x, budget, budget_cap)
                found = []
                for y in later:
                    state = _best_state(dist, y, width)
                    if state is not None:
                        found.append(_trace_state(g, x, width, pstate, pedge, state)[1])
                for eids in found:
                    mask[eids] = 1
            return [
                SampleSet("R1", r, tuple(far.tolist()), far_prob, seed),
                SampleSet("R2", r, tuple(hub_list), hub_prob, seed),
            ]

    elif mode == "8w":
        _add_prefix_suffix(ws, plans, init, ell, base)

        def single_round(r, remaining, mask):
            mask |= base
            hubs = _sample(g, hub_prob, seed, r, 0)
            if len(hubs):
                sub_d = ceil_power_ratio(len(hubs), Fraction(1, 2), 1, Fraction(0))
                _subset_rounds(ws, hubs.tolist(), _clamp(sub_d, 1, n), mask, 4 * g.max_weight)
            return [SampleSet("R", r, tuple(hubs.tolist()), hub_prob, seed)]

    else:  # pragma: no cover - normalize_mode guards this
        raise ValueError(mode)

    outcome = boost_until_satisfied(
        single_round, pairs.pairs, bound, params.max_rounds, workspace=ws
    )
    return _finish(ws, mode, pairs, params, init, outcome)


def pairwise_spanner(
    g: WeightedGraph,
    pairs,
    mode: str,
    params: ConstructionParams | None = None,
    **overrides,
) -> SpannerResult:
    mode = normalize_mode(mode)
    pairs = _check_pairs(g, pairs)
    budget_cap = overrides.pop("budget_cap", DEFAULT_BUDGET_CAP)
    if params is None:
        params = default_params(mode, g.n, pairs.p, **overrides)
    elif overrides:
        raise TypeError("pass either params or keyword overrides, not both")
    return _pairwise(g, pairs, mode, params, budget_cap=budget_cap)


def pairwise_spanner_2w(g, pairs, params=None, **overrides) -> SpannerResult:
    """+2W pairwise spanner: light init, short paths, hub shortest-path trees."""
    return pairwise_spanner(g, pairs, "2w", params, **overrides)


def pairwise_spanner_4w(g, pairs, params=None, **overrides) -> SpannerResult:
    """+4W pairwise spanner.

    Adds trees from a denser hub sample for pairs missing many edges, the
    first and last ``ell`` missing edges for intermediate pairs, and
    budget-constrained paths between a second hub sample.
    """
    return pairwise_spanner(g, pairs, "4w", params, **overrides)


def pairwise_spanner_8w(g, pairs, params=None, **overrides) -> SpannerResult:
    """+8W pairwise spanner: prefix/suffix edges plus a +4W subset spanner on hubs."""
    return pairwise_spanner(g, pairs, "8w", params, **overrides)


def all_pairs_spanner(
    g: WeightedGraph,
    mode: str,
    *,
    seed: int = 0,
    d: int | None = None,
    ell: int | None = None,
    budget: int | None = None,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    budget_cap: int = DEFAULT_BUDGET_CAP,
) -> SpannerResult:
    """Pairwise construction over every node pair, tuned for the threshold p*."""
    mode = normalize_mode(mode)
    if g.n < 2:
        raise ValueError("all-pairs mode needs at least two nodes")
    pairs = DemandPairSet.all_pairs(g.n)
    p_star = all_pairs_threshold(mode, g.n)
    params = default_params(
        mode, g.n, p_star, d=d, ell=ell, budget=budget, max_rounds=max_rounds, seed=seed
    )
    result = _pairwise(g, pairs, mode, params, budget_cap=budget_cap)
    result.extra["p_star"] = p_star
    return result
