"""Seeded graph and demand-set generators. Same seed, same output."""

from __future__ import annotations

import numpy as np

from wspan.graph import DemandPairSet, DisconnectedGraphError, WeightedGraph
from wspan.light import hub_counterexample

KINDS = ("random-uniform", "random-power-weight", "figure1", "grid")
MAX_ATTEMPTS = 1000


def _weights(rng: np.random.Generator, count: int, w_max: float, exponent: float, unit: bool):
    if unit:
        return np.full(count, float(w_max))
    # 1 - U lies in (0, 1], so weights land in (0, w_max]
    return w_max * (1.0 - rng.random(count)) ** exponent


def _edge_sample(rng: np.random.Generator, n: int, m: int) -> list[tuple[int, int]]:
    total = n * (n - 1) // 2
    if total <= 1_000_000:
        idx = np.sort(rng.choice(total, size=m, replace=False))
        iu, iv = np.triu_indices(n, 1)
        return list(zip(iu[idx].tolist(), iv[idx].tolist()))
    seen: set[tuple[int, int]] = set()
    while len(seen) < m:
        u, v = (int(x) for x in rng.integers(0, n, size=2))
        if u != v:
            seen.add((min(u, v), max(u, v)))
    return sorted(seen)


def random_graph(
    n: int,
    m: int,
    *,
    seed: int = 0,
    w_max: float = 1.0,
    exponent: float = 1.0,
    unit: bool = False,
    max_attempts: int = MAX_ATTEMPTS,
) -> WeightedGraph:
    """Uniform G(n, m) with connectivity enforced by rejection.

    Weights are ``w_max * (1 - U) ** exponent``; ``exponent > 1`` skews them
    toward zero.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if not n - 1 <= m <= n * (n - 1) // 2:
        raise ValueError(f"need n-1 <= m <= n(n-1)/2, got n={n}, m={m}")
    if not w_max > 0:
        raise ValueError("w_max must be positive")
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        pairs = _edge_sample(rng, n, m)
        w = _weights(rng, m, w_max, exponent, unit)
        try:
            return WeightedGraph(n, [(u, v, x) for (u, v), x in zip(pairs, w.tolist())])
        except DisconnectedGraphError:
            continue
    raise ValueError(f"no connected sample in {max_attempts} attempts (n={n}, m={m})")


def grid_graph(
    rows: int, cols: int, *, seed: int = 0, w_max: float = 1.0, unit: bool = False
) -> WeightedGraph:
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be positive")
    rng = np.random.default_rng(seed)
    edges = []
    for r in range(rows):
        for c in range(cols):
            x = r * cols + c
            if c + 1 < cols:
                edges.append((x, x + 1))
            if r + 1 < rows:
                edges.append((x, x + cols))
    w = _weights(rng, len(edges), w_max, 1.0, unit)
    return WeightedGraph(rows * cols, [(u, v, x) for (u, v), x in zip(edges, w.tolist())])


def generate(kind: str, *, seed: int = 0, **kw) -> WeightedGraph:
    if kind == "random-uniform":
        return random_graph(kw["n"], kw["m"], seed=seed, w_max=kw.get("w_max", 1.0),
                            unit=kw.get("unit", False))
    if kind == "random-power-weight":
        return random_graph(kw["n"], kw["m"], seed=seed, w_max=kw.get("w_max", 1.0),
                            exponent=kw.get("exponent", 3.0))
    if kind == "figure1":
        return hub_counterexample(kw["d"], kw["ell"], kw["epsilon"], kw.get("w_max", 1.0))
    if kind == "grid":
        return grid_graph(kw["rows"], kw["cols"], seed=seed, w_max=kw.get("w_max", 1.0),
                          unit=kw.get("unit", False))
    raise ValueError(f"unknown graph kind {kind!r}; expected one of {', '.join(KINDS)}")


def random_pairs(n: int, p: int, *, seed: int = 0) -> DemandPairSet:
    total = n * (n - 1) // 2
    if not 0 <= p <= total:
        raise ValueError(f"cannot draw {p} distinct pairs from {n} nodes")
    rng = np.random.default_rng(seed)
    if total <= 1_000_000:
        idx = rng.choice(total, size=p, replace=False)
        iu, iv = np.triu_indices(n, 1)
        return DemandPairSet(zip(iu[idx].tolist(), iv[idx].tolist()), n)
    seen: set[tuple[int, int]] = set()
    while len(seen) < p:
        u, v = (int(x) for x in rng.integers(0, n, size=2))
        if u != v:
            seen.add((min(u, v), max(u, v)))
    return DemandPairSet(seen, n)


def random_subset(n: int, sigma: int, *, seed: int = 0) -> list[int]:
    rng = np.random.default_rng(seed)
    return sorted(rng.choice(n, size=sigma, replace=False).tolist())


def is_connected(n: int, edges) -> bool:
    """Union-find connectivity check, independent of the graph class."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = n
    for u, v, *_ in edges:
        a, b = find(u), find(v)
        if a != b:
            parent[a] = b
            comps -= 1
    return comps == 1
