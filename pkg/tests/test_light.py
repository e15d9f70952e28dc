import numpy as np
import pytest

from wspan.generators import random_graph
from wspan.graph import PathRecord, Subgraph, WeightedGraph, shortest_path
from wspan.light import (
    LightInitParams,
    MissingEdge,
    MissingEdgeList,
    adjacent_node_count,
    adversarial_initialization,
    all_neighborhoods,
    classify_missing_edges,
    count_prelight_postlight,
    d_light_initialization,
    d_neighborhood,
    hub_counterexample,
    hub_counterexample_path,
    missing_edges,
    neighborhood_union,
)


def _light_by_sorting(g, d):
    keep = set()
    for u in range(g.n):
        inc = sorted(((w, e) for _, e, w in g.incident(u)))
        keep.update(e for _, e in inc[:d])
    return keep


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("d", [1, 2, 5])
def test_light_init_matches_sorting(seed, d):
    g = random_graph(30, 90, seed=seed, unit=seed % 3 == 0)
    h = d_light_initialization(g, d)
    assert set(h.edge_ids().tolist()) == _light_by_sorting(g, d)


def test_light_init_size_bound(small_random):
    for d in (1, 3, 8):
        assert d_light_initialization(small_random, d).num_edges <= d * small_random.n


def test_low_degree_nodes_keep_everything():
    g = WeightedGraph(3, [(0, 1, 1.0), (1, 2, 2.0)])
    assert d_light_initialization(g, 5) == Subgraph.full(g)


def test_invalid_d():
    with pytest.raises(ValueError):
        LightInitParams(0)


def test_neighborhoods_consistent(small_random):
    nb = all_neighborhoods(small_random, 3)
    for u in range(small_random.n):
        assert d_neighborhood(small_random, u, 3).as_set() == nb[u]
        assert len(nb[u]) == min(3, small_random.degree(u))


def _mlist(ws):
    return MissingEdgeList(tuple(MissingEdge(i, i, i + 1, w, i) for i, w in enumerate(ws)))


@pytest.mark.parametrize(
    "weights, counts",
    [
        ([1.0, 2.0, 3.0], (1, 3)),
        ([3.0, 1.0, 2.0], (2, 2)),
        ([1.0] * 5, (5, 5)),
        ([0.4], (1, 1)),
    ],
)
def test_classification(weights, counts):
    assert count_prelight_postlight(classify_missing_edges(_mlist(weights))) == counts


def test_classification_flags():
    m = classify_missing_edges(_mlist([3.0, 1.0, 2.0]))
    assert [e.pre_light for e in m] == [True, True, False]
    assert [e.post_light for e in m] == [False, True, True]


@pytest.mark.parametrize("seed", range(20))
def test_prelight_postlight_cover(seed):
    rng = np.random.default_rng(seed)
    ws = rng.integers(1, 4, size=int(rng.integers(1, 12))).astype(float)
    pre, post = count_prelight_postlight(classify_missing_edges(_mlist(ws)))
    assert pre + post >= len(ws) + 1


def test_missing_edges_oriented():
    g = WeightedGraph(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)])
    h = Subgraph.from_edge_ids(g, [1])
    m = missing_edges(PathRecord.from_nodes(g, [0, 1, 2, 3]), h)
    assert [(e.u, e.v, e.position) for e in m] == [(0, 1, 0), (2, 3, 2)]
    back = missing_edges(PathRecord.from_nodes(g, [3, 2, 1, 0]), h)
    assert [(e.u, e.v) for e in back] == [(3, 2), (1, 0)]


def test_hub_counterexample_shape():
    g = hub_counterexample(2, 3, 0.1, 1.0)
    assert (g.n, g.m) == (6, 11)
    with pytest.raises(ValueError):
        hub_counterexample(2, 3, 0.5, 1.0)


@pytest.mark.parametrize("d,ell", [(1, 1), (2, 3), (3, 6), (4, 10)])
def test_hub_counterexample_behaviour(d, ell):
    g = hub_counterexample(d, ell, 0.1, 2.0 * ell)
    path = hub_counterexample_path(ell, g)
    assert shortest_path(g, 0, ell).nodes == path.nodes
    heavy = adversarial_initialization(g, d)
    assert len(missing_edges(path, heavy)) == ell
    assert adjacent_node_count(path, heavy) == d
    light = d_light_initialization(g, d)
    assert len(missing_edges(path, light)) == 0


def test_neighborhood_union_selectors(small_random):
    g = small_random
    h = d_light_initialization(g, 2)
    path = shortest_path(g, 0, g.n - 1)
    union = neighborhood_union(path, h, 2)
    assert neighborhood_union(path, h, 2, which="pre_light") <= union | set()
    with pytest.raises(ValueError):
        neighborhood_union(path, Subgraph.empty(g), 2, which="bogus")
