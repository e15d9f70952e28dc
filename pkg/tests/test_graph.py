import io
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_weighted
from wspan.generators import random_graph
from wspan.graph import (
    DemandPairSet,
    DisconnectedGraphError,
    GraphError,
    PathRecord,
    Subgraph,
    WeightedGraph,
    dijkstra_sssp,
    read_edge_triples,
    read_edgelist,
    read_pairs,
    shortest_path,
    shortest_path_tree,
    write_edgelist,
)
from wspan.verify import all_shortest_paths, brute_force_distances


def test_path_distances():
    g = WeightedGraph(3, [(0, 1, 0.5), (1, 2, 0.7)])
    dist, parent = dijkstra_sssp(g, 0)
    assert dist.tolist() == [0.0, 0.5, 0.5 + 0.7]
    assert parent.tolist() == [-1, 0, 1]


def test_triangle(triangle):
    dist, _ = dijkstra_sssp(triangle, 0)
    assert dist[2] == 2.0
    assert shortest_path(triangle, 0, 2).nodes == (0, 1, 2)


def test_four_cycle_tie_goes_to_smaller_predecessor():
    # two equal routes 0-1-3 and 0-2-3
    g = WeightedGraph(4, [(0, 2, 1.0), (2, 3, 1.0), (0, 1, 1.0), (1, 3, 1.0)])
    assert shortest_path(g, 0, 3).nodes == (0, 1, 3)


@pytest.mark.parametrize(
    "edges, exc",
    [
        ([(0, 0, 1.0)], GraphError),
        ([(0, 1, 1.0), (1, 0, 2.0)], GraphError),
        ([(0, 1, 0.0)], GraphError),
        ([(0, 1, -1.0)], GraphError),
        ([(0, 1, float("inf"))], GraphError),
        ([(0, 1, float("nan"))], GraphError),
        ([(0, 5, 1.0)], GraphError),
    ],
)
def test_rejects_invalid_edges(edges, exc):
    with pytest.raises(exc):
        WeightedGraph(2, edges)


def test_rejects_disconnected():
    with pytest.raises(DisconnectedGraphError):
        WeightedGraph(4, [(0, 1, 1.0), (2, 3, 1.0)])


def test_single_node():
    g = WeightedGraph(1, [])
    assert g.m == 0
    assert dijkstra_sssp(g, 0)[0].tolist() == [0.0]


def test_invalid_queries(triangle):
    with pytest.raises(ValueError):
        shortest_path(triangle, 1, 1)
    with pytest.raises(ValueError):
        dijkstra_sssp(triangle, 7)


def test_arrays_are_read_only(triangle):
    with pytest.raises(ValueError):
        triangle.ew[0] = 5.0


@pytest.mark.parametrize("seed", range(40))
def test_matches_bellman_ford(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 30))
    g = random_graph(n, int(rng.integers(n - 1, n * (n - 1) // 2 + 1)), seed=seed,
                     unit=seed % 4 == 0)
    table = brute_force_distances(g)
    for s in range(n):
        np.testing.assert_array_equal(dijkstra_sssp(g, s)[0], table[s])


def test_subgraph_distances(small_random):
    h = Subgraph.from_edge_ids(small_random, range(0, small_random.m, 2))
    table = brute_force_distances(h)
    for s in range(0, small_random.n, 7):
        np.testing.assert_array_equal(dijkstra_sssp(h, s)[0], table[s])


def test_canonical_path_is_lexicographic_among_ties():
    # exhaustively on small unit-weight graphs, where ties are everywhere
    rng = np.random.default_rng(0)
    slots = list(itertools.combinations(range(5), 2))
    for bits in rng.choice(1 << len(slots), size=150, replace=False):
        edges = [slots[i] for i in range(len(slots)) if int(bits) >> i & 1]
        try:
            g = random_weighted(rng, 5, edges, unit=True)
        except GraphError:
            continue
        for s, t in itertools.permutations(range(5), 2):
            best, winners = all_shortest_paths(g, s, t)
            path = shortest_path(g, s, t)
            assert path.total_weight == best
            # predecessor chain is minimal when read from t back to s
            assert list(path.nodes)[::-1] == min(w[::-1] for w in winners)


@st.composite
def graphs(draw):
    n = draw(st.integers(2, 9))
    slots = list(itertools.combinations(range(n), 2))
    tree = [(draw(st.integers(0, v - 1)), v) for v in range(1, n)]
    extra = draw(st.lists(st.sampled_from(slots), max_size=len(slots)))
    edges = sorted(set(tree) | {e for e in extra})
    # small integer weights force ties
    ws = draw(st.lists(st.integers(1, 3), min_size=len(edges), max_size=len(edges)))
    return WeightedGraph(n, [(u, v, float(w)) for (u, v), w in zip(edges, ws)])


@settings(max_examples=150, deadline=None)
@given(graphs(), st.data())
def test_subpaths_of_canonical_paths_are_canonical(g, data):
    s = data.draw(st.integers(0, g.n - 1))
    t = data.draw(st.integers(0, g.n - 1).filter(lambda x: x != s))
    path = shortest_path(g, s, t)
    k = len(path.nodes)
    i = data.draw(st.integers(0, k - 2))
    j = data.draw(st.integers(i + 1, k - 1))
    assert shortest_path(g, path.nodes[i], path.nodes[j]).nodes == path.subpath(i, j)


@settings(max_examples=100, deadline=None)
@given(graphs(), st.data())
def test_path_weight_is_distance(g, data):
    s = data.draw(st.integers(0, g.n - 1))
    dist, _ = dijkstra_sssp(g, s)
    for t in range(g.n):
        if t != s:
            p = shortest_path(g, s, t)
            assert PathRecord.from_nodes(g, p.nodes).total_weight == dist[t]


def test_shortest_path_tree(small_random):
    g = small_random
    tree = shortest_path_tree(g, 4)
    assert tree.num_edges == g.n - 1
    np.testing.assert_array_equal(dijkstra_sssp(tree, 4)[0], dijkstra_sssp(g, 4)[0])


def test_tree_input_is_its_own_spt():
    g = WeightedGraph(4, [(0, 1, 1.0), (1, 2, 2.0), (1, 3, 3.0)])
    assert shortest_path_tree(g, 2) == Subgraph.full(g)


def test_edgelist_round_trip(small_random):
    buf = io.StringIO()
    write_edgelist(small_random, buf, comments=["hello"])
    assert read_edgelist(io.StringIO(buf.getvalue())) == small_random


def test_edgelist_parse_errors():
    with pytest.raises(GraphError):
        read_edgelist(io.StringIO("3 2\n0 1 1.0\n"))
    with pytest.raises((GraphError, ValueError)):
        read_edgelist(io.StringIO("3 2\n0 1 1.0\n1 x 1.0\n"))
    with pytest.raises(GraphError):
        read_edgelist(io.StringIO(""))


def test_subgraph_triples_may_be_disconnected():
    n, edges = read_edge_triples(io.StringIO("4 1\n0 1 0.5\n"))
    assert n == 4 and edges == [(0, 1, 0.5)]


def test_demand_pairs_normalized():
    pairs = DemandPairSet([(3, 1), (1, 3), (0, 2)])
    assert pairs.pairs == ((0, 2), (1, 3))
    with pytest.raises(ValueError):
        DemandPairSet([(2, 2)])
    with pytest.raises(ValueError):
        read_pairs(io.StringIO("0 9\n"), n=5)
    assert DemandPairSet.all_pairs(4).p == 6
    assert DemandPairSet.subset([3, 1, 3, 2]).pairs == ((1, 2), (1, 3), (2, 3))
