from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from longcycle.dfs import DfsPriority, Forest, dfs_clique_walk, dfs_explore, far_pairs
from longcycle.exposure import ExposureState
from longcycle.graph import Graph
from checks import component_violations, dfs_violations, naive_ancestor
from strategies import graphs, path_graph


def _cliques_with_bridge(bridge_present: bool):
    edges = list(combinations(range(6), 2)) + list(combinations(range(6, 12), 2)) + [(5, 6)]
    s = ExposureState(Graph.from_edges(12, edges), 1.0, seed=4)
    s.expose_induced(range(6), tag="prep")
    s.expose_induced(range(6, 12), tag="prep")
    if bridge_present:
        s.query(5, 6, tag="prep")
    return s


def test_complete_graph_gives_a_path():
    s = ExposureState(Graph.complete(4), 1.0)
    T, log = dfs_explore(s)
    assert T.tree_edges() == [(0, 1), (1, 2), (2, 3)]
    assert T.roots == (0,)
    assert sum(hit for *_, hit in log) == 3 == s.successes


def test_disjoint_triangles_two_roots():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    T, _ = dfs_explore(ExposureState(g, 1.0))
    assert T.roots == (0, 3)
    assert len(set(T.comp)) == 2


def test_no_edges_all_roots():
    T, log = dfs_explore(ExposureState(Graph.complete(4), 0.0))
    assert T.roots == (0, 1, 2, 3)
    assert len(log) == 6 and not any(hit for *_, hit in log)


def test_clique_walk_single_clique():
    s = ExposureState(Graph.complete(6), 1.0)
    s.expose_induced(range(6), tag="prep")
    T, log = dfs_clique_walk(s, [(0, 1, 2, 3, 4, 5)])
    assert log == []
    assert sorted(T.depth) == list(range(6))
    assert T.tree_edges() == [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]


@pytest.mark.parametrize("bridge_present", [False, True])
def test_clique_walk_two_cliques(bridge_present):
    s = _cliques_with_bridge(bridge_present)
    T, log = dfs_clique_walk(s, [(0, 1, 2, 3, 4, 5), (6, 7, 8, 9, 10, 11)])
    assert T.tree_edges() == [(a, a + 1) for a in range(11)]
    assert sum(hit for *_, hit in log) <= (0 if bridge_present else 1)


def test_clique_walk_rejects_missing_cycle_edge():
    s = ExposureState(Graph.complete(5), 1.0)
    s.query(0, 1)
    with pytest.raises(ValueError):
        dfs_clique_walk(s, [(0, 1, 2)])


@given(graphs(max_n=12), st.integers(0, 1000), st.floats(0, 1))
def test_no_cliques_matches_plain_dfs(g, seed, p):
    a, la = dfs_explore(ExposureState(g, p, seed=seed))
    b, lb = dfs_clique_walk(ExposureState(g, p, seed=seed), [])
    assert (a.parent, a.order, a.comp) == (b.parent, b.order, b.comp) and la == lb


def test_ancestor_and_distance_examples():
    T = Forest.from_parents([-1, 0, 1])
    assert T.is_ancestor(0, 2) and T.tree_distance(0, 2) == 2
    S = Forest.from_parents([-1, 0, 0])
    assert not S.is_ancestor(1, 2) and not S.is_ancestor(2, 1)
    assert S.tree_distance(1, 2) == 2 and S.lca(1, 2) == 0
    two = Forest.from_parents([-1, -1])
    with pytest.raises(ValueError):
        two.tree_distance(0, 1)
    assert T.dump() == "0 -1 0 0\n1 0 1 0\n2 1 2 0\n"


def test_far_pairs_examples():
    star = Graph.from_edges(6, [(0, i) for i in range(1, 6)] + [(1, 2), (3, 4)])
    s = ExposureState(star, 1.0)
    for i in range(1, 6):
        s.query(0, i)
    T = Forest.from_parents([-1, 0, 0, 0, 0, 0])
    assert far_pairs(T, s, 2) == []
    path = Graph.from_edges(11, [(i, i + 1) for i in range(10)] + [(0, 10), (2, 9)])
    s = ExposureState(path, 1.0)
    for i in range(10):
        s.query(i, i + 1)
    T = Forest.path(list(range(11)))
    assert far_pairs(T, s, 8) == [(0, 10)]
    assert far_pairs(T, s, 6) == [(0, 10), (2, 9)]
    assert far_pairs(T, s, 11) == []


@st.composite
def forests(draw, max_n=14):
    n = draw(st.integers(1, max_n))
    parent = [-1]
    for v in range(1, n):
        parent.append(draw(st.integers(-1, v - 1)))
    perm = draw(st.permutations(range(n)))
    relabeled = [-1] * n
    for v, p in enumerate(parent):
        relabeled[perm[v]] = -1 if p < 0 else perm[p]
    return Forest.from_parents(relabeled)


@given(forests())
def test_forest_queries_match_naive(T):
    h = nx.Graph()
    h.add_nodes_from(range(T.n))
    h.add_edges_from(T.tree_edges())
    for u in range(T.n):
        for v in range(T.n):
            assert T.is_ancestor(u, v) == naive_ancestor(T, u, v)
            if T.comp[u] == T.comp[v]:
                d = nx.shortest_path_length(h, u, v)
                assert T.tree_distance(u, v) == d
                path = T.tree_path(u, v)
                assert path[0] == u and path[-1] == v and len(path) == d + 1
            else:
                with pytest.raises(ValueError):
                    T.tree_distance(u, v)


@given(graphs(max_n=14), st.integers(0, 10_000), st.floats(0, 1))
def test_exploration_certificate(g, seed, p):
    s = ExposureState(g, p, seed=seed)
    T, log = dfs_explore(s)
    members = range(g.n)
    assert dfs_violations(s, T, log, members) == []
    assert component_violations(s, T, members) == []
    assert s.successes <= max(0, g.n - 1)


@given(graphs(max_n=14), st.integers(0, 10_000), st.floats(0, 1), st.randoms())
def test_exploration_on_subset_and_priority(g, seed, p, rnd):
    members = [v for v in range(g.n) if rnd.random() < 0.7]
    order = list(range(g.n))
    rnd.shuffle(order)
    s = ExposureState(g, p, seed=seed)
    T, log = dfs_explore(s, DfsPriority(tuple(order)), vertices=members)
    assert set(T.members) == set(members)
    assert dfs_violations(s, T, log, members) == []
    assert component_violations(s, T, members) == []
    if T.roots:
        assert T.roots[0] == min(members, key=order.index)


@given(graphs(max_n=12, density=0.5), st.integers(0, 1000), st.integers(3, 12))
def test_far_pairs_matches_definition(g, seed, k):
    s = ExposureState(g, 0.5, seed=seed)
    T, _ = dfs_explore(s, vertices=[v for v in range(g.n) if v % 3])
    expected = [
        (u, v)
        for u, v in s.untested_edges()
        if T.comp[u] >= 0 and T.comp[u] == T.comp[v] and T.tree_distance(u, v) >= k + 1
    ]
    assert far_pairs(T, s, k) == sorted(expected)


def test_path_host_gives_path_forest():
    T, _ = dfs_explore(ExposureState(path_graph(7), 1.0))
    assert T.tree_edges() == [(i, i + 1) for i in range(6)]
