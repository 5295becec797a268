import io

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from longcycle.graph import (
    Graph,
    VertexSet,
    add_edges,
    components,
    edge_count,
    edge_count_between,
    format_edge_list,
    induced,
    neighborhood,
    parse_edge_list,
    read_edge_list,
    write_edge_list,
)
from strategies import cycle_graph, graphs, path_graph, vertex_subsets


def test_neighborhood_examples():
    tri = Graph.complete(3)
    assert neighborhood(tri, VertexSet.of([0])) == VertexSet.of([1, 2])
    assert neighborhood(path_graph(4), VertexSet.of([1, 2])) == VertexSet.of([0, 3])
    k5 = Graph.complete(5)
    assert neighborhood(k5, k5.vertices) == VertexSet()
    assert neighborhood(k5, VertexSet()) == VertexSet()


def test_edge_count_between_examples():
    assert edge_count_between(Graph.complete(4), [0, 1], [2, 3]) == 4
    c4 = cycle_graph(4)
    assert edge_count_between(c4, [0], [2]) == 0
    assert edge_count_between(c4, [0, 2], [1, 3]) == 4
    with pytest.raises(ValueError):
        edge_count_between(c4, [0, 1], [1, 2])


def test_induced_examples():
    assert induced(Graph.complete(5), [1, 3, 4]) == Graph.complete(3)
    sub = induced(cycle_graph(5), [2, 3, 4])
    assert sub == path_graph(3)
    assert [sub.original(v) for v in range(3)] == [2, 3, 4]
    empty = induced(Graph.complete(4), [])
    assert empty.n == 0 and empty.m == 0


def test_add_edges_examples():
    assert add_edges(path_graph(3), [(0, 2)]) == Graph.complete(3)
    k3 = add_edges(Graph.complete(3), [(0, 1), (1, 0)])
    assert k3 == Graph.complete(3) and k3.m == 3
    assert add_edges(Graph.empty(4), [(0, 1), (1, 2), (2, 3), (3, 0)]) == cycle_graph(4)
    with pytest.raises(ValueError):
        add_edges(Graph.empty(3), [(1, 1)])


@given(graphs())
def test_adjacency_invariants(g):
    for u in range(g.n):
        assert not g.has_edge(u, u)
        assert g.degree(u) == g.adj[u].bit_count()
        for v in range(g.n):
            assert g.has_edge(u, v) == g.has_edge(v, u)
    assert 2 * g.m == sum(g.degrees)


@given(graphs())
def test_induced_on_everything_is_identity(g):
    assert induced(g, g.vertices) == g


@given(st.data())
def test_edge_count_decomposition(data):
    g = data.draw(graphs())
    X = data.draw(vertex_subsets(g.n))
    Y = data.draw(vertex_subsets(g.n)) - X
    total = induced(g, X | Y).m
    assert edge_count_between(g, X, Y) + edge_count(g, X) + edge_count(g, Y) == total


@given(st.data())
def test_add_then_induce_commutes(data):
    g = data.draw(graphs(min_n=2))
    X = data.draw(vertex_subsets(g.n))
    xs = X.to_list()
    pairs = data.draw(st.lists(st.tuples(st.sampled_from(range(g.n)), st.sampled_from(range(g.n))), max_size=8))
    pairs = [(u, v) for u, v in pairs if u != v]
    inside = [(u, v) for u, v in pairs if u in X and v in X]
    relabel = {v: i for i, v in enumerate(xs)}
    left = induced(add_edges(g, pairs), X)
    right = add_edges(induced(g, X), [(relabel[u], relabel[v]) for u, v in inside])
    assert left == right


@given(st.data())
def test_neighborhood_matches_networkx(data):
    g = data.draw(graphs())
    X = data.draw(vertex_subsets(g.n))
    h = g.to_networkx()
    expected = set().union(*(set(h[v]) for v in X)) - set(X) if X else set()
    assert set(neighborhood(g, X)) == expected


@given(graphs())
def test_components_match_networkx(g):
    ours = sorted(sorted(c) for c in components(g))
    theirs = sorted(sorted(c) for c in nx.connected_components(g.to_networkx()))
    assert ours == theirs


@given(g=graphs())
def test_edge_list_round_trip(tmp_path_factory, g):
    text = format_edge_list(g)
    assert text.splitlines()[0] == f"{g.n} {g.m}"
    assert parse_edge_list(text) == g
    path = tmp_path_factory.mktemp("el") / "g.txt"
    write_edge_list(g, path)
    assert read_edge_list(path) == g
    buf = io.StringIO()
    write_edge_list(g, buf)
    assert buf.getvalue() == text


@pytest.mark.parametrize(
    "text",
    ["", "3 1\n0 0\n", "3 1\n2 1\n", "3 2\n0 1\n", "3 2\n0 1\n0 1\n", "2 1\n0 5\n"],
)
def test_edge_list_rejects_malformed(text):
    with pytest.raises(ValueError):
        parse_edge_list(text)
