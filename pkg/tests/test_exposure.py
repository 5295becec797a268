import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from longcycle.exposure import (
    ABSENT,
    PRESENT,
    UNTESTED,
    ExposureError,
    ExposureState,
    derive_seed,
    edge_uniform,
    edge_uniforms,
    split_round,
)
from longcycle.graph import Graph, VertexSet
from strategies import graphs


def test_query_extremes():
    k4 = Graph.complete(4)
    assert ExposureState(k4, 1.0, seed=3).query(0, 1)
    assert not ExposureState(k4, 0.0, seed=3).query(0, 1)


def test_query_errors():
    s = ExposureState(Graph.from_edges(3, [(0, 1)]), 0.5)
    s.query(0, 1)
    with pytest.raises(ExposureError):
        s.query(1, 0)
    with pytest.raises(ExposureError):
        s.query(0, 2)
    with pytest.raises(ExposureError):
        s.query(1, 1)
    with pytest.raises(ValueError):
        ExposureState(Graph.complete(2), 1.5)


def test_query_rate_on_fresh_states():
    k4 = Graph.complete(4)
    trials, hits = 100_000, 0
    for seed in range(trials):
        hits += ExposureState(k4, 0.5, seed=seed).query(1, 2)
    assert abs(hits / trials - 0.5) <= 0.01


@pytest.mark.parametrize("p, expected", [(0.0, 0.0), (0.5, 0.2928932188134524), (0.75, 0.5), (1.0, 1.0)])
def test_split_round_values(p, expected):
    assert split_round(p) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("p", [-0.1, 1.1])
def test_split_round_rejects(p):
    with pytest.raises(ValueError):
        split_round(p)


@given(st.floats(0, 1))
def test_split_round_composes(p):
    p1 = split_round(p)
    assert (1 - p1) ** 2 == pytest.approx(1 - p, abs=1e-12)


def test_second_round_zero_and_one():
    k5 = Graph.complete(5)
    s = ExposureState(k5, 0.0, seed=1)
    s.expose_induced(range(5))
    s.second_round()
    assert s.successes == 0 and np.all(s.status == ABSENT)
    s = ExposureState(k5, 1.0, seed=1)
    s.expose_induced(range(5))
    before = s.status.copy()
    s.second_round()
    assert np.array_equal(before, s.status) and np.all(s.draws == 1)


def test_second_round_rejects_present_and_untested():
    k3 = Graph.complete(3)
    s = ExposureState(k3, 1.0)
    s.query(0, 1)
    with pytest.raises(ExposureError):
        s.second_round([(0, 1)])
    with pytest.raises(ExposureError):
        s.second_round([(1, 2)])
    s0 = ExposureState(k3, 0.0)
    s0.query(0, 1)
    s0.second_round([(0, 1)])
    with pytest.raises(ExposureError):
        s0.second_round([(0, 1)])


def test_two_rounds_give_full_rate():
    k6 = Graph.complete(6)
    p1 = split_round(0.5)
    trials, present = 100_000 // 15 + 1, 0
    for seed in range(trials):
        s = ExposureState(k6, p1, seed=seed)
        s.expose_induced(range(6))
        s.second_round()
        present += s.successes
    rate = present / (15 * trials)
    assert abs(rate - 0.5) <= 0.01


def test_revealed_subgraph():
    k5 = Graph.complete(5)
    s = ExposureState(k5, 1.0)
    assert s.revealed_subgraph() == Graph.empty(5)
    s.expose_induced(range(5))
    assert s.revealed_subgraph() == k5
    s = ExposureState(k5, 0.5, seed=9)
    S = [(0, 1), (1, 2), (3, 4)]
    got = {e for e in S if s.query(*e)}
    assert set(s.revealed_subgraph().edges()) == got


def test_untested_incident():
    k4 = Graph.complete(4)
    s = ExposureState(k4, 0.5, seed=2)
    assert s.untested_incident(0) == VertexSet.of([1, 2, 3])
    s.query(0, 2)
    assert s.untested_incident(0) == VertexSet.of([1, 3])
    s.query(0, 1)
    s.query(0, 3)
    assert s.untested_incident(0) == VertexSet()


def test_scalar_and_vector_uniforms_agree():
    rng = random.Random(5)
    key = derive_seed(11, 3)
    eids = np.array([rng.randrange(1 << 40) for _ in range(200)], dtype=np.int64)
    for rnd in (0, 1):
        vec = edge_uniforms(key, eids, rnd)
        for e, u in zip(eids.tolist(), vec.tolist()):
            assert edge_uniform(key, e, rnd) == u
            assert 0.0 <= u < 1.0


@given(graphs(min_n=2, max_n=9), st.integers(0, 2**32), st.floats(0, 1), st.randoms())
def test_query_order_is_irrelevant(g, seed, p, rnd):
    edges = g.edges()
    order = list(edges)
    rnd.shuffle(order)
    a = ExposureState(g, p, seed=seed)
    b = ExposureState(g, p, seed=seed)
    for e in edges:
        a.query(*e)
    for e in order:
        b.query(*e)
    assert a.status.tobytes() == b.status.tobytes()
    c = ExposureState(g, p, seed=seed)
    c.expose_induced(range(g.n))
    assert c.status.tobytes() == a.status.tobytes()


@given(graphs(min_n=2, max_n=9), st.integers(0, 2**32), st.floats(0, 1), st.randoms())
def test_counters_and_draw_discipline(g, seed, p, rnd):
    s = ExposureState(g, p, seed=seed)
    edges = g.edges()
    first = [e for e in edges if rnd.random() < 0.6]
    for e in first:
        s.query(*e, tag="A")
    absent = [e for e in first if s.status_of(*e) == ABSENT]
    s.second_round([e for e in absent if rnd.random() < 0.5], tag="B")
    assert s.tested == int(np.count_nonzero(s.status != UNTESTED))
    assert s.successes == int(np.count_nonzero(s.status == PRESENT))
    assert s.draws.max(initial=0) <= 2
    assert np.all((s.draws == 0) == (s.status == UNTESTED))
    assert s.untested_count() == len(s.untested_edges())
    for u, v in edges:
        assert s.is_present(u, v) == (s.status_of(u, v) == PRESENT)
        assert s.is_untested(u, v) == (s.status_of(u, v) == UNTESTED)
    assert s.counters()["A"] == len(first) if first else "A" not in s.counters()


def test_seed_streams_are_distinct():
    k6 = Graph.complete(6)
    seen = set()
    for seed in range(50):
        s = ExposureState(k6, 0.5, seed=seed)
        s.expose_induced(range(6))
        seen.add(s.status.tobytes())
    assert len(seen) > 40
    assert derive_seed(1, 2, 3) != derive_seed(1, 3, 2)
    assert math.isfinite(derive_seed(0))
