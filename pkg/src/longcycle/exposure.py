"""Edge-exposure oracle for the random subgraph ``G_p`` of a host graph.

Every host edge has a fixed uniform variate per round, obtained by hashing
``(seed, stream, edge id, round)``.  Query order therefore never changes which
edges come out present, and a state can be replayed from its seed alone.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Iterable, Sequence

import numpy as np

from .graph import Graph, VertexSet, canonical, iter_bits

UNTESTED, PRESENT, ABSENT = 0, 1, 2

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_ROUND = 0xD6E8FEB86659FD93
_INV53 = 1.0 / (1 << 53)


class ExposureError(RuntimeError):
    """Raised when the query-once discipline would be broken."""


def _mix(z: int) -> int:
    z = (z + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = z + np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def derive_seed(*parts: int) -> int:
    """Fold integers into one 64-bit seed; used for (base, point, trial) streams."""
    z = 0x5EED
    for part in parts:
        z = _mix(z ^ (int(part) & _MASK))
    return z


def split_round(p: float) -> float:
    """Per-round probability ``p1`` with ``(1 - p1)**2 == 1 - p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    return 1.0 - math.sqrt(1.0 - p)


def edge_uniform(key: int, eid: int, rnd: int) -> float:
    z = _mix(key ^ _mix((eid * _GOLDEN) & _MASK) ^ ((rnd * _ROUND) & _MASK))
    return (z >> 11) * _INV53


def edge_uniforms(key: int, eids: np.ndarray, rnd: int) -> np.ndarray:
    e = np.asarray(eids, dtype=np.uint64)
    z = _mix_array(e * np.uint64(_GOLDEN))
    z = _mix_array(z ^ np.uint64(key) ^ np.uint64((rnd * _ROUND) & _MASK))
    return (z >> np.uint64(11)).astype(np.float64) * _INV53


class ExposureState:
    """Tri-state record of which host edges have been drawn and how they came out.

    ``query`` draws round zero of an edge; ``second_round`` draws round one of
    edges whose first draw was absent.  Each call carries a tag, and per-tag
    query and success counts are kept in ``queries`` and ``hits``.
    """

    def __init__(self, host: Graph, p: float, seed: int = 0, stream: int = 0) -> None:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability {p} outside [0, 1]")
        self.host = host
        self.p = float(p)
        self.seed = int(seed)
        self.stream = int(stream)
        self.key = _mix(_mix(self.seed & _MASK) ^ (self.stream & _MASK))
        m = host.m
        self.status = np.zeros(m, dtype=np.int8)
        self.draws = np.zeros(m, dtype=np.int8)
        self.untested_adj = list(host.adj)
        self.present_adj = [0] * host.n
        self.tested = 0
        self.successes = 0
        self.queries: Counter[str] = Counter()
        self.hits: Counter[str] = Counter()

    def __repr__(self) -> str:
        return (
            f"ExposureState(n={self.host.n}, p={self.p}, tested={self.tested}, "
            f"successes={self.successes})"
        )

    # lookups

    def edge_id(self, u: int, v: int) -> int:
        return self.host.edge_id(u, v)

    def status_of(self, u: int, v: int) -> int:
        return int(self.status[self.host.edge_id(u, v)])

    def is_present(self, u: int, v: int) -> bool:
        return bool(self.present_adj[u] >> v & 1)

    def is_untested(self, u: int, v: int) -> bool:
        return bool(self.untested_adj[u] >> v & 1)

    def is_absent(self, u: int, v: int) -> bool:
        return self.host.has_edge(u, v) and not (self.is_present(u, v) or self.is_untested(u, v))

    def untested_incident(self, v: int) -> VertexSet:
        return VertexSet(self.untested_adj[v])

    def present_incident(self, v: int) -> VertexSet:
        return VertexSet(self.present_adj[v])

    def revealed_subgraph(self) -> Graph:
        return Graph(self.host.n, tuple(self.present_adj))

    def untested_count(self) -> int:
        return self.host.m - self.tested

    # randomness

    def uniform(self, eid: int, rnd: int = 0) -> float:
        return edge_uniform(self.key, eid, rnd)

    # drawing

    def _record(self, eid: int, hit: bool) -> None:
        u, v = (int(x) for x in self.host.edge_array[eid])
        self.untested_adj[u] &= ~(1 << v)
        self.untested_adj[v] &= ~(1 << u)
        if hit:
            self.present_adj[u] |= 1 << v
            self.present_adj[v] |= 1 << u

    def query(self, u: int, v: int, tag: str = "Q", prob: float | None = None) -> bool:
        """Draw the edge ``uv`` once and return whether it is present."""
        if u == v or not self.host.has_edge(u, v):
            raise ExposureError(f"({u}, {v}) is not a host edge")
        eid = self.host.edge_id(u, v)
        if self.status[eid] != UNTESTED:
            raise ExposureError(f"edge {canonical(u, v)} was already tested")
        q = self.p if prob is None else prob
        hit = self.uniform(eid, 0) < q
        self.status[eid] = PRESENT if hit else ABSENT
        self.draws[eid] = 1
        self.tested += 1
        self.successes += hit
        self.queries[tag] += 1
        self.hits[tag] += hit
        self._record(eid, hit)
        return hit

    def query_edges(
        self, eids: Sequence[int] | np.ndarray, tag: str = "Q", prob: float | None = None
    ) -> np.ndarray:
        """Vectorized :meth:`query` over edge ids; returns the hit mask."""
        eids = np.asarray(eids, dtype=np.int64)
        if eids.size == 0:
            return np.zeros(0, dtype=bool)
        if np.any(self.status[eids] != UNTESTED) or np.unique(eids).size != eids.size:
            raise ExposureError("batch contains an edge that was already tested")
        q = self.p if prob is None else prob
        hit = edge_uniforms(self.key, eids, 0) < q
        self.status[eids] = np.where(hit, PRESENT, ABSENT)
        self.draws[eids] = 1
        nhit = int(hit.sum())
        self.tested += eids.size
        self.successes += nhit
        self.queries[tag] += int(eids.size)
        self.hits[tag] += nhit
        for eid, h in zip(eids.tolist(), hit.tolist()):
            self._record(eid, h)
        return hit

    def internal_untested(self, X: VertexSet | Iterable[int]) -> np.ndarray:
        """Ids of untested host edges with both endpoints in ``X``."""
        inside = np.zeros(self.host.n, dtype=bool)
        inside[list(X)] = True
        ea = self.host.edge_array
        if ea.size == 0:
            return np.zeros(0, dtype=np.int64)
        mask = inside[ea[:, 0]] & inside[ea[:, 1]] & (self.status == UNTESTED)
        return np.flatnonzero(mask)

    def internal_edges(self, X: VertexSet | Iterable[int]) -> np.ndarray:
        inside = np.zeros(self.host.n, dtype=bool)
        inside[list(X)] = True
        ea = self.host.edge_array
        if ea.size == 0:
            return np.zeros(0, dtype=np.int64)
        return np.flatnonzero(inside[ea[:, 0]] & inside[ea[:, 1]])

    def expose_induced(
        self, X: VertexSet | Iterable[int], tag: str = "Q", prob: float | None = None
    ) -> np.ndarray:
        """Query every untested host edge inside ``X``; returns the queried ids."""
        xs = list(X)
        eids = self.internal_untested(xs)
        if eids.size == 0:
            return eids
        q = self.p if prob is None else prob
        hit = edge_uniforms(self.key, eids, 0) < q
        self.status[eids] = np.where(hit, PRESENT, ABSENT)
        self.draws[eids] = 1
        nhit = int(hit.sum())
        self.tested += eids.size
        self.successes += nhit
        self.queries[tag] += int(eids.size)
        self.hits[tag] += nhit
        xb = 0
        for v in xs:
            xb |= 1 << v
        for v in xs:
            self.untested_adj[v] &= ~xb
        ea = self.host.edge_array
        for u, v in ea[eids[hit]].tolist():
            self.present_adj[u] |= 1 << v
            self.present_adj[v] |= 1 << u
        return eids

    def second_round(
        self,
        edges: Iterable[Sequence[int]] | np.ndarray | None = None,
        prob: float | None = None,
        tag: str = "R2",
    ) -> ExposureState:
        """Redraw once-absent edges in a second independent round.

        ``edges`` may be vertex pairs or an array of edge ids.  Passing a
        present edge, an untested edge, or one already redrawn raises.
        """
        if edges is None:
            eids = np.flatnonzero((self.status == ABSENT) & (self.draws == 1))
        elif isinstance(edges, np.ndarray) and edges.ndim == 1:
            eids = edges.astype(np.int64)
        else:
            eids = np.array([self.host.edge_id(u, v) for u, v in edges], dtype=np.int64)
        if eids.size == 0:
            return self
        st = self.status[eids]
        if np.any(st == PRESENT):
            raise ExposureError("second round would redraw a present edge")
        if np.any(st == UNTESTED) or np.any(self.draws[eids] != 1):
            raise ExposureError("second round applies only to edges drawn once and absent")
        q = self.p if prob is None else prob
        hit = edge_uniforms(self.key, eids, 1) < q
        self.draws[eids] = 2
        up = eids[hit]
        self.status[up] = PRESENT
        nhit = int(hit.sum())
        self.successes += nhit
        self.queries[tag] += int(eids.size)
        self.hits[tag] += nhit
        for u, v in self.host.edge_array[up].tolist():
            self.present_adj[u] |= 1 << v
            self.present_adj[v] |= 1 << u
        return self

    def present_edges(self) -> list[tuple[int, int]]:
        return [tuple(e) for e in self.host.edge_array[self.status == PRESENT].tolist()]

    def untested_edges(self) -> list[tuple[int, int]]:
        return [tuple(e) for e in self.host.edge_array[self.status == UNTESTED].tolist()]

    def present_within(self, X: VertexSet | Iterable[int]) -> list[tuple[int, int]]:
        xb = X.bits if isinstance(X, VertexSet) else sum(1 << v for v in set(X))
        out = []
        for u in iter_bits(xb):
            out.extend((u, v) for v in iter_bits(self.present_adj[u] & xb) if v > u)
        return out

    def counters(self) -> dict[str, int]:
        return dict(sorted(self.queries.items()))
