"""Rotation-extension machinery: longest paths, Hamilton cycles, boosters, expanders.

Paths are vertex lists.  A rotation of ``P = (x0, ..., xt)`` with fixed end
``x0`` along an edge ``xt xi`` (``i < t - 1``) produces
``(x0, ..., xi, xt, x(t-1), ..., x(i+1))`` with new end ``x(i+1)``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from . import exact
from .blocks import decompose
from .graph import Graph, VertexSet, add_edges, canonical, components, iter_bits

RngLike = random.Random | int | None


def _rng(rng: RngLike) -> random.Random:
    if isinstance(rng, random.Random):
        return rng
    return random.Random(0 if rng is None else rng)


def is_path(h: Graph, path: Sequence[int]) -> bool:
    if len(set(path)) != len(path):
        return False
    return all(h.has_edge(a, b) for a, b in zip(path, path[1:]))


def verify_cycle(h: Graph, cycle: Sequence[int]) -> bool:
    """Distinct vertices, at least three, consecutive pairs (cyclically) adjacent."""
    if len(cycle) < 3 or len(set(cycle)) != len(cycle):
        return False
    return all(h.has_edge(cycle[i - 1], cycle[i]) for i in range(len(cycle)))


def verify_hamilton_cycle(h: Graph, cycle: Sequence[int]) -> bool:
    return len(cycle) == h.n and verify_cycle(h, cycle)


def rotate(path: list[int], i: int) -> list[int]:
    """Rotate at the last vertex along the edge to ``path[i]``."""
    return path[: i + 1] + path[:i:-1]


# rotation closure


@dataclass
class PathState:
    """A path with a fixed first vertex and the endpoints reachable by rotations.

    ``back[end]`` is ``(previous end, pivot)``: rotating the path that ends at
    the previous end along its edge to ``pivot`` yields a path ending at
    ``end``.  The original endpoint maps to ``None``.
    """

    path: tuple[int, ...]
    back: dict[int, tuple[int, int] | None] = field(default_factory=dict)

    @property
    def fixed(self) -> int:
        return self.path[0]

    @property
    def endpoints(self) -> set[int]:
        return set(self.back)

    def path_to(self, end: int) -> list[int]:
        steps = []
        cur = end
        while self.back[cur] is not None:
            prev, pivot = self.back[cur]
            steps.append(pivot)
            cur = prev
        path = list(self.path)
        for pivot in reversed(steps):
            path = rotate(path, path.index(pivot))
        return path


def rotation_closure(
    h: Graph, P: Sequence[int], fixed: int | None = None, limit: int | None = None
) -> PathState:
    """All endpoints reachable from ``P`` by rotations, keeping ``fixed`` in place.

    The default fixed vertex is the smaller endpoint.  ``limit`` caps the
    number of endpoints explored.
    """
    if not P or not is_path(h, P):
        raise ValueError("input is not a path of the graph")
    path = list(P)
    if fixed is None:
        fixed = min(path[0], path[-1])
    if fixed == path[-1]:
        path.reverse()
    elif fixed != path[0]:
        raise ValueError("fixed vertex must be an endpoint")
    state = PathState(tuple(path), {path[-1]: None})
    if len(path) < 3:
        return state
    queue = [path]
    on = VertexSet.of(path).bits
    while queue:
        cur = queue.pop(0)
        end = cur[-1]
        pos = {v: i for i, v in enumerate(cur)}
        for y in iter_bits(h.adj[end] & on):
            i = pos[y]
            if i >= len(cur) - 2:
                continue
            new_end = cur[i + 1]
            if new_end in state.back:
                continue
            state.back[new_end] = (end, y)
            if limit is not None and len(state.back) >= limit:
                return state
            queue.append(rotate(cur, i))
    return state


def rotation_closures(h: Graph, P: Sequence[int]) -> tuple[PathState, PathState]:
    """Closures fixing the smaller endpoint first, then the other one."""
    a, b = P[0], P[-1]
    lo, hi = min(a, b), max(a, b)
    return rotation_closure(h, P, fixed=lo), rotation_closure(h, P, fixed=hi)


# heuristic search


class _Search:
    """Rotation-extension walk on a single path, shared by the path and cycle searches."""

    def __init__(self, h: Graph, rng: random.Random) -> None:
        self.h = h
        self.adj = h.adj
        self.n = h.n
        self.rng = rng

    def run(self, path: list[int], budget: int, want_cycle: bool) -> tuple[list[int], bool]:
        adj = self.adj
        n = self.n
        rng = self.rng
        pos = [-1] * n
        for i, v in enumerate(path):
            pos[v] = i
        on = 0
        for v in path:
            on |= 1 << v
        best = list(path)
        steps = 0
        stuck_flips = 0
        while True:
            # greedy extension at the current end, absorbing scarce vertices first
            while True:
                end = path[-1]
                off = adj[end] & ~on
                if not off:
                    break
                w = min(iter_bits(off), key=lambda x: (adj[x] & ~on).bit_count())
                pos[w] = len(path)
                path.append(w)
                on |= 1 << w
            if len(path) > len(best):
                best = list(path)
            end, head = path[-1], path[0]
            if len(path) == n:
                if not want_cycle:
                    return path, True
                if len(path) >= 3 and adj[end] >> head & 1:
                    return path, True
            elif len(path) >= 3 and adj[end] >> head & 1:
                # the path closes into a cycle; reopen it next to an outside neighbor
                reopened = False
                for i, x in enumerate(path):
                    if adj[x] & ~on:
                        path[:] = path[i + 1 :] + path[: i + 1]
                        for j, v in enumerate(path):
                            pos[v] = j
                        reopened = True
                        break
                if reopened:
                    continue
            if adj[head] & ~on:
                path.reverse()
                for j, v in enumerate(path):
                    pos[v] = j
                continue
            if steps >= budget:
                return best, False
            steps += 1
            prev = path[-2] if len(path) >= 2 else -1
            cands = adj[end] & on & ~(1 << end)
            if prev >= 0:
                cands &= ~(1 << prev)
            if not cands or rng.random() < 0.05:
                stuck_flips += 1
                if stuck_flips > 2 * n + 10 and not cands:
                    return best, False
                path.reverse()
                for j, v in enumerate(path):
                    pos[v] = j
                continue
            options = list(iter_bits(cands))
            y = options[rng.randrange(len(options))]
            i = pos[y]
            path[i + 1 :] = path[:i:-1]
            for j in range(i + 1, len(path)):
                pos[path[j]] = j


def _default_budget(n: int) -> int:
    return 40 * n + 200


def longest_path_rotation(
    h: Graph, restarts: int = 3, budget: int | None = None, rng: RngLike = None
) -> list[int]:
    """Longest path found by rotation-extension walks; never claims optimality."""
    if h.n == 0:
        return []
    rng = _rng(rng)
    budget = _default_budget(h.n) if budget is None else budget
    search = _Search(h, rng)
    degs = h.degrees
    best: list[int] = []
    for r in range(max(1, restarts)):
        if r == 0:
            start = min(range(h.n), key=lambda v: (degs[v] == 0, degs[v], v))
        else:
            start = rng.randrange(h.n)
        path, spanning = search.run([start], budget, want_cycle=False)
        if len(path) > len(best):
            best = path
        if spanning:
            break
    return best


def hamilton_obstruction(h: Graph) -> str | None:
    """A cheap certificate that ``h`` has no Hamilton cycle, if one applies."""
    n = h.n
    if n < 3:
        return "fewer than three vertices"
    degs = h.degrees
    if min(degs) < 2:
        return "a vertex has degree below two"
    if len(components(h)) > 1:
        return "graph is disconnected"
    forced = [0] * n
    for v in range(n):
        if degs[v] == 2:
            for w in iter_bits(h.adj[v]):
                forced[w] += 1
    if max(forced) > 2:
        return "a vertex is forced onto three cycle edges"
    if len(decompose(h).cut_vertices) > 0:
        return "graph has a cut vertex"
    return None


class HamiltonVerdict(NamedTuple):
    """``status`` is ``yes``, ``no`` or ``unknown``; ``cycle`` certifies ``yes``."""

    status: str
    cycle: tuple[int, ...] | None
    reason: str


def hamiltonicity(
    h: Graph,
    rng: RngLike = None,
    restarts: int = 4,
    budget: int | None = None,
    start_path: Sequence[int] | None = None,
) -> HamiltonVerdict:
    """Exact for ``n <= 16``; rotation-extension search with restarts beyond.

    A ``no`` above 16 vertices only comes from a structural obstruction; a
    failed search reports ``unknown``.
    """
    reason = hamilton_obstruction(h)
    if reason is not None:
        return HamiltonVerdict("no", None, reason)
    if h.n <= 16:
        cyc = exact.exact_hamilton_cycle(h)
        if cyc is None:
            return HamiltonVerdict("no", None, "exact search")
        if not verify_hamilton_cycle(h, cyc):
            raise AssertionError("exact search returned an invalid cycle")
        return HamiltonVerdict("yes", tuple(cyc), "exact search")
    rng = _rng(rng)
    budget = _default_budget(h.n) if budget is None else budget
    search = _Search(h, rng)
    degs = h.degrees
    low = sorted(range(h.n), key=lambda v: (degs[v], v))
    for r in range(max(1, restarts)):
        if r == 0 and start_path:
            init = list(start_path)
        elif r == 0:
            init = [low[0]]
        else:
            init = [rng.choice(low[: max(1, h.n // 4)])]
        path, ok = search.run(init, budget, want_cycle=True)
        if ok:
            if not verify_hamilton_cycle(h, path):
                raise AssertionError("rotation search produced an invalid cycle")
            return HamiltonVerdict("yes", tuple(path), "rotation search")
    return HamiltonVerdict("unknown", None, "search budget exhausted")


def find_hamilton_cycle(h: Graph, rng: RngLike = None, **kwargs) -> list[int] | None:
    verdict = hamiltonicity(h, rng=rng, **kwargs)
    return list(verdict.cycle) if verdict.cycle else None


# boosters


@dataclass(frozen=True)
class BoosterSet:
    pairs: frozenset[tuple[int, int]]
    longest_path: int

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair: object) -> bool:
        if not isinstance(pair, tuple) or len(pair) != 2:
            return False
        return canonical(*pair) in self.pairs


def boosters(h: Graph) -> BoosterSet:
    """Every non-edge whose addition creates a Hamilton cycle or a longer path."""
    if h.n > 14:
        raise ValueError("exact booster enumeration supports at most 14 vertices")
    if h.n < 3:
        raise ValueError("booster enumeration needs at least three vertices")
    if exact.exact_hamilton_cycle(h) is not None:
        raise ValueError("graph is already Hamiltonian")
    L, mat = exact.booster_matrix(exact.adjacency_array(h), h.n)
    pairs = frozenset((a, b) for a in range(h.n) for b in range(a + 1, h.n) if mat[a, b])
    return BoosterSet(pairs, int(L))


# sprinkling


class SprinkleResult(NamedTuple):
    graph: Graph
    success: bool
    cycle: tuple[int, ...] | None
    boosters_consumed: int
    edges_retained: int
    edges_processed: int


def _np_rng(rng: np.random.Generator | int | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(0 if rng is None else rng)


def sprinkle_to_hamiltonicity(
    h: Graph,
    candidates: Iterable[tuple[int, int]],
    prob: float,
    rng: np.random.Generator | int | None = None,
    decide: Callable[[list[tuple[int, int]]], Sequence[bool]] | None = None,
    budget: int | None = None,
    closure_limit: int = 64,
) -> SprinkleResult:
    """Add candidate non-edges in random order, each kept with probability ``prob``.

    ``decide`` replaces the coin flips: it receives the candidates in
    processing order and returns which of them are retained.  The returned
    graph always contains every retained edge.  Boosters are tracked exactly
    up to 14 vertices; above that an edge counts as a booster when the
    rotation closure of the current path shows it extends or closes the path.
    """
    gen = _np_rng(rng)
    cands = [canonical(u, v) for u, v in candidates]
    for u, v in cands:
        if h.has_edge(u, v):
            raise ValueError(f"candidate ({u}, {v}) is already an edge")
    order = [cands[i] for i in gen.permutation(len(cands))]
    if decide is None:
        keep = gen.random(len(order)) < prob
    else:
        keep = np.asarray(decide(order), dtype=bool)
    retained = [e for e, k in zip(order, keep) if k]
    final = add_edges(h, retained)
    seed = int(gen.integers(1 << 62))
    search_rng = random.Random(seed)

    def done(cycle, consumed, processed) -> SprinkleResult:
        return SprinkleResult(final, True, tuple(cycle), consumed, len(retained), processed)

    if hamilton_obstruction(final) is not None:
        return SprinkleResult(final, False, None, 0, len(retained), len(retained))

    current = h
    consumed = 0
    if h.n <= 14:
        verdict = hamiltonicity(h)
        if verdict.status == "yes":
            return done(verdict.cycle, 0, 0)
        if h.n < 3:
            bset = BoosterSet(frozenset(), 0)
        else:
            bset = boosters(h)
        for idx, e in enumerate(retained):
            current = add_edges(current, [e])
            if e not in bset:
                continue
            consumed += 1
            verdict = hamiltonicity(current)
            if verdict.status == "yes":
                return done(verdict.cycle, consumed, idx + 1)
            nxt = boosters(current)
            if nxt.longest_path <= bset.longest_path:
                raise AssertionError("booster did not lengthen the longest path")
            bset = nxt
        return SprinkleResult(final, False, None, consumed, len(retained), len(retained))

    search = _Search(h, search_rng)
    path, ok = search.run(
        [min(range(h.n), key=lambda v: (h.degrees[v], v))], 2 * h.n, want_cycle=True
    )
    if ok and verify_hamilton_cycle(h, path):
        return done(path, 0, 0)
    adj = list(h.adj)

    def closure(p: list[int]) -> PathState:
        return rotation_closure(Graph(h.n, tuple(adj)), p, fixed=p[0], limit=closure_limit)

    state = closure(path)
    for idx, (a, b) in enumerate(retained):
        adj[a] |= 1 << b
        adj[b] |= 1 << a
        on = VertexSet.of(state.path).bits
        ends = state.back
        new_path = None
        if a in ends and not on >> b & 1:
            new_path = state.path_to(a) + [b]
        elif b in ends and not on >> a & 1:
            new_path = state.path_to(b) + [a]
        elif (a == state.fixed and b in ends) or (b == state.fixed and a in ends):
            # the new edge closes the path into a cycle
            p = state.path_to(b if a == state.fixed else a)
            if len(p) == h.n:
                if verify_hamilton_cycle(Graph(h.n, tuple(adj)), p):
                    return done(p, consumed + 1, idx + 1)
            for i, x in enumerate(p):
                out = adj[x] & ~on
                if out:
                    new_path = p[i + 1 :] + p[: i + 1] + [(out & -out).bit_length() - 1]
                    break
        if new_path is None:
            continue
        consumed += 1
        g_now = Graph(h.n, tuple(adj))
        path, ok = _Search(g_now, search_rng).run(new_path, h.n, want_cycle=True)
        if ok and verify_hamilton_cycle(g_now, path):
            return done(path, consumed, idx + 1)
        state = closure(path)

    verdict = hamiltonicity(final, rng=search_rng, budget=budget, start_path=state.path)
    if verdict.status == "yes":
        return done(verdict.cycle, consumed, len(retained))
    return SprinkleResult(final, False, None, consumed, len(retained), len(retained))


# expansion


class ExpansionCheck(NamedTuple):
    """Outcome of an expansion test.

    ``exact`` is false when some part was sampled: a reported violation is
    then still definitive, but ``holds=True`` is only evidence.
    """

    holds: bool
    exact: bool
    reason: str

    def __bool__(self) -> bool:
        return self.holds


def is_m2_expander(
    h: Graph, m: int, samples: int = 10_000, rng: RngLike = None, exact_limit: int = 24
) -> ExpansionCheck:
    """Whether every ``X`` with ``|X| <= m`` has ``|N(X)| >= 2|X|``."""
    if m <= 0:
        return ExpansionCheck(True, True, "vacuous")
    n = h.n
    if 3 * m > n:
        return ExpansionCheck(False, True, "sets larger than n/3 cannot expand by two")
    if n <= exact_limit:
        smallest = exact.min_violating_size(exact.adjacency_array(h), n, m)
        if smallest <= m:
            return ExpansionCheck(False, True, f"violating set of size {smallest}")
        return ExpansionCheck(True, True, "exhaustive")
    if min(h.degrees) < 2:
        return ExpansionCheck(False, True, "violating set of size 1")
    gen = _rng(rng)
    for size in range(2, m + 1):
        for _ in range(samples):
            X = gen.sample(range(n), size)
            xb = 0
            nb = 0
            for v in X:
                xb |= 1 << v
                nb |= h.adj[v]
            if (nb & ~xb).bit_count() < 2 * size:
                return ExpansionCheck(False, True, f"violating set of size {size}")
    return ExpansionCheck(True, False, "sampled")


def pprime(m: int) -> float:
    """Edge probability ``(log m + log log m) / m`` used by the endgame."""
    return (math.log(m) + math.log(math.log(m))) / m


def _short_path_in(h: Graph, D: int, max_len: int) -> bool:
    """Is there a path of length in ``1..max_len`` joining two vertices of ``D``
    (or a cycle of length ``<= max_len`` through one)?"""
    if max_len < 1:
        return False
    for d in iter_bits(D):
        dist = {d: 0}
        branch = {d: -1}
        frontier = [d]
        depth = 0
        while frontier and depth < max_len:
            depth += 1
            nxt = []
            for x in frontier:
                for y in iter_bits(h.adj[x]):
                    if y not in dist:
                        dist[y] = depth
                        branch[y] = y if x == d else branch[x]
                        if D >> y & 1:
                            return True
                        nxt.append(y)
            frontier = nxt
        if max_len >= 3:
            for x, dx in dist.items():
                if x == d:
                    continue
                for y in iter_bits(h.adj[x]):
                    if y in dist and y != d and branch[y] != branch[x]:
                        if dx + dist[y] + 1 <= max_len:
                            return True
    return False


def is_pprime_expander(
    h: Graph,
    D: VertexSet | Iterable[int],
    p_prime: float,
    samples: int = 10_000,
    rng: RngLike = None,
) -> ExpansionCheck:
    """Check the three conditions of the endgame expander with exceptional set ``D``."""
    m = h.n
    dset = D if isinstance(D, VertexSet) else VertexSet.of(D)
    if m < 3:
        return ExpansionCheck(False, True, "order too small")
    if len(dset) > m**0.09:
        return ExpansionCheck(False, True, "exceptional set too large")
    max_len = math.floor(2 * math.log(m) / (3 * math.log(math.log(m))))
    if _short_path_in(h, dset.bits, max_len):
        return ExpansionCheck(False, True, "short path between exceptional vertices")
    ratio = m * p_prime / 1000
    cap = math.floor(1 / p_prime) if p_prime > 0 else m
    rest = ((1 << m) - 1) & ~dset.bits
    if m <= 24:
        verts = list(iter_bits(rest))
        adj = np.array(h.adj, dtype=np.int64)
        for size in range(1, min(cap, len(verts)) + 1):
            need = ratio * size
            for combo in combinations(verts, size):
                xb = 0
                nb = 0
                for v in combo:
                    xb |= 1 << v
                    nb |= int(adj[v])
                if (nb & ~xb).bit_count() < need:
                    return ExpansionCheck(False, True, f"set of size {size} expands too little")
        return ExpansionCheck(True, True, "exhaustive")
    if ratio * cap <= 1:
        # Every admissible set only needs one outside neighbor, so a violation is
        # a union of components avoiding D of total size at most 1/p'.
        for comp in components(h):
            if comp.isdisjoint(dset) and len(comp) <= cap:
                return ExpansionCheck(False, True, "small component avoids the exceptional set")
        return ExpansionCheck(True, True, "component criterion")
    gen = _rng(rng)
    pool = list(iter_bits(rest))
    for size in range(1, min(cap, len(pool)) + 1):
        need = ratio * size
        for _ in range(samples):
            X = gen.sample(pool, size)
            xb = 0
            nb = 0
            for v in X:
                xb |= 1 << v
                nb |= h.adj[v]
            if (nb & ~xb).bit_count() < need:
                return ExpansionCheck(False, True, f"set of size {size} expands too little")
    return ExpansionCheck(True, False, "sampled")

