"""Pseudo-cliques: detection, a greedy disjoint cover, and two-round preparation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import exact
from .exposure import ABSENT, ExposureState, split_round
from .graph import Graph, VertexSet, induced, iter_bits
from .posa import hamiltonicity


def default_eps(k: int) -> float:
    """``min(log(k) ** -0.1, 0.05)``; the asymptotic value is far above 1/4 at desk scale."""
    if k < 3:
        return 0.05
    return min(math.log(k) ** -0.1, 0.05)


def _check_eps(eps: float) -> None:
    if not 0 < eps < 0.25:
        raise ValueError(f"eps={eps} must lie in (0, 1/4)")


def is_pseudo_clique(g: Graph, C: VertexSet, k: int, eps: float) -> bool:
    """``(1-4eps)k < |C| <= (1+eps)k`` and every vertex has ``>= (1-4eps)k`` neighbors in ``C``."""
    _check_eps(eps)
    size = len(C)
    lo = (1 - 4 * eps) * k
    if not lo < size <= (1 + eps) * k:
        return False
    return all((g.adj[v] & C.bits).bit_count() >= lo for v in C)


@dataclass
class PreparedClique:
    """Outcome of the two exposure rounds inside one pseudo-clique.

    ``low_degree`` holds the vertices whose first-round degree inside the
    clique was at most the threshold; ``remainder`` is the clique without them.
    ``cycle`` is a verified Hamilton cycle of the remainder after both rounds.
    """

    vertices: tuple[int, ...]
    low_degree: frozenset[int]
    remainder: tuple[int, ...]
    cycle: tuple[int, ...] | None
    few_low: bool
    dense: bool
    dense_exact: bool
    hamiltonian: bool

    @property
    def survived(self) -> bool:
        return self.few_low and self.dense and self.hamiltonian


@dataclass
class PseudoCliqueCover:
    cliques: list[VertexSet]
    outcasts: VertexSet
    k: int
    eps: float
    prepared: list[PreparedClique] | None = None
    low_degree: VertexSet = field(default_factory=VertexSet)
    failed: VertexSet = field(default_factory=VertexSet)

    @property
    def ell(self) -> int:
        return len(self.outcasts)

    @property
    def waste(self) -> VertexSet:
        return self.low_degree | self.failed

    def survivors(self) -> list[PreparedClique]:
        return [c for c in (self.prepared or []) if c.survived]

    def walk_cycles(self) -> list[tuple[int, ...]]:
        return [c.cycle for c in self.survivors() if c.cycle]


def _peel(g: Graph, cand: int, lo: float, hi: float) -> int:
    """Drop minimum-degree vertices until the set could be a pseudo-clique, or give up."""
    deg = {v: (g.adj[v] & cand).bit_count() for v in iter_bits(cand)}
    while True:
        size = len(deg)
        if size <= lo:
            return 0
        v_min = min(deg, key=lambda v: (deg[v], v))
        if deg[v_min] >= lo and size <= hi:
            return cand
        cand &= ~(1 << v_min)
        del deg[v_min]
        for w in iter_bits(g.adj[v_min] & cand):
            deg[w] -= 1


def greedy_cover(g: Graph, k: int, eps: float) -> PseudoCliqueCover:
    """Disjoint pseudo-cliques grown greedily from high-degree seeds.

    Each candidate starts as the closed neighborhood of a seed inside the
    residual vertex set and is peeled down by repeatedly removing a
    minimum-degree vertex; the first candidate passing the definition is
    accepted and the search restarts on what is left.
    """
    _check_eps(eps)
    lo = (1 - 4 * eps) * k
    hi = (1 + eps) * k
    residual = (1 << g.n) - 1
    cliques: list[VertexSet] = []
    while True:
        rdeg = {v: (g.adj[v] & residual).bit_count() for v in iter_bits(residual)}
        seeds = sorted((v for v in rdeg if rdeg[v] >= lo), key=lambda v: (-rdeg[v], v))
        accepted = 0
        for v in seeds:
            cand = _peel(g, (g.adj[v] | 1 << v) & residual, lo, hi)
            if cand and is_pseudo_clique(g, VertexSet(cand), k, eps):
                accepted = cand
                break
        if not accepted:
            break
        cliques.append(VertexSet(accepted))
        residual &= ~accepted
    return PseudoCliqueCover(cliques, VertexSet(residual), k, eps)


def _sampled_sparse_pair(
    adj_bits: list[int], members: list[int], t: int, samples: int, rng: np.random.Generator
) -> bool:
    c = len(members)
    if 2 * t > c:
        return False
    index = {v: i for i, v in enumerate(members)}
    A = np.zeros((c, c), dtype=np.float32)
    for i, v in enumerate(members):
        for w in iter_bits(adj_bits[v]):
            j = index.get(w)
            if j is not None:
                A[i, j] = 1.0
    chosen = np.argpartition(rng.random((samples, c)), t - 1, axis=1)[:, :t]
    ind = np.zeros((samples, c), dtype=np.float32)
    np.put_along_axis(ind, chosen, 1.0, axis=1)
    covered = (ind @ A + ind) > 0
    uncovered = c - covered.sum(axis=1)
    return bool(np.any(uncovered >= t))


def prepare_cliques(
    cover: PseudoCliqueCover,
    s: ExposureState,
    threshold: float | None = None,
    samples: int = 10_000,
    rng: np.random.Generator | int | None = None,
) -> PseudoCliqueCover:
    """Expose each clique's internal edges in two rounds at ``split_round(s.p)``.

    Checks per clique: few low-degree vertices (fewer than ``eps*k/2``), no
    two disjoint ``6*eps*k``-sets of the remainder without a first-round edge
    between them, and a Hamilton cycle of the remainder after both rounds.
    The low-degree threshold defaults to ``log(k) / 100``.
    """
    k, eps = cover.k, cover.eps
    p1 = split_round(s.p)
    thr = math.log(k) / 100 if threshold is None else threshold
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng or 0)
    t = math.ceil(6 * eps * k)
    prepared = []
    low_all = 0
    failed = 0
    for C in cover.cliques:
        s.expose_induced(C, tag="Q1", prob=p1)
        first_round = {v: s.present_adj[v] & C.bits for v in C}
        low = frozenset(v for v in C if first_round[v].bit_count() <= thr)
        internal = s.internal_edges(C)
        redraw = internal[(s.status[internal] == ABSENT) & (s.draws[internal] == 1)]
        s.second_round(redraw, prob=p1, tag="Q1b")
        rem_bits = C.bits & ~VertexSet.of(low).bits
        remainder = tuple(iter_bits(rem_bits))
        few_low = len(low) < eps * k / 2
        if len(remainder) <= 24:
            sub = induced(Graph(s.host.n, tuple(first_round.get(v, 0) for v in range(s.host.n))), remainder)
            dense = not (len(remainder) >= 2 * t and exact.has_sparse_pair(exact.adjacency_array(sub), sub.n, t))
            dense_exact = True
        else:
            dense = not _sampled_sparse_pair(
                [first_round.get(v, 0) for v in range(s.host.n)], list(remainder), t, samples, gen
            )
            dense_exact = False
        cycle = None
        if remainder:
            g_rem = induced(s.revealed_subgraph(), remainder)
            verdict = hamiltonicity(g_rem, rng=int(gen.integers(1 << 31)))
            if verdict.cycle is not None:
                cycle = tuple(remainder[i] for i in verdict.cycle)
        prep = PreparedClique(
            vertices=tuple(C),
            low_degree=low,
            remainder=remainder,
            cycle=cycle,
            few_low=few_low,
            dense=dense,
            dense_exact=dense_exact,
            hamiltonian=cycle is not None,
        )
        prepared.append(prep)
        low_all |= VertexSet.of(low).bits
        if not prep.survived:
            failed |= C.bits
    cover.prepared = prepared
    cover.low_degree = VertexSet(low_all)
    cover.failed = VertexSet(failed)
    return cover
