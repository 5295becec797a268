"""The six-step search for a cycle of length at least ``k + 1`` in ``G_p``.

Steps: pseudo-clique cover and two-round preparation, clique-walking DFS with
a drain of far untested pairs, the crossing-pair block algorithm, per-block
rotating-cycle merges, vertex classification diagnostics, and the endgame on
a dense set ``X = C ∪ N`` by exposure plus sprinkling.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left, bisect_right
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .blocks import BlockDecomposition, block_algorithm, decompose
from .cliques import PseudoCliqueCover, default_eps, greedy_cover, prepare_cliques
from .dfs import Forest, dfs_clique_walk, far_pairs
from .exposure import ABSENT, ExposureState, derive_seed
from .graph import Graph, VertexSet, components, induced, iter_bits
from .posa import hamilton_obstruction, is_pprime_expander, pprime, sprinkle_to_hamiltonicity
from .rotating import (
    CycleCertificate,
    RotatingCycle,
    build_rotating_cycle,
    merge_clique_clique,
    merge_mixed,
    merge_rotating_disjoint,
    merge_rotating_intersecting,
)

SPRINKLE_SHARE = 0.25


# classification


@dataclass(frozen=True)
class VertexFlags:
    descendants: int
    untested: int
    poor: bool
    full: bool
    branching: bool


@dataclass
class VertexClassification:
    """Flags per ``(vertex, block index)`` for every block of the decomposition."""

    flags: dict[tuple[int, int], VertexFlags]

    def of(self, v: int, block: int) -> VertexFlags:
        return self.flags[(v, block)]

    def in_block(self, block: int) -> dict[int, VertexFlags]:
        return {v: f for (v, b), f in self.flags.items() if b == block}

    def counts(self) -> dict[str, int]:
        c = Counter()
        for f in self.flags.values():
            c["poor"] += f.poor
            c["rich"] += not f.poor
            c["full"] += f.full
            c["branching"] += f.branching
        return dict(c)


def classify_vertices(
    T: Forest, d: BlockDecomposition, s: ExposureState, k: int, eps: float
) -> VertexClassification:
    flags: dict[tuple[int, int], VertexFlags] = {}
    for bi, block in enumerate(d.blocks):
        bbits = VertexSet.of(block).bits
        pres = sorted(T.pre[v] for v in block if T.pre[v] >= 0)
        desc = {}
        for v in block:
            if T.pre[v] < 0:
                desc[v] = 0
                continue
            desc[v] = bisect_right(pres, T.post[v]) - bisect_left(pres, T.pre[v])
        for v in block:
            rich_kids = sum(
                1 for c in (T.children[v] if T.pre[v] >= 0 else ()) if bbits >> c & 1 and desc[c] > eps * k
            )
            untested = (s.untested_adj[v] & bbits).bit_count()
            flags[(v, bi)] = VertexFlags(
                descendants=desc[v],
                untested=untested,
                poor=desc[v] <= eps * k,
                full=untested >= (1 - eps) * k,
                branching=rich_kids >= 2,
            )
    return VertexClassification(flags)


def exceptional_counts(
    host: Graph,
    cover: PseudoCliqueCover,
    T: Forest,
    d: BlockDecomposition,
    s: ExposureState,
    tested_by: Counter,
    k: int,
    eps: float,
) -> dict[str, int]:
    """Sizes of four exceptional vertex sets; reported only, never enforced.

    ``waste_neighbors``: outcasts with many neighbors in the waste.
    ``heavily_queried``: vertices touched by at least ``eps*k/3`` queries.
    ``clique_block_tops``: cut vertices that are the top of a clique's block.
    ``untested_block_tops``: other cut vertices with many untested edges into
    blocks they top.
    """
    waste = cover.waste.bits
    covered = 0
    for C in cover.cliques:
        covered |= C.bits
    z1 = set()
    for u in iter_bits(((1 << host.n) - 1) & ~covered & ~waste):
        if (host.adj[u] & waste).bit_count() >= eps / 3 * host.degree(u):
            z1.add(u)
    alive = [v for v in range(host.n) if not waste >> v & 1 and v not in z1]
    z2 = {v for v in alive if tested_by[v] >= eps * k / 3}
    smallest = {}
    for bi, block in enumerate(d.blocks):
        members = [v for v in block if T.pre[v] >= 0]
        if members:
            smallest[bi] = min(members, key=lambda v: T.pre[v])
    clique_blocks = set()
    for prep in cover.survivors():
        rem = set(prep.remainder)
        for bi, block in enumerate(d.blocks):
            if rem and rem <= set(block):
                clique_blocks.add(bi)
    z3 = {
        smallest[bi]
        for bi in clique_blocks
        if bi in smallest and smallest[bi] in d.cut_vertices and smallest[bi] not in z1 | z2
    }
    z4 = set()
    for v in d.cut_vertices:
        if v in z1 or v in z2 or v in z3:
            continue
        count = 0
        for w in iter_bits(s.untested_adj[v]):
            bi = d.common_block(v, w) if d.comp[w] >= 0 else None
            if bi is not None and smallest.get(bi) == v:
                count += 1
        if count >= eps * k / 3:
            z4.add(v)
    return {
        "waste_neighbors": len(z1),
        "heavily_queried": len(z2),
        "clique_block_tops": len(z3),
        "untested_block_tops": len(z4),
    }


# endgame


@dataclass
class EndgameResult:
    success: bool
    certificate: CycleCertificate | None
    reason: str
    diagnostics: dict = field(default_factory=dict)


def endgame_good_pair(
    g: Graph,
    C: VertexSet | Iterable[int],
    N: VertexSet | Iterable[int],
    s: ExposureState,
    p: float,
    k: int,
    eps: float | None = None,
    rng: np.random.Generator | int | None = None,
    tag: str = "Q6",
) -> EndgameResult:
    """Look for a Hamilton cycle of ``G_p[C ∪ N]`` by exposure plus sprinkling.

    Untested edges inside ``X`` are exposed at ``pa`` and the absent ones are
    redrawn at ``pb`` with ``(1 - pa)(1 - pb) = 1 - p``; edges tested earlier
    keep their status.  The first-round graph must be a p'-expander for the
    low-degree set ``D``; the redrawn edges are then added in random order.
    """
    eps = default_eps(k) if eps is None else eps
    cset = C if isinstance(C, VertexSet) else VertexSet.of(C)
    nset = N if isinstance(N, VertexSet) else VertexSet.of(N)
    kept_n = [v for v in nset if v in cset or (g.adj[v] & cset.bits).bit_count() >= eps * k]
    X = cset | VertexSet.of(kept_n)
    diag: dict = {"size": len(X), "dropped": len(nset) - len(kept_n)}
    if len(X) < max(k + 1, 3):
        return EndgameResult(False, None, "set smaller than k+1", diag)
    pb = 1 - (1 - p) ** SPRINKLE_SHARE
    pa = 1 - (1 - p) ** (1 - SPRINKLE_SHARE)
    fresh = s.expose_induced(X, tag=tag, prob=pa)
    redraw = fresh[s.status[fresh] == ABSENT] if fresh.size else fresh
    s.second_round(redraw, prob=pb, tag=tag + "b")
    verts = X.to_list()
    index = {v: i for i, v in enumerate(verts)}
    final_graph = induced(Graph(g.n, tuple(s.present_adj)), verts)
    obstruction = hamilton_obstruction(final_graph)
    if obstruction is not None:
        diag["obstruction"] = obstruction
        return EndgameResult(False, None, "final graph not Hamiltonian", diag)
    ea = g.edge_array
    later = set()
    for eid in redraw.tolist():
        u, v = ea[eid]
        later.add((index[int(u)], index[int(v)]))
    first_adj = list(final_graph.adj)
    for a, b in later:
        if final_graph.has_edge(a, b):
            first_adj[a] &= ~(1 << b)
            first_adj[b] &= ~(1 << a)
    first = Graph(final_graph.n, tuple(first_adj))
    m = first.n
    pp = pprime(m)
    D = VertexSet.of(v for v in range(m) if first.degree(v) < m * pp / 100)
    diag["D"] = len(D)
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    check = is_pprime_expander(first, D, pp, samples=200, rng=int(gen.integers(1 << 31)))
    diag["expander"] = check.reason
    if not check.holds:
        return EndgameResult(False, None, "first round is not a p'-expander", diag)
    cands = sorted(later)
    status = {e: final_graph.has_edge(*e) for e in cands}
    result = sprinkle_to_hamiltonicity(
        first, cands, pb, rng=gen, decide=lambda order: [status[e] for e in order]
    )
    diag["boosters"] = result.boosters_consumed
    diag["retained"] = result.edges_retained
    if not result.success:
        return EndgameResult(False, None, "sprinkling ended without a Hamilton cycle", diag)
    cycle = [verts[i] for i in result.cycle]
    cert = CycleCertificate(tuple(cycle), ("endgame",), len(cycle))
    problems = cert.problems(s)
    if problems:
        raise AssertionError(f"endgame produced an invalid cycle: {problems}")
    return EndgameResult(True, cert, "hamiltonian", diag)


def detect_good_pairs(
    g: Graph, candidates: Sequence[VertexSet], k: int, eps: float, max_n: int = 10
) -> list[tuple[VertexSet, VertexSet]]:
    """Greedy ``(C, N)`` shapes: ``|N| <= max_n`` and ``e(C - N, V - (C ∪ N)) <= eps*k``.

    ``N`` grows one vertex at a time, always by the vertex that most reduces
    the boundary count; candidates whose ``C ∪ N`` cannot reach ``k + 1``
    vertices are skipped.
    """
    full = (1 << g.n) - 1
    out = []
    seen = set()
    for C in candidates:
        if C.bits in seen:
            continue
        seen.add(C.bits)
        nbits = 0

        def boundary(nb: int) -> int:
            inner = C.bits & ~nb
            outside = full & ~(C.bits | nb)
            return sum((g.adj[v] & outside).bit_count() for v in iter_bits(inner))

        current = boundary(0)
        while current > eps * k and nbits.bit_count() < max_n:
            pool = 0
            for v in iter_bits(C.bits & ~nbits):
                if g.adj[v] & full & ~C.bits & ~nbits:
                    pool |= 1 << v
                    pool |= g.adj[v] & ~C.bits & ~nbits
            best, best_val = -1, current
            for v in iter_bits(pool):
                val = boundary(nbits | 1 << v)
                if val < best_val:
                    best, best_val = v, val
            if best < 0:
                break
            nbits |= 1 << best
            current = best_val
        if current <= eps * k and (C.bits | nbits).bit_count() >= k + 1:
            out.append((C, VertexSet(nbits)))
    return out


# pipeline


@dataclass
class PipelineResult:
    success: bool
    stage: str
    certificate: CycleCertificate | None
    queries: dict[str, int]
    diagnostics: dict
    state: ExposureState | None = field(default=None, repr=False, compare=False)

    def as_dict(self) -> dict:
        return {
            "stage": self.stage,
            "cycle": list(self.certificate.cycle) if self.certificate else [],
            "queries": dict(sorted(self.queries.items())),
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


class _Run:
    def __init__(self, host: Graph, k: int, p: float, seed: int, eps: float) -> None:
        self.host, self.k, self.p, self.seed, self.eps = host, k, p, seed, eps
        self.s = ExposureState(host, p, seed=seed)
        self.diag: dict = {"eps": eps}

    def done(self, stage: str, cert: CycleCertificate | None) -> PipelineResult:
        if cert is not None:
            problems = cert.problems(self.s, self.k)
            if problems:
                raise AssertionError(f"certificate failed verification: {problems}")
        return PipelineResult(cert is not None, stage, cert, self.s.counters(), self.diag, self.s)

    def long_enough(self, cert: CycleCertificate | None) -> bool:
        return cert is not None and len(cert) >= self.k + 1

    def endgame(self, pairs: list[tuple[VertexSet, VertexSet]]) -> CycleCertificate | None:
        attempts = []
        for i, (C, N) in enumerate(pairs):
            res = endgame_good_pair(
                self.host, C, N, self.s, self.p, self.k, self.eps, rng=derive_seed(self.seed, 6, i)
            )
            attempts.append({"size": res.diagnostics.get("size"), "reason": res.reason})
            if res.success:
                self.diag["endgame"] = attempts
                return res.certificate
        self.diag["endgame"] = attempts
        return None

    def run(self) -> PipelineResult:
        host, k, eps, s = self.host, self.k, self.eps, self.s
        n = host.n
        if 4 * eps >= 1:
            self.diag["mode"] = "endgame-only"
            cert = self.endgame([(VertexSet.full(n), VertexSet())])
            return self.done("step6", cert)

        cover = greedy_cover(host, k, eps)
        prepare_cliques(cover, s, rng=derive_seed(self.seed, 1))
        self.diag.update(
            cover=len(cover.cliques),
            outcasts=cover.ell,
            survivors=len(cover.survivors()),
            waste=len(cover.waste),
        )
        alive = VertexSet.full(n) - cover.waste

        T, dfs_log = dfs_clique_walk(s, cover.walk_cycles(), vertices=alive)
        tested_by: Counter = Counter()
        for u, w, _ in dfs_log:
            tested_by[u] += 1
            tested_by[w] += 1
        for u, v in far_pairs(T, s, k):
            tested_by[u] += 1
            tested_by[v] += 1
            if s.query(u, v, "Q2"):
                cycle = T.tree_path(u, v)
                return self.done("step2", CycleCertificate(tuple(cycle), ("far-pair",), k + 1))
        reach = Graph(n, tuple(s.present_adj[v] | s.untested_adj[v] for v in range(n)))
        if max((len(c) for c in components(reach)), default=0) < k + 1:
            self.diag["present_edges"] = s.successes
            return self.done("step2", None)

        base = Graph.from_edges(n, T.tree_edges())
        M, d, block_log = block_algorithm(base, s, vertices=alive, tag="Q3")
        for step in block_log:
            if step.queried:
                tested_by[step.u] += 1
                tested_by[step.v] += 1
        self.diag["blocks"] = len(d.blocks)

        cert = self.step4(cover, T, d)
        if cert is not None:
            return self.done("step4", cert)

        cls = classify_vertices(T, d, s, k, eps)
        self.diag["classification"] = cls.counts()
        self.diag["exceptional"] = exceptional_counts(host, cover, T, d, s, tested_by, k, eps)

        cands = [VertexSet.of(b) for b in sorted(d.blocks, key=len, reverse=True) if len(b) >= k - 9]
        cands += sorted(cover.cliques, key=len, reverse=True)
        pairs = detect_good_pairs(host, cands, k, eps)
        self.diag["good_pairs"] = len(pairs)
        return self.done("step6", self.endgame(pairs))

    def step4(self, cover: PseudoCliqueCover, T: Forest, d: BlockDecomposition) -> CycleCertificate | None:
        s, k, eps = self.s, self.k, self.eps
        errors: Counter = Counter()
        tried = 0
        for bi in sorted(range(len(d.blocks)), key=lambda i: (-len(d.blocks[i]), i)):
            block = d.blocks[bi]
            if len(block) < k + 1:
                continue
            bset = VertexSet.of(block)
            cliques = [c for c in cover.survivors() if c.cycle and VertexSet.of(c.cycle) <= bset]
            if len(cliques) >= 2:
                try:
                    cert = merge_clique_clique(s, bset, cliques[0].cycle, cliques[1].cycle, k, eps)
                    if self.long_enough(cert):
                        return cert
                except ValueError:
                    errors["clique-clique"] += 1
            for c in cliques:
                if len(c.cycle) >= k + 1:
                    return CycleCertificate(tuple(c.cycle), ("clique-hamilton",), k + 1)
            cls = classify_vertices(T, _single(d, bi), s, k, eps)
            full = [v for v, f in cls.in_block(0).items() if f.full and T.pre[v] >= 0]
            full.sort(key=lambda v: (not cls.of(v, 0).poor, T.pre[v]))
            found: list[RotatingCycle] = []
            for v in full:
                tried += 1
                try:
                    J = build_rotating_cycle(s, T, bset, v, k, eps)
                except ValueError:
                    errors["rotating-precondition"] += 1
                    continue
                if isinstance(J, CycleCertificate):
                    return J
                if J is None:
                    continue
                for c in cliques:
                    try:
                        cert = merge_mixed(s, T, bset, J, c.cycle, k, eps)
                        if self.long_enough(cert):
                            return cert
                    except ValueError:
                        errors["mixed"] += 1
                for J0 in found:
                    try:
                        if J0.vertex_set.isdisjoint(J.vertex_set):
                            cert = merge_rotating_disjoint(s, T, bset, J0, J, k, eps)
                        else:
                            cert = merge_rotating_intersecting(s, T, bset, J0, J, k, eps)
                        if self.long_enough(cert):
                            return cert
                    except ValueError:
                        errors["rotating-merge"] += 1
                found.append(J)
        self.diag["step4"] = {"pivots_tried": tried, "errors": dict(sorted(errors.items()))}
        return None


def _single(d: BlockDecomposition, bi: int) -> BlockDecomposition:
    block = d.blocks[bi]
    return BlockDecomposition((block,), frozenset(), {}, d.comp)


def find_long_cycle(
    host: Graph, k: int, p: float, seed: int = 0, eps: float | None = None
) -> PipelineResult:
    """Run the six steps on ``G_p`` and return a verified certificate or a failure report."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    if host.min_degree() < k:
        raise ValueError(f"host minimum degree {host.min_degree()} is below k={k}")
    eps = default_eps(k) if eps is None else eps
    if eps <= 0:
        raise ValueError("eps must be positive")
    return _Run(host, k, p, seed, eps).run()
