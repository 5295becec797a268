"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the lines appear
even under output capture.
"""

from __future__ import annotations

import math
import random
import sys
from itertools import combinations

import numpy as np
import pynauty
import pytest
from scipy.stats import chi2_contingency

import merge_fixtures as fx
from checks import block_trial, component_violations, dfs_violations
from longcycle import exact
from longcycle.cliques import greedy_cover, prepare_cliques
from longcycle.dfs import dfs_clique_walk, dfs_explore
from longcycle.exposure import ExposureState, derive_seed, split_round
from longcycle.graph import Graph, VertexSet, components
from longcycle.hosts import HostSpec, barbell
from longcycle.pipeline import find_long_cycle
from longcycle.rotating import (
    merge_clique_clique,
    merge_mixed,
    merge_rotating_disjoint,
    merge_rotating_intersecting,
)
from longcycle.sweep import SweepConfig, threshold_p, threshold_sweep
from strategies import random_graph


def report(capsys, number: int, title: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({detail})"
    with capsys.disabled():
        print(f"\n{line}", flush=True)
    assert ok, line


def independent_cycle_check(s: ExposureState, cycle, at_least: int) -> bool:
    revealed = s.revealed_subgraph()
    closed = list(zip(cycle, list(cycle[1:]) + [cycle[0]]))
    return len(set(cycle)) == len(cycle) >= at_least and all(revealed.has_edge(a, b) for a, b in closed)


# 1


def test_classic_threshold_k200(capsys):
    cfg = SweepConfig(
        host=HostSpec("complete", n=200),
        trials=1000,
        seed=1,
        c_values=(-3.0, 4.0),
        predicate="hamiltonian",
        scale="n",
    )
    low, high = threshold_sweep(cfg).points
    ok = low.phat <= 0.05 and high.phat >= 0.95
    report(capsys, 1, "Hamiltonicity threshold on K_200", ok, f"c=-3: {low.phat:.3f} <= 0.05, c=+4: {high.phat:.3f} >= 0.95")


# 2


def test_limiting_probability_k500(capsys):
    cfg = SweepConfig(
        host=HostSpec("complete", n=500),
        trials=2000,
        seed=2,
        c_values=(0.0,),
        predicate="hamiltonian",
        scale="n",
    )
    (pt,) = threshold_sweep(cfg).points
    ok = pt.ci_high >= 0.29 and pt.ci_low <= 0.45
    detail = f"phat={pt.phat:.4f}, Wilson [{pt.ci_low:.4f}, {pt.ci_high:.4f}] vs [0.29, 0.45], limit e^-1={math.exp(-1):.4f}"
    report(capsys, 2, "limiting probability on K_500 at c=0", ok, detail)


# 3


def test_barbell_pipeline(capsys):
    k = 60
    host = barbell(k)
    p = threshold_p(4.0, k)
    wins, bad = 0, 0
    for t in range(300):
        res = find_long_cycle(host, k, p, seed=derive_seed(3, 0, t))
        if res.success:
            wins += 1
            if not independent_cycle_check(res.state, list(res.certificate.cycle), k + 1):
                bad += 1
    ok = wins / 300 >= 0.85 and bad == 0
    report(capsys, 3, "barbell of two K_61, k=60, c=+4", ok, f"success {wins}/300={wins / 300:.3f} >= 0.85, {bad} bad certificates")


# 4

OEIS_CONNECTED = [1, 1, 2, 6, 21, 112, 853, 11117, 261080]


def _certificate(n, adj):
    g = pynauty.Graph(n, adjacency_dict={v: [w for w in range(n) if adj[v] >> w & 1] for v in range(n)})
    return pynauty.certificate(g)


def all_graphs(max_n):
    """Isomorphism classes on ``n`` vertices for ``n <= max_n``, by vertex augmentation."""
    level = {(0,)}
    out = {1: level}
    for n in range(2, max_n + 1):
        seen = {}
        for adj in level:
            for S in range(1 << (n - 1)):
                new = list(adj) + [S]
                for w in range(n - 1):
                    if S >> w & 1:
                        new[w] |= 1 << (n - 1)
                seen.setdefault(_certificate(n, new), tuple(new))
        level = set(seen.values())
        out[n] = level
    return out


def _booster_violations(stats):
    conn, ham, m, count = stats.T
    sel = (conn == 1) & (ham == 0)
    lemma = (m[sel] + 1) ** 2 / 2
    return int(sel.sum()), int((count[sel] < lemma).sum())


def test_booster_lemma(capsys):
    catalog = all_graphs(9)
    connected = []
    checked = violations = 0
    for n in range(1, 10):
        rows = np.array(sorted(catalog[n]), dtype=np.uint32)
        stats = exact.catalog_stats(rows, n)
        connected.append(int(stats[:, 0].sum()))
        if n >= 3:
            c, v = _booster_violations(stats)
            checked += c
            violations += v
    counts_ok = connected == OEIS_CONNECTED

    rng = random.Random(4)
    by_n: dict[int, list[tuple[int, ...]]] = {}
    found = 0
    while found < 10_000:
        n = rng.randint(4, 12)
        g = random_graph(n, rng.uniform(0.15, 0.6), rng)
        if len(components(g)) != 1 or g.min_degree() < 2 or exact.expansion_order(g) < 1:
            continue
        if exact.exact_hamilton_cycle(g) is not None:
            continue
        by_n.setdefault(n, []).append(g.adj)
        found += 1
    random_checked = random_bad = 0
    for n, rows in by_n.items():
        stats = exact.catalog_stats(np.array(rows, dtype=np.uint32), n)
        c, v = _booster_violations(stats)
        random_checked += c
        random_bad += v
    ok = counts_ok and violations == 0 and random_bad == 0 and random_checked == 10_000
    detail = (
        f"catalog counts {'match' if counts_ok else 'differ from'} OEIS A001349; "
        f"{checked} catalog and {random_checked} random expanders, {violations + random_bad} violations"
    )
    report(capsys, 4, "booster count >= (m+1)^2/2", ok, detail)


# 5


def test_block_algorithm_certification(capsys):
    rng = random.Random(5)
    failures = []
    for t in range(1000):
        n = rng.randint(2, 50)
        host = random_graph(n, rng.uniform(2 / n, 0.5), rng)
        p = rng.random()
        problems = block_trial(host, p, derive_seed(5, t))
        if problems:
            failures.append((t, problems[0]))
    report(capsys, 5, "block algorithm vs lowpoint oracle", not failures, f"1000 trials, {len(failures)} violating")


# 6


def _clique_host(rng, k):
    cliques = rng.randint(1, 3)
    outcasts = rng.randint(0, 15)
    size = k + 1
    n = cliques * size + outcasts
    edges = [(a + i * size, b + i * size) for i in range(cliques) for a, b in combinations(range(size), 2)]
    edges += [e for e in combinations(range(n), 2) if rng.random() < 0.04]
    return Graph.from_edges(n, set(edges))


def test_dfs_certificates(capsys):
    rng = random.Random(6)
    bad = 0
    for t in range(1000):
        n = rng.randint(1, 50)
        host = random_graph(n, rng.uniform(0, 0.3), rng)
        s = ExposureState(host, rng.random(), seed=derive_seed(6, t))
        T, log = dfs_explore(s)
        bad += bool(dfs_violations(s, T, log, range(n)) or component_violations(s, T, range(n)))

    k, eps = 20, 0.05
    walks = frugal_bad = 0
    for t in range(300):
        host = _clique_host(rng, k)
        s = ExposureState(host, rng.uniform(0.25, 1.0), seed=derive_seed(6, 1, t))
        cover = prepare_cliques(greedy_cover(host, k, eps), s, rng=t)
        alive = VertexSet.full(host.n) - cover.waste
        before = s.successes
        T, log = dfs_clique_walk(s, cover.walk_cycles(), vertices=alive)
        bad += bool(dfs_violations(s, T, log, alive) or component_violations(s, T, alive))
        new_present = s.successes - before
        if cover.survivors():
            walks += 1
            if not new_present < cover.ell + len(cover.cliques) + len(T.roots):
                frugal_bad += 1
    ok = bad == 0 and frugal_bad == 0 and walks > 0
    detail = f"1300 explorations, {bad} violating; {walks} clique walks, {frugal_bad} exceed l+|C|+#components"
    report(capsys, 6, "DFS certificates and clique-walk frugality", ok, detail)


# 7


def test_exposure_model(capsys):
    k6 = Graph.complete(6)
    p1 = split_round(0.5)
    trials = 10_000
    direct = np.zeros(16, dtype=np.int64)
    split = np.zeros(16, dtype=np.int64)
    for t in range(trials):
        s = ExposureState(k6, 0.5, seed=derive_seed(7, 0, t))
        s.expose_induced(range(6))
        direct[s.successes] += 1
        s = ExposureState(k6, p1, seed=derive_seed(7, 1, t))
        s.expose_induced(range(6))
        s.second_round()
        split[s.successes] += 1
    table = np.vstack([direct, split])
    keep = table.sum(axis=0) >= 10
    _, pvalue, _, _ = chi2_contingency(table[:, keep])

    rng = random.Random(7)
    same = True
    for t in range(200):
        g = random_graph(rng.randint(2, 20), rng.random(), rng)
        order = g.edges()
        rng.shuffle(order)
        a = ExposureState(g, 0.5, seed=t)
        b = ExposureState(g, 0.5, seed=t)
        for e in g.edges():
            a.query(*e)
        for e in order:
            b.query(*e)
        same &= a.status.tobytes() == b.status.tobytes()
    ok = pvalue > 0.01 and same
    report(capsys, 7, "two-round composition and order exchangeability", ok, f"chi-square p={pvalue:.4f} > 0.01, byte-equal={same}")


# 8


def test_merge_fixtures(capsys):
    results = []

    f = fx.clique_pair(k=20, eps=0.01)
    before = f.s.tested
    cert = merge_clique_clique(f.s, f.block, f.parts["C1"], f.parts["C2"], f.k, f.eps)
    need = (2 - 40 * f.eps) * f.k
    results.append(("clique-clique", len(cert), need, cert.verify(f.s, f.k) and f.s.tested == before))

    f = fx.rotating_disjoint()
    cert = merge_rotating_disjoint(f.s, f.T, f.block, f.parts["J1"], f.parts["J2"], f.k, f.eps)
    results.append(("rotating-disjoint", len(cert), (7 - 32 * f.eps) * f.k / 6, cert.verify(f.s, f.k)))

    f = fx.rotating_pivot()
    before = f.s.tested
    cert = merge_rotating_disjoint(f.s, f.T, f.block, f.parts["J1"], f.parts["J2"], f.k, f.eps)
    ok = cert.verify(f.s, f.k) and f.s.tested == before
    results.append(("rotating-pivot", len(cert), 3 * (1 - 4 * f.eps) * f.k / 2, ok))

    f = fx.rotating_single_shared()
    J1, J2 = f.parts["J1"], f.parts["J2"]
    cert = merge_rotating_intersecting(f.s, f.T, f.block, J1, J2, f.k, f.eps)
    results.append(("intersecting |I|=1", len(cert), len(J1) + len(J2) - 2, cert.verify(f.s, f.k)))

    f = fx.rotating_intersecting(40, 0.05, 6)
    J1, J2 = f.parts["J1"], f.parts["J2"]
    cert = merge_rotating_intersecting(f.s, f.T, f.block, J1, J2, f.k, f.eps)
    results.append(("intersecting |I|=6", len(cert), len(J1) + len(J2) - 12, cert.verify(f.s, f.k)))

    k, eps = 128, 1 / 128
    f = fx.rotating_intersecting(k, eps, 100, branch_len=k - 100)
    J1, J2 = f.parts["J1"], f.parts["J2"]
    cert = merge_rotating_intersecting(f.s, f.T, f.block, J1, J2, k, eps)
    results.append(("intersecting |I|=100", len(cert), len(J1) + len(J2) - 100 - 5 * eps * k, cert.verify(f.s, k)))

    f = fx.mixed_disjoint()
    cert = merge_mixed(f.s, f.T, f.block, f.parts["J"], f.parts["C"], f.k, f.eps)
    results.append(("mixed-disjoint", len(cert), f.k + 1, cert.verify(f.s, f.k)))

    f = fx.mixed_overlap(overlap=2)
    cert = merge_mixed(f.s, f.T, f.block, f.parts["J"], f.parts["C"], f.k, f.eps)
    results.append(("mixed-overlap", len(cert), f.k + 1, cert.verify(f.s, f.k)))

    ok = all(valid and length >= math.ceil(need - 1e-9) for _, length, need, valid in results)
    detail = ", ".join(f"{name} {length}>={math.ceil(need - 1e-9)}" for name, length, need, _ in results)
    report(capsys, 8, "merge fixtures meet their length formulas", ok, detail)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", *sys.argv[1:]]))
