"""Monte Carlo sweeps of the success probability across edge probabilities."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .exposure import ExposureState, derive_seed
from .graph import Graph, VertexSet
from .hosts import HostSpec, generate_host
from .pipeline import endgame_good_pair, find_long_cycle
from .stats import wilson

PREDICATES = ("cycle", "hamiltonian")
CSV_FIELDS = ("c", "p", "trials", "successes", "phat", "ci_low", "ci_high", "mean_queries", "mean_ms")


def threshold_p(c: float, scale: int) -> float:
    """``(log s + log log s + c) / s`` clamped to ``[0, 1]``."""
    if scale < 3:
        raise ValueError("scale must be at least 3 so that log log is defined and positive")
    p = (math.log(scale) + math.log(math.log(scale)) + c) / scale
    return min(1.0, max(0.0, p))


@dataclass(frozen=True)
class SweepConfig:
    """A sweep over ``c`` values (``p`` from :func:`threshold_p`) or explicit ``p`` values.

    ``scale`` picks the quantity inside the threshold formula: ``"k"`` (the
    default) or ``"n"``, the host order.
    """

    host: HostSpec
    trials: int
    seed: int
    k: int | None = None
    c_values: tuple[float, ...] = ()
    p_values: tuple[float, ...] | None = None
    predicate: str = "cycle"
    scale: str = "k"
    timing: bool = False
    workers: int | None = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.predicate not in PREDICATES:
            raise ValueError(f"predicate must be one of {PREDICATES}")
        if self.scale not in ("k", "n"):
            raise ValueError("scale must be 'k' or 'n'")
        if not self.c_values and not self.p_values:
            raise ValueError("give c values or p values")


@dataclass
class SweepPoint:
    c: float | None
    p: float
    trials: int
    successes: int
    phat: float
    ci_low: float
    ci_high: float
    mean_queries: float
    mean_ms: float
    queries_by_tag: dict[str, float] = field(default_factory=dict)


@dataclass
class SweepResult:
    points: list[SweepPoint]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for pt in self.points:
            w.writerow(
                [
                    _fmt(pt.c),
                    _fmt(pt.p),
                    pt.trials,
                    pt.successes,
                    _fmt(pt.phat),
                    _fmt(pt.ci_low),
                    _fmt(pt.ci_high),
                    _fmt(pt.mean_queries),
                    _fmt(pt.mean_ms),
                ]
            )
        return buf.getvalue()

    def to_json(self) -> str:
        rows = []
        for pt in self.points:
            row = {name: getattr(pt, name) for name in CSV_FIELDS}
            row = {key: (round(v, 6) if isinstance(v, float) else v) for key, v in row.items()}
            row["queries_by_tag"] = {t: round(v, 6) for t, v in sorted(pt.queries_by_tag.items())}
            rows.append(row)
        return json.dumps(rows, indent=2) + "\n"

    def monotonicity_violations(self) -> list[tuple[int, int]]:
        """Pairs ``(i, j)`` with ``p_i < p_j`` whose intervals show a strict decrease."""
        out = []
        for i, a in enumerate(self.points):
            for j, b in enumerate(self.points):
                if a.p < b.p and b.ci_high < a.ci_low:
                    out.append((i, j))
        return out


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.6f}"


@lru_cache(maxsize=8)
def _host(spec: HostSpec) -> Graph:
    return generate_host(spec)


def run_trial(spec: HostSpec, k: int, p: float, seed: int, predicate: str) -> tuple[bool, dict[str, int], float]:
    """One independent trial; returns success, queries per tag, and elapsed milliseconds."""
    g = _host(spec)
    start = time.perf_counter()
    if predicate == "cycle":
        res = find_long_cycle(g, k, p, seed)
        ok, queries = res.success, res.queries
    else:
        s = ExposureState(g, p, seed=seed)
        out = endgame_good_pair(g, VertexSet.full(g.n), VertexSet(), s, p, g.n - 1, rng=derive_seed(seed, 6))
        ok, queries = out.success, s.counters()
    return ok, queries, (time.perf_counter() - start) * 1000


def _run_chunk(args: tuple) -> list[tuple[bool, dict[str, int], float]]:
    spec, k, p, seeds, predicate = args
    return [run_trial(spec, k, p, sd, predicate) for sd in seeds]


def worker_count(requested: int | None = None) -> int:
    cap = os.environ.get("LONGCYCLE_THREADS")
    n = requested or os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def threshold_sweep(cfg: SweepConfig) -> SweepResult:
    """Deterministic given ``cfg``: trial ``t`` at point ``i`` uses seed ``(seed, i, t)``."""
    g = _host(cfg.host)
    k = cfg.k if cfg.k is not None else (cfg.host.declared_k() or g.min_degree())
    scale = k if cfg.scale == "k" else g.n
    if cfg.p_values:
        grid = [(None, min(1.0, max(0.0, p))) for p in cfg.p_values]
    else:
        grid = [(c, threshold_p(c, scale)) for c in cfg.c_values]
    workers = worker_count(cfg.workers)
    points = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for i, (c, p) in enumerate(grid):
            seeds = [derive_seed(cfg.seed, i, t) for t in range(cfg.trials)]
            if pool is None:
                outcomes = _run_chunk((cfg.host, k, p, seeds, cfg.predicate))
            else:
                size = math.ceil(len(seeds) / workers)
                chunks = [(cfg.host, k, p, seeds[j : j + size], cfg.predicate) for j in range(0, len(seeds), size)]
                outcomes = [o for part in pool.map(_run_chunk, chunks) for o in part]
            points.append(_aggregate(c, p, outcomes, cfg.timing))
    finally:
        if pool is not None:
            pool.shutdown()
    return SweepResult(points)


def _aggregate(c: float | None, p: float, outcomes: Sequence[tuple[bool, dict[str, int], float]], timing: bool) -> SweepPoint:
    trials = len(outcomes)
    succ = sum(1 for ok, _, _ in outcomes if ok)
    tags: Counter = Counter()
    for _, q, _ in outcomes:
        tags.update(q)
    lo, hi = wilson(succ, trials)
    ms = sum(t for _, _, t in outcomes) / trials if timing else 0.0
    return SweepPoint(
        c=c,
        p=p,
        trials=trials,
        successes=succ,
        phat=succ / trials,
        ci_low=lo,
        ci_high=hi,
        mean_queries=sum(tags.values()) / trials,
        mean_ms=ms,
        queries_by_tag={t: v / trials for t, v in tags.items()},
    )


def c_range(c_min: float, c_max: float, c_step: float) -> tuple[float, ...]:
    """Inclusive arithmetic range, robust to floating-point drift."""
    if c_step <= 0:
        raise ValueError("c-step must be positive")
    if c_max < c_min:
        raise ValueError("c-max must be at least c-min")
    count = int(math.floor((c_max - c_min) / c_step + 1e-9)) + 1
    return tuple(round(c_min + i * c_step, 12) for i in range(count))
