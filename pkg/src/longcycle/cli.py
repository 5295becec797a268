"""Command-line entry point: ``longcycle <subcommand> ...``.

Exit codes: 0 success, 1 failure outcome, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import dfs
from .blocks import block_algorithm, decompose
from .exposure import ExposureState
from .graph import Graph, read_edge_list, write_edge_list
from .hosts import FAMILIES, HostSpec, generate_host
from .pipeline import find_long_cycle
from .posa import boosters, hamiltonicity
from .sweep import PREDICATES, SweepConfig, c_range, threshold_sweep

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


class UsageError(Exception):
    pass


def _host_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--host", help="edge-list file (family 'file')")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--bridges", type=int, default=0)
    p.add_argument("--avg", type=float)
    p.add_argument("--host-seed", type=int, default=0)


def _spec(ns: argparse.Namespace) -> HostSpec:
    family = ns.family or ("file" if ns.host else None)
    if family is None:
        raise UsageError("give --family or --host")
    return HostSpec(
        family=family,
        n=ns.n,
        k=ns.k,
        r=ns.r,
        a=ns.a,
        b=ns.b,
        bridges=ns.bridges,
        avg=ns.avg,
        path=ns.host,
        seed=ns.host_seed,
    )


def _load_host(ns: argparse.Namespace) -> Graph:
    try:
        return generate_host(_spec(ns))
    except (ValueError, OSError) as exc:
        raise UsageError(str(exc)) from exc


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="longcycle", description="Long cycles in random subgraphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="Monte Carlo success-probability sweep")
    _host_args(sw)
    sw.add_argument("--config", help="TOML file with sweep settings; flags override it")
    sw.add_argument("--c-min", type=float)
    sw.add_argument("--c-max", type=float)
    sw.add_argument("--c-step", type=float)
    sw.add_argument("--p", type=float, nargs="+", dest="p_values")
    sw.add_argument("--trials", type=int)
    sw.add_argument("--seed", type=int)
    sw.add_argument("--predicate", choices=PREDICATES)
    sw.add_argument("--scale", choices=("k", "n"))
    sw.add_argument("--format", choices=("csv", "json"), default=None)
    sw.add_argument("--workers", type=int)
    sw.add_argument("--timing", action="store_true", help="report mean wall-clock ms (breaks byte-identical output)")
    sw.add_argument("--out")

    fc = sub.add_parser("find-cycle", help="one pipeline run; prints the certificate JSON")
    _host_args(fc)
    fc.add_argument("--p", type=float, required=True)
    fc.add_argument("--seed", type=int, required=True)
    fc.add_argument("--eps", type=float)

    gh = sub.add_parser("gen-host", help="write a host graph as an edge list")
    _host_args(gh)
    gh.add_argument("--out", required=True)

    vb = sub.add_parser("verify-blocks", help="block algorithm against the lowpoint oracle")
    _host_args(vb)
    vb.add_argument("--p", type=float, required=True)
    vb.add_argument("--seed", type=int, default=0)

    bo = sub.add_parser("boosters", help="boosters of a small non-Hamiltonian graph")
    _host_args(bo)
    return ap


def _cmd_sweep(ns: argparse.Namespace) -> int:
    conf: dict = {}
    if ns.config:
        try:
            with open(ns.config, "rb") as fh:
                conf = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
    host_conf = conf.get("host", {})
    for key in ("family", "host", "n", "k", "r", "a", "b", "avg"):
        if getattr(ns, key) is None and key in host_conf:
            setattr(ns, key, host_conf[key])
    if ns.bridges == 0 and "bridges" in host_conf:
        ns.bridges = host_conf["bridges"]

    def pick(name: str, default=None):
        value = getattr(ns, name)
        return conf.get(name.replace("_", "-"), conf.get(name, default)) if value is None else value

    seed = pick("seed")
    if seed is None:
        raise UsageError("sweeps need an explicit --seed")
    trials = pick("trials", 100)
    p_values = pick("p_values")
    c_min, c_max, c_step = pick("c_min"), pick("c_max"), pick("c_step", 1.0)
    if p_values:
        c_values: tuple[float, ...] = ()
    elif c_min is not None and c_max is not None:
        c_values = c_range(float(c_min), float(c_max), float(c_step))
    else:
        raise UsageError("give --c-min/--c-max or --p")
    spec = _spec(ns)
    cfg = SweepConfig(
        host=spec,
        trials=int(trials),
        seed=int(seed),
        k=spec.k,
        c_values=c_values,
        p_values=tuple(float(p) for p in p_values) if p_values else None,
        predicate=pick("predicate", "cycle"),
        scale=pick("scale", "k"),
        timing=bool(ns.timing or conf.get("timing", False)),
        workers=pick("workers"),
    )
    try:
        generate_host(spec)
    except (ValueError, OSError) as exc:
        raise UsageError(str(exc)) from exc
    result = threshold_sweep(cfg)
    fmt = pick("format", "csv")
    text = result.to_csv() if fmt == "csv" else result.to_json()
    if ns.out:
        Path(ns.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_find(ns: argparse.Namespace) -> int:
    g = _load_host(ns)
    k = ns.k if ns.k is not None else g.min_degree()
    try:
        res = find_long_cycle(g, k, ns.p, ns.seed, eps=ns.eps)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(res.to_json())
    return 0 if res.success else 1


def _cmd_gen(ns: argparse.Namespace) -> int:
    g = _load_host(ns)
    write_edge_list(g, ns.out)
    return 0


def _cmd_verify_blocks(ns: argparse.Namespace) -> int:
    g = _load_host(ns)
    if not 0 <= ns.p <= 1:
        raise UsageError("--p must lie in [0, 1]")
    s = ExposureState(g, ns.p, seed=ns.seed)
    T, _ = dfs.dfs_explore(s)
    base = Graph.from_edges(g.n, T.tree_edges())
    M, d, log = block_algorithm(base, s)
    added = sum(1 for step in log if step.present)
    blocks_before = len(decompose(base).blocks)
    s.expose_induced(range(g.n), tag="oracle")
    oracle = decompose(Graph(g.n, tuple(s.present_adj)))
    same = d.signature() == oracle.signature()
    print(
        json.dumps(
            {
                "equal": same,
                "blocks": len(d.blocks),
                "oracle_blocks": len(oracle.blocks),
                "edges_added": added,
                "blocks_of_tree": blocks_before,
            },
            sort_keys=True,
        )
    )
    return 0 if same and (added < blocks_before or added == 0) else 1


def _cmd_boosters(ns: argparse.Namespace) -> int:
    g = _load_host(ns)
    if g.n > 14:
        raise UsageError("booster enumeration supports at most 14 vertices")
    if hamiltonicity(g).status == "yes":
        print(json.dumps({"hamiltonian": True, "boosters": []}))
        return 1
    try:
        bs = boosters(g)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(json.dumps({"hamiltonian": False, "longest_path": bs.longest_path, "boosters": sorted(map(list, bs.pairs))}))
    return 0


COMMANDS = {
    "sweep": _cmd_sweep,
    "find-cycle": _cmd_find,
    "gen-host": _cmd_gen,
    "verify-blocks": _cmd_verify_blocks,
    "boosters": _cmd_boosters,
}


def main(argv: Sequence[str] | None = None) -> int:
    ap = _parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[ns.command](ns)
    except UsageError as exc:
        print(f"longcycle {ns.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
