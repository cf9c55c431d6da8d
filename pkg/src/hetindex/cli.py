"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data or validation error. Angles are
degrees on the command line.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import bench as B
from .geometry import Point, Segment, dist
from .network import DuplicateNode, NodeKind
from .radio import in_main_lobe, sector_triangle, sinr_all_links, snr_all_links
from .rtree import QueryStats
from .scenario import ScenarioConfig, generate, load, load_config, save

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _xy(text: str) -> Point:
    try:
        x, y = (float(v) for v in text.split(","))
        return Point(x, y)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X,Y, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(float(v)) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or min(vals) <= 0:
        raise argparse.ArgumentTypeError("n values must be positive")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hetindex", description="R-tree indexed heterogeneous network toolkit.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a scenario JSON")
    g.add_argument("--config", type=Path, help="config JSON (angles in degrees)")
    g.add_argument("--n", type=int, help="number of small BSs (square area at --density)")
    g.add_argument("--density", type=float, default=100.0, help="SBS per km^2 (default 100)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--ues", type=int, default=0)
    g.add_argument("--mbs", type=int, default=0)
    g.add_argument("--blockages", type=int, default=0)
    g.add_argument("--rtree-m", type=int, default=16, help="R-tree fanout M")
    g.add_argument("--out", type=Path, required=True)

    q = sub.add_parser("query", help="run one spatial query against a scenario")
    q.add_argument("--scenario", type=Path, required=True)
    q.add_argument("--type", choices=("radius", "knn", "sector", "los"), required=True)
    q.add_argument("--center", type=_xy)
    q.add_argument("--radius", type=float)
    q.add_argument("--k", type=int)
    q.add_argument("--origin", type=_xy)
    q.add_argument("--boresight", type=float, help="degrees")
    q.add_argument("--beamwidth", type=float, help="degrees")
    q.add_argument("--range", type=float, dest="range_")
    q.add_argument("--raw", action="store_true", help="sector: skip the exact distance/angle refinement")
    q.add_argument("--from", type=_xy, dest="src")
    q.add_argument("--to", type=_xy, dest="dst")
    q.add_argument("--kind", choices=[k.value for k in NodeKind], help="keep only this node kind")

    for name in ("snr", "sinr"):
        s = sub.add_parser(name, help=f"all-links {name.upper()} to CSV")
        s.add_argument("--scenario", type=Path, required=True)
        s.add_argument("--method", choices=("array", "spatial", "both"), default="spatial")
        s.add_argument("--out", type=Path, required=True)

    b = sub.add_parser("bench", help="array vs spatial benchmarks to CSV")
    b.add_argument("--task", choices=("load", "snr", "sinr", "all"), default="all")
    b.add_argument("--n-list", type=_int_list, default=list(B.DEFAULT_N))
    b.add_argument("--reps", type=int, default=5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--sinr-array-cap", type=int, default=B.SINR_ARRAY_CAP)
    b.add_argument("--out", type=Path, required=True)

    v = sub.add_parser("validate", help="check tree and container consistency")
    v.add_argument("--scenario", type=Path, required=True)
    return p


def _load(path: Path):
    try:
        return load(path)
    except FileNotFoundError:
        raise DataError(f"no such file: {path}") from None
    except json.JSONDecodeError as e:
        raise DataError(f"{path}: invalid JSON ({e})") from None
    except DuplicateNode as e:
        raise DataError(f"{path}: {e}") from None
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"{path}: bad scenario ({e})") from None


def _node_json(n) -> str:
    rec = {"id": n.id, "kind": n.kind.value, "x": n.loc.x, "y": n.loc.y}
    if n.width or n.length:
        rec["width"], rec["length"] = n.width, n.length
    return json.dumps(rec)


_FLAG = {"range_": "--range", "src": "--from", "dst": "--to"}


def _need(args, *names):
    missing = [_FLAG.get(n, "--" + n) for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"query --type {args.type} needs {', '.join(missing)}")


def cmd_gen(args, out) -> int:
    if args.config is not None:
        if args.n is not None:
            raise UsageError("give either --config or --n, not both")
        try:
            cfg = load_config(args.config)
        except FileNotFoundError:
            raise DataError(f"no such file: {args.config}") from None
        except (json.JSONDecodeError, TypeError, ValueError) as e:
            raise DataError(f"{args.config}: invalid config ({e})") from None
    else:
        if args.n is None:
            raise UsageError("gen needs --config or --n")
        try:
            cfg = ScenarioConfig.for_n(
                args.n, density=args.density, seed=args.seed, ue_count=args.ues,
                mbs_count=args.mbs, blockage_count=args.blockages, rtree_M=args.rtree_m,
            )
        except ValueError as e:
            raise DataError(f"invalid config: {e}") from None
    try:
        sc = generate(cfg)
    except ValueError as e:
        raise DataError(f"invalid config: {e}") from None
    save(sc, args.out)
    print(f"wrote {len(sc.container)} nodes ({cfg.n_sbs} SBS) to {args.out}", file=out)
    return EXIT_OK


def cmd_query(args, out) -> int:
    sc = _load(args.scenario)
    c = sc.container
    kind = NodeKind(args.kind) if args.kind else None
    stats = QueryStats()
    extra = {}
    if args.type == "radius":
        _need(args, "center", "radius")
        if args.radius < 0:
            raise UsageError("--radius must be >= 0")
        entries, stats = c.query_radius(args.center, args.radius)
        nodes = c.resolve(entries, kind)
    elif args.type == "knn":
        _need(args, "center", "k")
        if args.k < 1:
            raise UsageError("--k must be >= 1")
        entries, stats = c.tree.query_knn_stats(args.center, args.k)
        nodes = c.resolve(entries, kind)
    elif args.type == "sector":
        _need(args, "origin", "boresight", "beamwidth", "range_")
        bore, bw = math.radians(args.boresight), math.radians(args.beamwidth)
        if not (0 < bw < 2 * math.pi) or not args.range_ > 0:
            raise UsageError("need 0 < --beamwidth < 360 and --range > 0")
        tri = sector_triangle(args.origin, bore, bw, args.range_)
        if tri is None:
            entries, stats = c.query_radius(args.origin, args.range_)
        else:
            entries, stats = c.tree.query_triangle(tri)
        nodes = c.resolve(entries, kind)
        if not args.raw or tri is None:
            nodes = [n for n in nodes
                     if dist(args.origin, n.loc) <= args.range_ and in_main_lobe(args.origin, bore, bw, n.loc)]
    else:
        _need(args, "src", "dst")
        if args.src == args.dst:
            raise UsageError("--from and --to must differ")
        hits = c.tree.query_segment(Segment(args.src, args.dst))
        nodes = [n for n in c.resolve(hits, kind) if n.kind is NodeKind.BLOCKAGE]
        extra["los_clear"] = not nodes
    for n in nodes:
        print(_node_json(n), file=out)
    summary = {"matches": len(nodes), "nodes_visited": stats.nodes_visited,
               "leaves_visited": stats.leaves_visited, "candidates_returned": stats.candidates_returned}
    summary.update(extra)
    print(json.dumps({"query_stats": summary}), file=out)
    return EXIT_OK


def _cmd_links(fn, args, out) -> int:
    sc = _load(args.scenario)
    methods = ["array", "spatial"] if args.method == "both" else [args.method]
    tables = {m: fn(sc.container, sc.channel, m) for m in methods}
    if len(tables) == 2:
        same = tables["array"].equals(tables["spatial"])
        print(f"array and spatial outputs {'identical' if same else 'DIFFER'} ({len(tables['spatial'])} links)",
              file=out)
        if not same:
            for line in tables["array"].diff(tables["spatial"])[:10]:
                print("  " + line, file=out)
            return EXIT_DATA
    table = tables[methods[-1]]
    table.to_csv(args.out)
    print(f"wrote {len(table)} links to {args.out}", file=out)
    return EXIT_OK


def cmd_bench(args, out) -> int:
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    cfg = ScenarioConfig(seed=args.seed)
    tasks = B.TASKS if args.task == "all" else (args.task,)
    records = []
    try:
        for task in tasks:
            if task == "load":
                records += B.bench_load(args.n_list, cfg, args.reps)
            elif task == "snr":
                records += B.bench_snr(args.n_list, cfg, args.reps)
            else:
                records += B.bench_sinr(args.n_list, cfg, args.reps, args.sinr_array_cap)
    except B.OutputMismatch as e:
        print(str(e), file=sys.stderr)
        return EXIT_DATA
    B.write_csv(records, args.out)
    for (task, method, n), t in B.medians(records).items():
        print(f"{task:5s} {method:8s} n={n:<8d} median {t:.6f} s", file=out)
    for task in tasks:
        for method in B.METHODS:
            sel = B.select(records, task, method)
            if len({r.n for r in sel}) >= 3:
                print(f"slope {task} {method}: {B.fit_slope(sel):.3f}", file=out)
    print(f"wrote {len(records)} records to {args.out}", file=out)
    return EXIT_OK


def cmd_validate(args, out) -> int:
    sc = _load(args.scenario)
    problems = sc.container.validate()
    for p in problems:
        print(p, file=out)
    if problems:
        return EXIT_DATA
    c = sc.container
    print(f"ok: {len(c)} nodes, tree height {c.tree.height}", file=out)
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "query": cmd_query,
    "snr": lambda a, o: _cmd_links(snr_all_links, a, o),
    "sinr": lambda a, o: _cmd_links(sinr_all_links, a, o),
    "bench": cmd_bench,
    "validate": cmd_validate,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.cmd](args, out)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except DataError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
