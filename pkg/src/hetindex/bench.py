"""Array vs spatial timing harness.

Three tasks mirror the evaluation: ``load`` (building the store one node at a
time), ``snr`` (all-links SNR) and ``sinr`` (all-links SINR). For every n a
scenario is generated, both methods run once as a warm-up whose outputs must
agree, and then each method is timed ``reps`` times. Records carry one row per
repetition; :func:`medians` and :func:`fit_slope` reduce them.
"""

from __future__ import annotations

import csv
import dataclasses
import gc
import math
import statistics
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .geometry import Point
from .network import Container, NetNode
from .radio import METHODS, sinr_all_links, snr_all_links
from .scenario import ScenarioConfig, generate

__all__ = [
    "BenchRecord",
    "OutputMismatch",
    "bench_load",
    "bench_snr",
    "bench_sinr",
    "fit_slope",
    "medians",
    "write_csv",
    "select",
    "speedups",
    "doubling_ratios",
    "DEFAULT_N",
    "SINR_ARRAY_CAP",
]

TASKS = ("load", "snr", "sinr")
DEFAULT_N = (100, 1000, 10_000, 100_000)
SINR_ARRAY_CAP = 10_000


class OutputMismatch(RuntimeError):
    """Array and spatial methods disagreed; no timings are recorded."""


@dataclass(frozen=True)
class BenchRecord:
    task: str
    method: str
    n: int
    rep: int
    wall_seconds: float
    visited_nodes: int | None = None

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError("n must be > 0")
        if not self.wall_seconds > 0:
            raise ValueError("wall_seconds must be > 0")


def _time(fn: Callable[[], object]) -> tuple[float, object]:
    gc.collect()
    was = gc.isenabled()
    gc.disable()
    try:
        t0 = time.perf_counter()
        out = fn()
        dt = time.perf_counter() - t0
    finally:
        if was:
            gc.enable()
    return max(dt, 1e-9), out


def _config(n: int, cfg: ScenarioConfig | None, **kw) -> ScenarioConfig:
    base = cfg or ScenarioConfig()
    over = {f.name: getattr(base, f.name) for f in dataclasses.fields(base)
            if f.name not in ("area_width", "area_height", "sbs_density")}
    over.update(kw)
    return ScenarioConfig.for_n(n, density=base.sbs_density or 100.0, **over)


# --------------------------------------------------------------------------
# load


class ArrayStore:
    """The array-indexing baseline: nodes appended to a plain list."""

    def __init__(self):
        self.nodes: list[NetNode] = []

    def add_node(self, node: NetNode) -> None:
        self.nodes.append(node)


def bench_load(n_values: Iterable[int], cfg: ScenarioConfig | None = None, reps: int = 5) -> list[BenchRecord]:
    """Time generating and storing every node: node records are built from
    the same seeded attribute stream for both methods, then appended to a
    list (array) or added to a container (spatial).

    Repetitions are interleaved across n (rep-major), so a slow stretch of
    the host hits every n alike instead of skewing one point of the curve.
    """
    runs = []
    for n in n_values:
        c = generate(_config(n, cfg, aim=False)).container
        stream = [(nd.id, nd.kind, nd.loc.x, nd.loc.y, nd.width, nd.length, nd.height, nd.trx)
                  for nd in sorted(c, key=lambda nd: nd.id)]
        M = c.tree.M
        del c

        def load(store, stream=stream):
            for i, kind, x, y, w, ln, h, trx in stream:
                store.add_node(NetNode(i, kind, Point(x, y), w, ln, h, trx))
            return store

        methods = {"array": lambda load=load: load(ArrayStore()),
                   "spatial": lambda load=load, M=M: load(Container(M))}
        for fn in methods.values():
            fn()
        runs.append((n, methods))
    out = []
    for rep in range(reps):
        for n, methods in runs:
            for method, fn in methods.items():
                dt, _ = _time(fn)
                out.append(BenchRecord("load", method, n, rep, dt))
    return out


# --------------------------------------------------------------------------
# link tasks


def _bench_links(task, fn, n_values, cfg, reps, array_cap):
    out = []
    for n in n_values:
        sc = generate(_config(n, cfg))
        c, ch = sc.container, sc.channel
        c.columns()
        methods = ["spatial"] + (["array"] if array_cap is None or n <= array_cap else [])
        warm = {m: fn(c, ch, m) for m in methods}
        if len(warm) == 2 and not warm["array"].equals(warm["spatial"]):
            diff = warm["array"].diff(warm["spatial"])
            raise OutputMismatch(f"{task} n={n}: methods disagree, e.g. {diff[:3]}")
        for rep in range(reps):
            for m in methods:
                dt, table = _time(lambda: fn(c, ch, m))
                visited = table.stats.nodes_visited if m == "spatial" else None
                out.append(BenchRecord(task, m, n, rep, dt, visited))
    return out


def bench_snr(n_values: Iterable[int], cfg: ScenarioConfig | None = None, reps: int = 5,
              array_cap: int | None = None) -> list[BenchRecord]:
    return _bench_links("snr", snr_all_links, n_values, cfg, reps, array_cap)


def bench_sinr(n_values: Iterable[int], cfg: ScenarioConfig | None = None, reps: int = 5,
               array_cap: int | None = SINR_ARRAY_CAP) -> list[BenchRecord]:
    return _bench_links("sinr", sinr_all_links, n_values, cfg, reps, array_cap)


# --------------------------------------------------------------------------
# reduction and output


def medians(records: Iterable[BenchRecord]) -> dict[tuple[str, str, int], float]:
    """Median wall time per (task, method, n)."""
    groups: dict[tuple[str, str, int], list[float]] = {}
    for r in records:
        groups.setdefault((r.task, r.method, r.n), []).append(r.wall_seconds)
    return {k: statistics.median(v) for k, v in sorted(groups.items())}


def fit_slope(records: Sequence[BenchRecord]) -> float:
    """Least-squares slope of log(median time) against log(n).

    All records must share one task and method; at least three distinct n
    are required.
    """
    keys = {(r.task, r.method) for r in records}
    if len(keys) > 1:
        raise ValueError(f"records mix task/method groups: {sorted(keys)}")
    med = medians(records)
    if len(med) < 3:
        raise ValueError(f"need >= 3 distinct n values, got {len(med)}")
    n = np.array([k[2] for k in med], dtype=float)
    t = np.array(list(med.values()), dtype=float)
    slope, _ = np.polyfit(np.log(n), np.log(t), 1)
    return float(slope)


def select(records: Iterable[BenchRecord], task: str, method: str) -> list[BenchRecord]:
    return [r for r in records if r.task == task and r.method == method]


def speedups(records: Iterable[BenchRecord], task: str) -> dict[int, float]:
    """array / spatial median time ratio per n, where both ran."""
    med = medians(records)
    out = {}
    for (tk, m, n), t in med.items():
        if tk == task and m == "array" and (task, "spatial", n) in med:
            out[n] = t / med[(task, "spatial", n)]
    return out


def doubling_ratios(records: Iterable[BenchRecord], task: str, method: str) -> dict[int, float]:
    """Growth of median time per doubling of n, between consecutive n."""
    pts = sorted((n, t) for (tk, m, n), t in medians(records).items() if tk == task and m == method)
    out = {}
    for (n0, t0), (n1, t1) in zip(pts, pts[1:]):
        out[n1] = (t1 / t0) ** (math.log(2.0) / math.log(n1 / n0))
    return out


def write_csv(records: Iterable[BenchRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["task", "method", "n", "rep", "wall_seconds", "visited_nodes"])
        for r in records:
            w.writerow([r.task, r.method, r.n, r.rep, repr(r.wall_seconds),
                        "" if r.visited_nodes is None else r.visited_nodes])
