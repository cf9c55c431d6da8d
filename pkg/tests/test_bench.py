import csv
import math

import numpy as np
import pytest

from hetindex import bench as B
from hetindex.bench import BenchRecord
from hetindex.scenario import ScenarioConfig


def synth(task, method, fn, ns, reps=3):
    return [BenchRecord(task, method, n, r, fn(n)) for n in ns for r in range(reps)]


def test_fit_slope_power_laws():
    ns = [100, 1000, 10000, 100000]
    assert B.fit_slope(synth("snr", "array", lambda n: 3e-9 * n * n, ns)) == pytest.approx(2.0, abs=1e-12)
    assert B.fit_slope(synth("snr", "spatial", lambda n: 5e-7 * n, ns)) == pytest.approx(1.0, abs=1e-12)


def test_fit_slope_n_log_n():
    # three log-spaced points: least squares reduces to the end-point slope
    recs = synth("snr", "spatial", lambda n: 1e-7 * n * math.log(n), [1e3, 1e4, 1e5])
    want = 1 + math.log(5 / 3) / math.log(100)  # 1.1109243...
    assert B.fit_slope(recs) == pytest.approx(want, abs=1e-12)
    assert want == pytest.approx(1.1109243743, abs=1e-9)


def test_fit_slope_uses_medians():
    recs = synth("load", "array", lambda n: 1e-6 * n, [10, 100, 1000])
    recs.append(BenchRecord("load", "array", 1000, 9, 50.0))  # one outlier of four
    recs.append(BenchRecord("load", "array", 1000, 10, 1e-3))
    assert B.fit_slope(recs) == pytest.approx(1.0, abs=1e-12)


def test_fit_slope_guards():
    with pytest.raises(ValueError):
        B.fit_slope(synth("snr", "array", lambda n: n, [10, 100]))
    mixed = synth("snr", "array", float, [1, 2, 3]) + synth("snr", "spatial", float, [1, 2, 3])
    with pytest.raises(ValueError):
        B.fit_slope(mixed)


def test_speedups_and_doubling():
    recs = synth("snr", "array", lambda n: 1e-8 * n * n, [1000, 2000, 4000]) + synth(
        "snr", "spatial", lambda n: 1e-6 * n, [1000, 2000, 4000]
    )
    assert B.speedups(recs, "snr") == pytest.approx({1000: 10.0, 2000: 20.0, 4000: 40.0})
    assert B.doubling_ratios(recs, "snr", "array") == pytest.approx({2000: 4.0, 4000: 4.0})
    assert B.doubling_ratios(recs, "snr", "spatial") == pytest.approx({2000: 2.0, 4000: 2.0})


def test_record_validation():
    with pytest.raises(ValueError):
        BenchRecord("load", "array", 0, 0, 1.0)
    with pytest.raises(ValueError):
        BenchRecord("load", "array", 1, 0, 0.0)


def test_bench_load_small():
    recs = B.bench_load([1, 50], ScenarioConfig(seed=2), reps=2)
    assert len(recs) == 2 * 2 * 2
    assert {(r.method, r.n) for r in recs} == {(m, n) for m in ("array", "spatial") for n in (1, 50)}
    assert all(r.wall_seconds > 0 for r in recs)


def test_bench_links_small(tmp_path):
    recs = B.bench_snr([30, 60], reps=2) + B.bench_sinr([30, 60], reps=1, array_cap=40)
    sinr_arr = B.select(recs, "sinr", "array")
    assert {r.n for r in sinr_arr} == {30}
    assert all(r.visited_nodes > 0 for r in B.select(recs, "snr", "spatial"))
    assert all(r.visited_nodes is None for r in B.select(recs, "snr", "array"))
    p = tmp_path / "b.csv"
    B.write_csv(recs, p)
    rows = list(csv.reader(p.open()))
    assert rows[0] == ["task", "method", "n", "rep", "wall_seconds", "visited_nodes"]
    assert len(rows) == len(recs) + 1


def test_mismatch_is_reported(monkeypatch):
    real = B.snr_all_links

    def skewed(c, ch, m):
        t = real(c, ch, m)
        if m == "array":
            t.snr = t.snr + 1.0
        return t

    with pytest.raises(B.OutputMismatch):
        B._bench_links("snr", skewed, [40], None, 1, None)
