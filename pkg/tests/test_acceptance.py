"""Acceptance criteria 1-9, one test each.

Every test prints a ``CRITERION k PASS|FAIL`` line with its measured numbers.
Run standalone with ``python tests/test_acceptance.py`` to get just the
summary lines.
"""

import math
import sys
import time

import numpy as np
import pytest

from hetindex import bench as B
from hetindex.geometry import Point, Rect, Segment, Triangle, angle_offset, point_in_triangle
from hetindex.network import Container, NetNode, NodeKind, TrxParams
from hetindex.radio import AntennaPattern, sector_triangle, sinr_all_links
from hetindex.rtree import RTree
from hetindex.scenario import ScenarioConfig, generate

# ---------------------------------------------------------------- oracles


def brute_radius(P, c, r):
    return set(np.nonzero(np.hypot(P[:, 0] - c[0], P[:, 1] - c[1]) <= r)[0].tolist())


def brute_knn(P, c, k):
    d = np.hypot(P[:, 0] - c[0], P[:, 1] - c[1])
    return np.lexsort((np.arange(len(P)), d))[:k].tolist()


def brute_triangle(P, t):
    (ax, ay), (bx, by), (cx, cy) = t

    def side(x0, y0, x1, y1):
        return (x1 - x0) * (P[:, 1] - y0) - (y1 - y0) * (P[:, 0] - x0)

    s1, s2, s3 = side(ax, ay, bx, by), side(bx, by, cx, cy), side(cx, cy, ax, ay)
    inside = ((s1 >= 0) & (s2 >= 0) & (s3 >= 0)) | ((s1 <= 0) & (s2 <= 0) & (s3 <= 0))
    if (bx - ax) * (cy - ay) - (by - ay) * (cx - ax) == 0:  # degenerate: on the hull segment
        xs, ys = (ax, bx, cx), (ay, by, cy)
        inside &= (s1 == 0) & (s2 == 0) & (s3 == 0)
        inside &= (P[:, 0] >= min(xs)) & (P[:, 0] <= max(xs)) & (P[:, 1] >= min(ys)) & (P[:, 1] <= max(ys))
    return set(np.nonzero(inside)[0].tolist())


def brute_segment(F, p, q):
    """Liang-Barsky clip of segment p->q against each footprint box."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    t0 = np.zeros(len(F))
    t1 = np.ones(len(F))
    ok = np.ones(len(F), dtype=bool)
    for d, lo, hi, o in ((dx, F[:, 0], F[:, 2], p[0]), (dy, F[:, 1], F[:, 3], p[1])):
        if d == 0:
            ok &= (o >= lo) & (o <= hi)
        else:
            a, b = (lo - o) / d, (hi - o) / d
            t0 = np.maximum(t0, np.minimum(a, b))
            t1 = np.minimum(t1, np.maximum(a, b))
    return set(np.nonzero(ok & (t0 <= t1))[0].tolist())


# ------------------------------------------------------------- criteria


def criterion_1():
    mismatches = 0
    checked = 0
    for n in (100, 1000, 10_000):
        for seed in range(3):
            rng = np.random.default_rng(1000 * n + seed)
            side = math.sqrt(n / 100) * 1000
            P = rng.uniform(0, side, (n, 2))
            F = np.column_stack([P, P])
            boxed = rng.random(n) < 0.1  # a tenth carry footprints
            half = rng.uniform(1, 15, (n, 2))
            F[boxed, :2] -= half[boxed]
            F[boxed, 2:] += half[boxed]
            tree = RTree(16)
            for i in range(n):
                fp = Rect.from_bounds(*F[i]) if boxed[i] else None
                tree.insert(Point(*P[i]), i, fp)
            for _ in range(100):
                c = rng.uniform(-0.1 * side, 1.1 * side, 2)
                r = rng.uniform(0, 300)
                got = {e.handle for e in tree.query_radius(Point(*c), r)[0]}
                mismatches += got != brute_radius(P, c, r)
                k = int(rng.integers(1, 21))
                mismatches += [e.handle for e in tree.query_knn(Point(*c), k)] != brute_knn(P, c, k)
                v = rng.uniform(-0.1 * side, 1.1 * side, (3, 2))
                tri = Triangle(*(Point(*x) for x in v))
                mismatches += {e.handle for e in tree.query_triangle(tri)[0]} != brute_triangle(P, v)
                a = rng.uniform(0, side, 2)
                b = a + rng.uniform(-400, 400, 2)
                got = {e.handle for e in tree.query_segment(Segment(Point(*a), Point(*b)))}
                mismatches += got != brute_segment(F, a, b)
                checked += 4
    return mismatches == 0, f"{checked} queries, {mismatches} mismatches"


def _leaf_depths(s, d=0):
    if all(isinstance(x, int) for x in s):
        return {d}
    out = set()
    for x in s:
        out |= _leaf_depths(x, d + 1)
    return out


def criterion_2():
    parts = []
    ok = True
    for M in (3, 8, 16):
        rng = np.random.default_rng(M)
        t = RTree(M)
        live = []
        pos = {}
        for i in range(10_000):
            if live and rng.random() < 0.4:
                j = int(rng.integers(len(live)))
                h = live[j]
                live[j] = live[-1]
                live.pop()
                t.remove(pos.pop(h), h)
            else:
                p = Point(*rng.uniform(0, 1000, 2))
                t.insert(p, i)
                pos[i] = p
                live.append(i)
        problems = t.validate()
        depths = _leaf_depths(t.structure()) if len(t) else {0}
        good = not problems and len(depths) == 1 and len(t) == len(live)
        ok &= good
        parts.append(f"M={M}: size {len(t)}, height {t.height}, {len(problems)} violations, leaf depths {sorted(depths)}")
    return ok, "; ".join(parts)


def criterion_3():
    c = Container(3)
    omni = AntennaPattern.omni()
    ant = AntennaPattern.normalized(math.radians(30), 10)
    c.add_node(NetNode(0, NodeKind.MACRO_BS, Point(50, 50), trx=TrxParams(2e9, 46, omni, 0, 1000)))
    for i, (x, y) in enumerate([(20, 20), (80, 25), (25, 80), (75, 75)], start=1):
        c.add_node(NetNode(i, NodeKind.SMALL_BS, Point(x, y), trx=TrxParams(28e9, 30, ant)))
    for i, (x, y) in enumerate([(30, 40), (60, 30), (40, 65), (70, 55)], start=5):
        c.add_node(NetNode(i, NodeKind.UE, Point(x, y), trx=TrxParams(28e9, 23, omni)))
    c.add_node(NetNode(9, NodeKind.BLOCKAGE, Point(50, 20), width=10, length=6))
    h = c.tree.height
    return h == 3 and len(c.tree) == 10, f"10 entries, M=3 -> height {h}"


_SNR = {}


def criterion_4():
    recs = B.bench_snr([1000, 10_000, 100_000], reps=5)
    _SNR["records"] = recs
    sa = B.fit_slope(B.select(recs, "snr", "array"))
    ss = B.fit_slope(B.select(recs, "snr", "spatial"))
    sp = B.speedups(recs, "snr")
    ok = 1.7 <= sa <= 2.3 and 0.8 <= ss <= 1.5 and sp[10_000] >= 10 and sp[100_000] >= 100
    return ok, (f"slope array {sa:.3f}, spatial {ss:.3f}; speedup n=1e4 {sp[10_000]:.1f}x, "
                f"n=1e5 {sp[100_000]:.1f}x")


def _linear_match(a, b):
    """Interferer sets equal and SINR equal in the linear domain within 1e-9."""
    ta = {(m.tx_id, m.rx_id): m for m in a}
    tb = {(m.tx_id, m.rx_id): m for m in b}
    if ta.keys() != tb.keys():
        return False, 0
    worst = 0.0
    for key, x in ta.items():
        y = tb[key]
        if set(x.interferer_ids) != set(y.interferer_ids):
            return False, worst
        lx, ly = 10 ** (x.sinr / 10), 10 ** (y.sinr / 10)
        worst = max(worst, abs(lx - ly) / abs(lx))
    return worst <= 1e-9, worst


def criterion_5():
    recs = B.bench_sinr([5000], reps=5)  # raises OutputMismatch if the methods disagree
    sp = B.speedups(recs, "sinr")[5000]
    sc = generate(B._config(5000, None))
    a = sinr_all_links(sc.container, sc.channel, "array")
    s = sinr_all_links(sc.container, sc.channel, "spatial")
    same, worst = _linear_match(a, s)
    bit = a.equals(s)
    return sp >= 20 and same, f"n=5000 speedup {sp:.1f}x, {len(s)} links, identical={same} (bitwise {bit}, max rel {worst:.1e})"


LOAD_GRID = (1562, 3125, 6250, 12_500, 25_000, 50_000, 100_000)


def criterion_6():
    B.bench_load([2000], reps=1)  # process-level warm-up
    recs = B.bench_load(LOAD_GRID, reps=5)
    med = B.medians(recs)
    slower = all(med[("load", "spatial", n)] > med[("load", "array", n)] for n in LOAD_GRID)
    ratios = B.doubling_ratios(recs, "load", "spatial")
    worst = max(ratios.values())
    over = min(med[("load", "spatial", n)] / med[("load", "array", n)] for n in LOAD_GRID)
    return slower and worst < 2.5, (f"spatial/array load >= {over:.2f}x at every n; max doubling ratio "
                                    f"{worst:.3f} ({', '.join(f'{n}:{r:.2f}' for n, r in ratios.items())})")


def criterion_7():
    rng = np.random.default_rng(77)
    N = 100_000
    misses = tested = 0
    for i in range(N):
        o = Point(*rng.uniform(-1e4, 1e4, 2))
        bore = float(rng.uniform(-2 * math.pi, 2 * math.pi))
        bw = float(rng.uniform(1e-3, math.pi - 1e-9))
        r = float(rng.uniform(1, 1000))
        mode = i % 3
        # a third on the range arc, a third on the lobe edges, each within ~1e-12
        edge = 1.0 - 1e-12 * rng.random()
        frac = edge if mode == 0 else math.sqrt(rng.random())
        side = float(rng.choice([-1.0, 1.0])) * edge if mode == 1 else float(rng.uniform(-1, 1))
        ang = bore + side * 0.5 * bw
        p = Point(o.x + frac * r * math.cos(ang), o.y + frac * r * math.sin(ang))
        d = math.hypot(p.x - o.x, p.y - o.y)
        if d > r or (d > 0 and angle_offset(o, bore, p) > 0.5 * bw):
            continue  # rounding pushed the sample out of the exact sector
        tested += 1
        if not point_in_triangle(p, sector_triangle(o, bore, bw, r)):
            misses += 1
    return misses == 0 and tested > 0.9 * N, f"{N} samples, {tested} exact members, {misses} misses"


def criterion_8():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(100):
        bw = float(rng.uniform(0.05, math.pi))
        gmax = float(rng.uniform(1.0, 2 * math.pi / bw))
        ant = AntennaPattern.normalized(bw, gmax)
        bore = float(rng.uniform(0, 2 * math.pi))
        # composite midpoint rule on each piece between the lobe edges
        cuts = sorted({0.0, 2 * math.pi, (bore - bw / 2) % (2 * math.pi), (bore + bw / 2) % (2 * math.pi)})
        total = 0.0
        for a, b in zip(cuts, cuts[1:]):
            if b <= a:
                continue
            m = 2000
            mids = a + (np.arange(m) + 0.5) * (b - a) / m
            o = Point(0.0, 0.0)
            g = [ant.gain(angle_offset(o, bore, Point(math.cos(t), math.sin(t)))) for t in mids]
            total += sum(g) * (b - a) / m
        worst = max(worst, abs(total - 2 * math.pi))
    return worst <= 1e-6, f"100 patterns, max |integral - 2pi| = {worst:.2e}"


def criterion_9():
    ns = (100, 1000, 5000, 10_000, 100_000)
    links = 0
    bad = 0
    for n in ns:
        sc = generate(B._config(n, None))
        t = sinr_all_links(sc.container, sc.channel)
        links += len(t)
        bad += int(np.count_nonzero(t.sinr > t.snr))
    c = Container()
    ant = AntennaPattern.normalized(math.radians(30), 10)
    c.add_node(NetNode(0, NodeKind.SMALL_BS, Point(0, 0), trx=TrxParams(28e9, 30, ant, 0.0)))
    c.add_node(NetNode(1, NodeKind.SMALL_BS, Point(120, 0), trx=TrxParams(28e9, 30, ant, math.pi)))
    pair = sinr_all_links(c)
    exact = all(m.sinr == m.snr for m in pair) and len(pair) == 2
    return bad == 0 and exact, f"{links} links over n={ns}: {bad} with sinr > snr; isolated pair sinr == snr: {exact}"


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9,
}


def evaluate(k):
    t0 = time.perf_counter()
    ok, detail = CRITERIA[k]()
    return ok, f"CRITERION {k} {'PASS' if ok else 'FAIL'}: {detail} [{time.perf_counter() - t0:.1f} s]"


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, capsys):
    ok, line = evaluate(k)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for k in sorted(CRITERIA):
        ok, line = evaluate(k)
        print(line, flush=True)
        failed += not ok
    sys.exit(1 if failed else 0)
