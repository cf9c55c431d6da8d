"""Small version of the three timing experiments with fitted slopes.

Pass a larger n list to get closer to the full sweep, e.g.
``python demos/scaling.py 1000 10000 100000`` (the array SNR point at 1e5
takes a few minutes).
"""

import sys

from hetindex import bench as B

ns = [int(v) for v in sys.argv[1:]] or [500, 1000, 2000, 4000]
recs = B.bench_load(ns, reps=3) + B.bench_snr(ns, reps=3) + B.bench_sinr(ns, reps=3)
for (task, method, n), t in B.medians(recs).items():
    print(f"{task:5s} {method:8s} n={n:<7d} {t * 1e3:10.3f} ms")
for task in B.TASKS:
    slopes = {m: B.fit_slope(B.select(recs, task, m)) for m in B.METHODS}
    sp = {n: round(v, 1) for n, v in B.speedups(recs, task).items()}
    print(f"{task}: slope array {slopes['array']:.2f}, spatial {slopes['spatial']:.2f}; array/spatial {sp}")
