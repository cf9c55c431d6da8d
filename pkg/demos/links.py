"""All-links SNR and SINR on a seeded deployment, computed both ways."""

import time

import numpy as np

from hetindex import NodeKind, ScenarioConfig, generate, sinr_all_links, snr_all_links

cfg = ScenarioConfig.for_n(2000, density=100, seed=7, blockage_count=40)
sc = generate(cfg)
c, ch = sc.container, sc.channel
print(f"{cfg.n_sbs} SBSs on {cfg.area_width:.0f} m x {cfg.area_height:.0f} m, {c.count(NodeKind.BLOCKAGE)} blockages")

out = {}
for fn in (snr_all_links, sinr_all_links):
    for method in ("array", "spatial"):
        fn(c, ch, method)  # compile / warm
        t0 = time.perf_counter()
        out[fn.__name__, method] = fn(c, ch, method)
        print(f"{fn.__name__:14s} {method:8s} {time.perf_counter() - t0:8.4f} s")

s = out["sinr_all_links", "spatial"]
print("methods agree bit for bit:", s.equals(out["sinr_all_links", "array"]))
print(f"{len(s)} links, mean SNR {s.snr.mean():.1f} dB, mean SINR {s.sinr.mean():.1f} dB")
print("links with interference:", int(np.count_nonzero(s.num_interferers)))
worst = s[int(np.argmin(s.sinr - s.snr))]
print(f"worst hit: {worst.tx_id} -> {worst.rx_id}, SNR {worst.snr:.1f} dB, SINR {worst.sinr:.1f} dB, "
      f"interferers {worst.interferer_ids}")
