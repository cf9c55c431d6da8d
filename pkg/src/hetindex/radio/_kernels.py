"""Compiled link-budget kernels shared by the array and spatial methods.

Both methods feed the same per-link functions, so whatever differs between
them (how candidate pairs and interferers are found) cannot leak into the
numbers; link powers come out bit-identical.
"""

import math

import numpy as np
from numba import njit

from .._kernels import _enlarge, in_lobe, point_in_triangle, seg_intersects_box

_CACHE = True
LN10_BY_10 = math.log(10.0) / 10.0


@njit(cache=_CACHE)
def map_pairs(src_h, dst_h, col_of):
    """Handle pairs -> column pairs, dropping non-column and self pairs."""
    nh = col_of.shape[0]
    n = src_h.shape[0]
    a = np.empty(n, dtype=np.int64)
    b = np.empty(n, dtype=np.int64)
    m = 0
    for i in range(n):
        hs = src_h[i]
        hd = dst_h[i]
        if hs >= nh or hd >= nh:
            continue
        cs = col_of[hs]
        cd = col_of[hd]
        if cs < 0 or cd < 0 or cs == cd:
            continue
        a[m] = cs
        b[m] = cd
        m += 1
    return a[:m], b[:m]


# packed per-column radio attributes, one cache line per SBS
PX, PY, PUX, PUY, PCOS, PGMAX, PGMIN, PPTX = range(8)
NPACK = 8


@njit(cache=_CACHE, inline="always")
def rx_dbm(t, r, P, ref, a10, d0, pen, los):
    """Distance and received power (dBm) at column ``r`` from column ``t``."""
    dx = P[r, PX] - P[t, PX]
    dy = P[r, PY] - P[t, PY]
    d = math.sqrt(dx * dx + dy * dy)
    gt = P[t, PGMAX] if in_lobe(P[t, PUX], P[t, PUY], P[t, PCOS], dx, dy, d) else P[t, PGMIN]
    gr = P[r, PGMAX] if in_lobe(P[r, PUX], P[r, PUY], P[r, PCOS], -dx, -dy, d) else P[r, PGMIN]
    pl = ref
    if d > d0:
        pl += a10 * math.log10(d / d0)
    if not los:
        pl += pen
    return d, P[t, PPTX] + gt + gr - pl


@njit(cache=_CACHE, inline="always")
def dbm_to_mw(p):
    return math.exp(p * LN10_BY_10)


@njit(cache=_CACHE)
def link_budget(src, dst, los, P, ref, a10, d0, pen, linear):
    """Per link: distance, received power (dBm) and, if ``linear``, its value
    in mW (otherwise an empty array). ``los`` may be empty, meaning every link
    is line of sight."""
    m = src.shape[0]
    dist = np.empty(m)
    dbm = np.empty(m)
    mw = np.empty(m if linear else 0)
    all_los = los.shape[0] == 0
    for i in range(m):
        clear = True if all_los else los[i]
        d, p = rx_dbm(src[i], dst[i], P, ref, a10, d0, pen, clear)
        dist[i] = d
        dbm[i] = p
        if linear:
            mw[i] = dbm_to_mw(p)
    return dist, dbm, mw


@njit(cache=_CACHE, inline="always")
def sinr_from(snr_db, interference_mw, noise_mw):
    # snr - 10 log10(1 + I/N): exactly snr when I == 0, never above it
    if interference_mw == 0.0:
        return snr_db
    return snr_db - math.log1p(interference_mw / noise_mw) / LN10_BY_10


@njit(cache=_CACHE)
def covered_links(src, dst, P, tri, has_tri):
    """Per link (k, r): does r sit in k's main-lobe sector. The triangle is
    the cheap filter, the lobe test the exact one; range holds by
    construction of the link set."""
    m = src.shape[0]
    out = np.zeros(m, dtype=np.bool_)
    for i in range(m):
        k = src[i]
        r = dst[i]
        px = P[r, PX]
        py = P[r, PY]
        if has_tri[k] and not point_in_triangle(
            px, py, tri[k, 0], tri[k, 1], tri[k, 2], tri[k, 3], tri[k, 4], tri[k, 5]
        ):
            continue
        dx = px - P[k, PX]
        dy = py - P[k, PY]
        d = math.sqrt(dx * dx + dy * dy)
        out[i] = in_lobe(P[k, PUX], P[k, PUY], P[k, PCOS], dx, dy, d)
    return out


@njit(cache=_CACHE)
def _finish(snr_db, imw, noise_mw):
    m = snr_db.shape[0]
    sinr = np.empty(m)
    for i in range(m):
        sinr[i] = sinr_from(snr_db[i], imw[i], noise_mw)
    return sinr


@njit(cache=_CACHE)
def sinr_spatial(src, dst, mw, covered, snr_db, noise_mw, col_id):
    """Interference per link from the links themselves.

    The power k puts on r is the received power of link (k, r), so grouping
    covered links by receiver gives every receiver's interferer set; link
    (t, r) then sums its receiver's group minus t. Groups are sorted by
    transmitter id (``col_id``) so each sum runs in ascending id order.
    """
    m = src.shape[0]
    ncol = col_id.shape[0]
    start = np.zeros(ncol + 1, dtype=np.int64)
    for i in range(m):
        if covered[i]:
            start[dst[i] + 1] += 1
    for c in range(ncol):
        start[c + 1] += start[c]
    fill = start[:-1].copy()
    grp = np.empty(start[ncol], dtype=np.int64)
    for i in range(m):
        if covered[i]:
            r = dst[i]
            grp[fill[r]] = i
            fill[r] += 1
    for c in range(ncol):
        for i in range(start[c] + 1, start[c + 1]):
            v = grp[i]
            j = i - 1
            while j >= start[c] and col_id[src[grp[j]]] > col_id[src[v]]:
                grp[j + 1] = grp[j]
                j -= 1
            grp[j + 1] = v

    imw = np.zeros(m)
    ni = np.zeros(m, dtype=np.int64)
    for i in range(m):
        t = src[i]
        r = dst[i]
        acc = 0.0
        cnt = 0
        for g in range(start[r], start[r + 1]):
            j = grp[g]
            if src[j] != t:
                acc += mw[j]
                cnt += 1
        imw[i] = acc
        ni[i] = cnt
    offsets = np.zeros(m + 1, dtype=np.int64)
    for i in range(m):
        offsets[i + 1] = offsets[i] + ni[i]
    ids = np.empty(offsets[m], dtype=np.int64)
    for i in range(m):
        t = src[i]
        r = dst[i]
        p = offsets[i]
        for g in range(start[r], start[r + 1]):
            k = src[grp[g]]
            if k != t:
                ids[p] = k
                p += 1
    return _finish(snr_db, imw, noise_mw), imw, offsets, ids


@njit(cache=_CACHE)
def _scan_los(ax, ay, bx, by, fp):
    for j in range(fp.shape[0]):
        if seg_intersects_box(ax, ay, bx, by, fp[j, 0], fp[j, 1], fp[j, 2], fp[j, 3]):
            return False
    return True


@njit(cache=_CACHE)
def _array_link(t, r, P, xs, ys, rs, lobe, by_id, ref, a10, d0, pen, fp, ids, q):
    """Interferers of link (t, r) by full scan; appends them to ``ids`` and
    returns (sum mW, new fill), or fill -1 when ``ids`` is full."""
    cap = ids.shape[0]
    blockers = fp.shape[0] > 0
    xr = P[r, PX]
    yr = P[r, PY]
    acc = 0.0
    for j in range(xs.shape[0]):
        dx = xr - xs[j]
        dy = yr - ys[j]
        d = math.sqrt(dx * dx + dy * dy)
        if d <= rs[j] and in_lobe(lobe[j, 0], lobe[j, 1], lobe[j, 2], dx, dy, d):
            k = by_id[j]
            if k == t or k == r:
                continue
            clear = True
            if blockers:
                clear = _scan_los(P[k, PX], P[k, PY], xr, yr, fp)
            _, p = rx_dbm(k, r, P, ref, a10, d0, pen, clear)
            acc += dbm_to_mw(p)
            if q == cap:
                return acc, -1
            ids[q] = k
            q += 1
    return acc, q


@njit(cache=_CACHE)
def sinr_array(src, dst, snr_db, P, rng, by_id, ref, a10, d0, pen, fp, noise_mw):
    """Array-indexing baseline: every link scans every transmitter, in id
    order (``by_id``)."""
    m = src.shape[0]
    ncol = P.shape[0]
    # id-ordered copies so the scan streams through memory
    xs = np.empty(ncol)
    ys = np.empty(ncol)
    rs = np.empty(ncol)
    lobe = np.empty((ncol, 3))
    for j in range(ncol):
        k = by_id[j]
        xs[j] = P[k, PX]
        ys[j] = P[k, PY]
        rs[j] = rng[k]
        lobe[j, 0] = P[k, PUX]
        lobe[j, 1] = P[k, PUY]
        lobe[j, 2] = P[k, PCOS]
    imw = np.zeros(m)
    ids = np.empty(max(16, 2 * m), dtype=np.int64)
    offsets = np.zeros(m + 1, dtype=np.int64)
    q = 0
    for i in range(m):
        while True:
            acc, q2 = _array_link(src[i], dst[i], P, xs, ys, rs, lobe, by_id, ref, a10, d0, pen, fp, ids, q)
            if q2 >= 0:
                break
            ids = _enlarge(ids, q)
        q = q2
        imw[i] = acc
        offsets[i + 1] = q
    return _finish(snr_db, imw, noise_mw), imw, offsets, ids[:q]
