"""Compiled R-tree kernels.

The tree lives in a handful of flat arrays so that numba can walk it without
Python overhead. All kernels take the state tuple ``T``::

    T = (child, box, count, level, parent, nfree, ekey, ehandle, efp, meta)

``child[n, s]``   child node id (internal) or entry id (leaf) in slot ``s``
``box[n, s]``     bounds (xmin, ymin, xmax, ymax) of slot ``s``
``count[n]``      number of used slots
``level[n]``      0 for leaves, -1 for freed nodes
``parent[n]``     parent node id, -1 for the root
``nfree``         stack of recycled node ids
``ekey[e]``       point key of entry ``e``
``ehandle[e]``    caller handle of entry ``e``
``efp[e]``        footprint rectangle of entry ``e``
``meta``          ROOT, NODE_HW, NODE_FREE, SIZE

Node arrays carry ``M + 1`` slots so an overflowing node can hold its extra
child until it is split. Capacity is managed by the Python wrapper; kernels
never allocate tree nodes beyond what the wrapper reserved.
"""

import heapq
import math

import numpy as np
from numba import njit

ROOT = 0
NODE_HW = 1
NODE_FREE = 2
SIZE = 3

_CACHE = True


# --------------------------------------------------------------------------
# scalar predicates (mirrors of the ``geometry`` module on raw floats)


@njit(cache=_CACHE, inline="always")
def dist(ax, ay, bx, by):
    dx = ax - bx
    dy = ay - by
    return math.sqrt(dx * dx + dy * dy)


@njit(cache=_CACHE, inline="always")
def box_mindist(x0, y0, x1, y1, cx, cy):
    dx = max(x0 - cx, 0.0, cx - x1)
    dy = max(y0 - cy, 0.0, cy - y1)
    return math.sqrt(dx * dx + dy * dy)


@njit(cache=_CACHE, inline="always")
def prune_r2(r):
    # squared pruning bound with slack: never rejects a box holding a key
    # that passes the exact ``sqrt(dx*dx + dy*dy) <= r`` leaf test
    return r * r * (1.0 + 1e-12) + 1e-300


@njit(cache=_CACHE, inline="always")
def point_in_triangle(px, py, ax, ay, bx, by, cx, cy):
    d1 = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    d2 = (cx - bx) * (py - by) - (cy - by) * (px - bx)
    d3 = (ax - cx) * (py - cy) - (ay - cy) * (px - cx)
    neg = d1 < 0.0 or d2 < 0.0 or d3 < 0.0
    pos = d1 > 0.0 or d2 > 0.0 or d3 > 0.0
    if neg and pos:
        return False
    # bounding-box guard makes collinear (zero-area) triangles behave as segments
    if px < min(ax, bx, cx) or px > max(ax, bx, cx):
        return False
    if py < min(ay, by, cy) or py > max(ay, by, cy):
        return False
    return True


@njit(cache=_CACHE, inline="always")
def _edge_separates(px, py, qx, qy, rx, ry, x0, y0, x1, y1):
    nx = py - qy
    ny = qx - px
    t0 = nx * px + ny * py
    t1 = nx * rx + ny * ry
    tlo = min(t0, t1)
    thi = max(t0, t1)
    c0 = nx * x0 + ny * y0
    c1 = nx * x1 + ny * y0
    c2 = nx * x0 + ny * y1
    c3 = nx * x1 + ny * y1
    rlo = min(min(c0, c1), min(c2, c3))
    rhi = max(max(c0, c1), max(c2, c3))
    return thi < rlo or tlo > rhi


@njit(cache=_CACHE)
def tri_intersects_box(ax, ay, bx, by, cx, cy, x0, y0, x1, y1):
    if max(ax, bx, cx) < x0 or min(ax, bx, cx) > x1:
        return False
    if max(ay, by, cy) < y0 or min(ay, by, cy) > y1:
        return False
    if _edge_separates(ax, ay, bx, by, cx, cy, x0, y0, x1, y1):
        return False
    if _edge_separates(bx, by, cx, cy, ax, ay, x0, y0, x1, y1):
        return False
    if _edge_separates(cx, cy, ax, ay, bx, by, x0, y0, x1, y1):
        return False
    return True


@njit(cache=_CACHE)
def seg_intersects_box(px, py, qx, qy, x0, y0, x1, y1):
    dx = qx - px
    dy = qy - py
    t0 = 0.0
    t1 = 1.0
    for i in range(4):
        if i == 0:
            p = -dx
            q = px - x0
        elif i == 1:
            p = dx
            q = x1 - px
        elif i == 2:
            p = -dy
            q = py - y0
        else:
            p = dy
            q = y1 - py
        if p == 0.0:
            if q < 0.0:
                return False
            continue
        t = q / p
        if p < 0.0:
            if t > t1:
                return False
            if t > t0:
                t0 = t
        else:
            if t < t0:
                return False
            if t < t1:
                t1 = t
    return True


@njit(cache=_CACHE, inline="always")
def in_lobe(ux, uy, cos_half, dx, dy, d):
    # offset from boresight <= half-beamwidth, without an atan2
    return dx * ux + dy * uy >= cos_half * d


# --------------------------------------------------------------------------
# buffers
#
# Walk kernels write into a caller buffer and return -1 when it is full; the
# caller enlarges and retries. Keeping buffer reallocation out of the hot loops
# lets them compile to tight code.


@njit(cache=_CACHE)
def _grow(buf, n):
    if n < buf.shape[0]:
        return buf
    return _enlarge(buf, n)


@njit(cache=_CACHE)
def _enlarge(buf, keep):
    new = np.empty(max(16, 2 * buf.shape[0]), dtype=buf.dtype)
    new[:keep] = buf[:keep]
    return new


# --------------------------------------------------------------------------
# node bookkeeping


@njit(cache=_CACHE)
def _alloc_node(T, lvl):
    child, box, count, level, parent, nfree, ekey, ehandle, efp, meta = T
    if meta[NODE_FREE] > 0:
        meta[NODE_FREE] -= 1
        n = nfree[meta[NODE_FREE]]
    else:
        n = meta[NODE_HW]
        meta[NODE_HW] += 1
    count[n] = 0
    level[n] = lvl
    parent[n] = -1
    return n


@njit(cache=_CACHE)
def _free_node(T, n):
    child, box, count, level, parent, nfree, ekey, ehandle, efp, meta = T
    nfree[meta[NODE_FREE]] = n
    meta[NODE_FREE] += 1
    count[n] = 0
    level[n] = -1
    parent[n] = -1


@njit(cache=_CACHE)
def node_mbr(box, count, n):
    x0 = box[n, 0, 0]
    y0 = box[n, 0, 1]
    x1 = box[n, 0, 2]
    y1 = box[n, 0, 3]
    for s in range(1, count[n]):
        x0 = min(x0, box[n, s, 0])
        y0 = min(y0, box[n, s, 1])
        x1 = max(x1, box[n, s, 2])
        y1 = max(y1, box[n, s, 3])
    return x0, y0, x1, y1


@njit(cache=_CACHE)
def _slot_of(child, count, p, n):
    for s in range(count[p]):
        if child[p, s] == n:
            return s
    return -1


@njit(cache=_CACHE)
def _set_box(box, n, s, x0, y0, x1, y1):
    box[n, s, 0] = x0
    box[n, s, 1] = y0
    box[n, s, 2] = x1
    box[n, s, 3] = y1


@njit(cache=_CACHE)
def _delete_slot(child, box, count, n, s):
    c = count[n]
    for j in range(s, c - 1):
        child[n, j] = child[n, j + 1]
        box[n, j, 0] = box[n, j + 1, 0]
        box[n, j, 1] = box[n, j + 1, 1]
        box[n, j, 2] = box[n, j + 1, 2]
        box[n, j, 3] = box[n, j + 1, 3]
    count[n] = c - 1


# --------------------------------------------------------------------------
# insertion


@njit(cache=_CACHE)
def _choose_leaf(T, x, y):
    child, box, count, level, parent, nfree, ekey, ehandle, efp, meta = T
    n = meta[ROOT]
    while level[n] > 0:
        best = -1
        best_enl = 0.0
        best_area = 0.0
        best_cnt = 0
        for s in range(count[n]):
            x0 = box[n, s, 0]
            y0 = box[n, s, 1]
            x1 = box[n, s, 2]
            y1 = box[n, s, 3]
            area = (x1 - x0) * (y1 - y0)
            ux0 = min(x0, x)
            uy0 = min(y0, y)
            ux1 = max(x1, x)
            uy1 = max(y1, y)
            grown = (ux1 - ux0) * (uy1 - uy0)
            enl = grown - area
            c = count[child[n, s]]
            if (
                best < 0
                or enl < best_enl
                or (enl == best_enl and (grown < best_area or (grown == best_area and c < best_cnt)))
            ):
                best = s
                best_enl = enl
                best_area = grown
                best_cnt = c
        n = child[n, best]
    return n


@njit(cache=_CACHE)
def _split(T, n, m):
    """Guttman quadratic split of overflowing node ``n``; returns the new sibling."""
    child, box, count, level, parent, nfree, ekey, ehandle, efp, meta = T
    k = count[n]
    tb = box[n, :k].copy()
    tc = child[n, :k].copy()
    area = (tb[:, 2] - tb[:, 0]) * (tb[:, 3] - tb[:, 1])

    # PickSeeds: the pair wasting the most area
    s1 = 0
    s2 = 1
    worst = -np.inf
    for i in range(k):
        for j in range(i + 1, k):
            ux0 = min(tb[i, 0], tb[j, 0])
            uy0 = min(tb[i, 1], tb[j, 1])
            ux1 = max(tb[i, 2], tb[j, 2])
            uy1 = max(tb[i, 3], tb[j, 3])
            d = (ux1 - ux0) * (uy1 - uy0) - area[i] - area[j]
            if d > worst:
                worst = d
                s1 = i
                s2 = j

    group = np.full(k, -1, dtype=np.int64)
    group[s1] = 0
    group[s2] = 1
    gb = np.empty((2, 4))
    gb[0] = tb[s1]
    gb[1] = tb[s2]
    gn = np.array([1, 1])
    remaining = k - 2

    while remaining > 0:
        if gn[0] + remaining == m or gn[1] + remaining == m:
            g = 0 if gn[0] + remaining == m else 1
            for i in range(k):
                if group[i] < 0:
                    group[i] = g
                    gn[g] += 1
                    gb[g, 0] = min(gb[g, 0], tb[i, 0])
                    gb[g, 1] = min(gb[g, 1], tb[i, 1])
                    gb[g, 2] = max(gb[g, 2], tb[i, 2])
                    gb[g, 3] = max(gb[g, 3], tb[i, 3])
            remaining = 0
            break

        a0 = (gb[0, 2] - gb[0, 0]) * (gb[0, 3] - gb[0, 1])
        a1 = (gb[1, 2] - gb[1, 0]) * (gb[1, 3] - gb[1, 1])
        # PickNext: strongest preference for one group
        pick = -1
        pick_diff = -1.0
        pick_d0 = 0.0
        pick_d1 = 0.0
        for i in range(k):
            if group[i] >= 0:
                continue
            d0 = (max(gb[0, 2], tb[i, 2]) - min(gb[0, 0], tb[i, 0])) * (
                max(gb[0, 3], tb[i, 3]) - min(gb[0, 1], tb[i, 1])
            ) - a0
            d1 = (max(gb[1, 2], tb[i, 2]) - min(gb[1, 0], tb[i, 0])) * (
                max(gb[1, 3], tb[i, 3]) - min(gb[1, 1], tb[i, 1])
            ) - a1
            diff = abs(d0 - d1)
            if diff > pick_diff:
                pick_diff = diff
                pick = i
                pick_d0 = d0
                pick_d1 = d1
        if pick_d0 < pick_d1:
            g = 0
        elif pick_d1 < pick_d0:
            g = 1
        elif a0 < a1:
            g = 0
        elif a1 < a0:
            g = 1
        elif gn[0] <= gn[1]:
            g = 0
        else:
            g = 1
        group[pick] = g
        gn[g] += 1
        gb[g, 0] = min(gb[g, 0], tb[pick, 0])
        gb[g, 1] = min(gb[g, 1], tb[pick, 1])
        gb[g, 2] = max(gb[g, 2], tb[pick, 2])
        gb[g, 3] = max(gb[g, 3], tb[pick, 3])
        remaining -= 1

    nn = _alloc_node(T, level[n])
    ca = 0
    cb = 0
    internal = level[n] > 0
    for i in range(k):
        if group[i] == 0:
            child[n, ca] = tc[i]
            box[n, ca] = tb[i]
            ca += 1
        else:
            child[nn, cb] = tc[i]
            box[nn, cb] = tb[i]
            if internal:
                parent[tc[i]] = nn
            cb += 1
    count[n] = ca
    count[nn] = cb
    return nn


@njit(cache=_CACHE)
def _adjust_tree(T, n, nn, m):
    child, box, count, level, parent, nfree, ekey, ehandle, efp, meta = T
    M = child.shape[1] - 1
    while n != meta[ROOT]:
        p = parent[n]
        s = _slot_of(child, count, p, n)
        x0, y0, x1, y1 = node_mbr(box, count, n)
        unchanged = (
            box[p, s, 0] == x0 and box[p, s, 1] == y0 and box[p, s, 2] == x1 and box[p, s, 3] == y1
        )
        _set_box(box, p, s, x0, y0, x1, y1)
        if nn >= 0:
            c = count[p]
            child[p, c] = nn
            a0, b0, a1, b1 = node_mbr(box, count, nn)
            _set_box(box, p, c, a0, b0, a1, b1)
            parent[nn] = p
            count[p] = c + 1
            if count[p] > M:
                nn = _split(T, p, m)
            else:
                nn = -1
        elif unchanged:
            return
        n = p
    if nn >= 0:
        r = _alloc_node(T, level[n] + 1)
        child[r, 0] = n
        child[r, 1] = nn
        x0, y0, x1, y1 = node_mbr(box, count, n)
        _set_box(box, r, 0, x0, y0, x1, y1)
        x0, y0, x1, y1 = node_mbr(box, count, nn)
        _set_box(box, r, 1, x0, y0, x1, y1)
        count[r] = 2
        parent[n] = r
        parent[nn] = r
        meta[ROOT] = r


@njit(cache=_CACHE)
def insert_entry(T, e, m):
    """Link the already-populated entry ``e`` into the tree."""
    child, box, count, level, parent, nfree, ekey, ehandle, efp, meta = T
    M = child.shape[1] - 1
    x = ekey[e, 0]
    y = ekey[e, 1]
    leaf = _choose_leaf(T, x, y)
    s = count[leaf]
    child[leaf, s] = e
    _set_box(box, leaf, s, x, y, x, y)
    count[leaf] = s + 1
    meta[SIZE] += 1
    nn = -1
    if count[leaf] > M:
        nn = _split(T, leaf, m)
    _adjust_tree(T, leaf, nn, m)


# --------------------------------------------------------------------------
# removal


@njit(cache=_CACHE)
def find_entry(T, x, y, handle):
    """Locate the leaf slot holding (key, handle); (-1, -1) when absent."""
    child, box, count, level, parent, nfree, ekey, ehandle, efp, meta = T
    if meta[SIZE] == 0:
        return -1, -1
    M = child.shape[1] - 1
    stack = np.empty((level[meta[ROOT]] + 1) * (M + 1) + 1, dtype=np.int64)
    stack[0] = meta[ROOT]
    sp = 1
    while sp > 0:
        sp -= 1
        n = stack[sp]
        if level[n] == 0:
            for s in range(count[n]):
                e = child[n, s]
                if ehandle[e] == handle and ekey[e, 0] == x and ekey[e, 1] == y:
                    return n, s
        else:
            for s in range(count[n]):
                if box[n, s, 0] <= x <= box[n, s, 2] and box[n, s, 1] <= y <= box[n, s, 3]:
                    stack[sp] = child[n, s]
                    sp += 1
    return -1, -1


@njit(cache=_CACHE)
def remove_slot(T, leaf, slot, m):
    """Unlink a leaf slot, condense the path to the root.

    Returns the entry id removed and the ids of orphaned entries that the
    caller must reinsert (their subtrees have already been freed).
    """
    child, box, count, level, parent, nfree, ekey, ehandle, efp, meta = T
    e = child[leaf, slot]
    _delete_slot(child, box, count, leaf, slot)
    meta[SIZE] -= 1

    orphans = np.empty(16, dtype=np.int64)
    no = 0
    M = child.shape[1] - 1
    stack = np.empty((level[meta[ROOT]] + 1) * (M + 1) + 1, dtype=np.int64)

    n = leaf
    while n != meta[ROOT]:
        p = parent[n]
        s = _slot_of(child, count, p, n)
        if count[n] < m:
            _delete_slot(child, box, count, p, s)
            stack[0] = n
            sp = 1
            while sp > 0:
                sp -= 1
                q = stack[sp]
                for j in range(count[q]):
                    if level[q] == 0:
                        orphans = _grow(orphans, no)
                        orphans[no] = child[q, j]
                        no += 1
                    else:
                        stack[sp] = child[q, j]
                        sp += 1
                _free_node(T, q)
        else:
            x0, y0, x1, y1 = node_mbr(box, count, n)
            _set_box(box, p, s, x0, y0, x1, y1)
        n = p

    r = meta[ROOT]
    if level[r] > 0 and count[r] == 0:
        level[r] = 0
    meta[SIZE] -= no
    return e, orphans[:no]


@njit(cache=_CACHE)
def shorten_root(T):
    child, box, count, level, parent, nfree, ekey, ehandle, efp, meta = T
    r = meta[ROOT]
    while level[r] > 0 and count[r] == 1:
        c = child[r, 0]
        _free_node(T, r)
        parent[c] = -1
        meta[ROOT] = c
        r = c


# --------------------------------------------------------------------------
# queries; ``stats`` accumulates (nodes_visited, leaves_visited, returned)


# --------------------------------------------------------------------------
# queries; ``stats`` accumulates (nodes_visited, leaves_visited, returned)


@njit(cache=_CACHE)
def _new_stack(T):
    child, box, count, level, parent, nfree, ekey, ehandle, efp, meta = T
    return np.empty((level[meta[ROOT]] + 1) * child.shape[1] + 1, dtype=np.int64)


@njit(cache=_CACHE)
def _radius_walk(T, cx, cy, r, out, k, stack, stats):
    child, box, count, level, parent, nfree, ekey, ehandle, efp, meta = T
    cap = out.shape[0]
    r2 = prune_r2(r)
    stack[0] = meta[ROOT]
    sp = 1
    k0 = k
    nv = 0
    nl = 0
    while sp > 0:
        sp -= 1
        n = stack[sp]
        nv += 1
        c = count[n]
        if level[n] == 0:
            nl += 1
            for s in range(c):
                dx = box[n, s, 0] - cx
                dy = box[n, s, 1] - cy
                if math.sqrt(dx * dx + dy * dy) <= r:
                    if k == cap:
                        return -1
                    out[k] = child[n, s]
                    k += 1
        else:
            for s in range(c):
                dx = max(box[n, s, 0] - cx, 0.0, cx - box[n, s, 2])
                dy = max(box[n, s, 1] - cy, 0.0, cy - box[n, s, 3])
                if dx * dx + dy * dy <= r2:
                    stack[sp] = child[n, s]
                    sp += 1
    stats[0] += nv
    stats[1] += nl
    stats[2] += k - k0
    return k


@njit(cache=_CACHE)
def _radius_into(T, cx, cy, r, out, k, stack, stats):
    while True:
        k2 = _radius_walk(T, cx, cy, r, out, k, stack, stats)
        if k2 >= 0:
            return out, k2
        out = _enlarge(out, k)


@njit(cache=_CACHE)
def query_radius(T, cx, cy, r):
    stats = np.zeros(3, dtype=np.int64)
    out = np.empty(16, dtype=np.int64)
    if T[9][SIZE] == 0:
        return out[:0], stats
    out, k = _radius_into(T, cx, cy, r, out, 0, _new_stack(T), stats)
    return out[:k], stats


@njit(cache=_CACHE)
def radius_batch(T, qx, qy, qr):
    """One radius query per row; CSR (offsets, handles) plus summed stats."""
    ehandle = T[7]
    nq = qx.shape[0]
    offsets = np.zeros(nq + 1, dtype=np.int64)
    stats = np.zeros(3, dtype=np.int64)
    out = np.empty(max(16, 16 * nq), dtype=np.int64)
    k = 0
    if T[9][SIZE] > 0:
        stack = _new_stack(T)
        for i in range(nq):
            out, k = _radius_into(T, qx[i], qy[i], qr[i], out, k, stack, stats)
            offsets[i + 1] = k
    for j in range(k):
        out[j] = ehandle[out[j]]
    return offsets, out[:k], stats


@njit(cache=_CACHE)
def _join_point(lbox, off, ex, ey, eh, cand, nc, px, py, r, qh, src, dst, k):
    r2 = prune_r2(r)
    nl = 0
    for j in range(nc):
        c = cand[j]
        dx = max(lbox[c, 0] - px, 0.0, px - lbox[c, 2])
        dy = max(lbox[c, 1] - py, 0.0, py - lbox[c, 3])
        if dx * dx + dy * dy > r2:
            continue
        nl += 1
        for e in range(off[c], off[c + 1]):
            dx = ex[e] - px
            dy = ey[e] - py
            if math.sqrt(dx * dx + dy * dy) <= r:
                src[k] = qh
                dst[k] = eh[e]
                k += 1
    return k, nl


@njit(cache=_CACHE)
def self_join_radius(T, qr):
    """Radius query from every entry whose handle ``h`` has ``qr[h] >= 0``.

    Equivalent to one ``query_radius(key_h, qr[h])`` per such entry, but the
    descent is shared between the entries of a leaf: each leaf collects, once,
    the leaves within its largest radius of its own MBR, and its entries then
    scan only those. Leaf contents are first copied into contiguous arrays in
    depth-first leaf order, so the scans stream through memory. Returns
    (query handle, hit handle) pairs.
    """
    child, box, count, level, parent, nfree, ekey, ehandle, efp, meta = T
    stats = np.zeros(3, dtype=np.int64)
    n_all = meta[SIZE]
    src = np.empty(max(16, 16 * n_all), dtype=np.int64)
    dst = np.empty_like(src)
    k = 0
    if n_all == 0:
        return src[:0], dst[:0], stats
    nh = qr.shape[0]
    root = meta[ROOT]

    # leaves in depth-first order
    leaves = np.empty(16, dtype=np.int64)
    nleaf = 0
    stack = _new_stack(T)
    stack[0] = root
    sp = 1
    while sp > 0:
        sp -= 1
        n = stack[sp]
        if level[n] == 0:
            leaves = _grow(leaves, nleaf)
            leaves[nleaf] = n
            nleaf += 1
        else:
            for s in range(count[n] - 1, -1, -1):
                stack[sp] = child[n, s]
                sp += 1

    # contiguous copy: leaf i holds entries off[i] .. off[i + 1]
    leaf_ix = np.full(count.shape[0], -1, dtype=np.int64)
    off = np.zeros(nleaf + 1, dtype=np.int64)
    lbox = np.empty((nleaf, 4))
    ex = np.empty(n_all)
    ey = np.empty(n_all)
    eh = np.empty(n_all, dtype=np.int64)
    q = 0
    for i in range(nleaf):
        L = leaves[i]
        leaf_ix[L] = i
        x0, y0, x1, y1 = node_mbr(box, count, L)
        lbox[i, 0] = x0
        lbox[i, 1] = y0
        lbox[i, 2] = x1
        lbox[i, 3] = y1
        for s in range(count[L]):
            ex[q] = box[L, s, 0]
            ey[q] = box[L, s, 1]
            eh[q] = ehandle[child[L, s]]
            q += 1
        off[i + 1] = q

    cand = np.empty(64, dtype=np.int64)
    for li in range(nleaf):
        rmax = -1.0
        for e in range(off[li], off[li + 1]):
            h = eh[e]
            if h < nh and qr[h] > rmax:
                rmax = qr[h]
        if rmax < 0.0:
            continue
        lx0 = lbox[li, 0]
        ly0 = lbox[li, 1]
        lx1 = lbox[li, 2]
        ly1 = lbox[li, 3]
        r2 = prune_r2(rmax)

        # candidate leaves within rmax of this leaf's MBR
        nc = 0
        if level[root] == 0:
            cand[0] = 0
            nc = 1
            stats[0] += 1
        else:
            stack[0] = root
            sp = 1
            while sp > 0:
                sp -= 1
                n = stack[sp]
                stats[0] += 1
                to_leaf = level[n] == 1
                for s in range(count[n]):
                    dx = max(box[n, s, 0] - lx1, 0.0, lx0 - box[n, s, 2])
                    dy = max(box[n, s, 1] - ly1, 0.0, ly0 - box[n, s, 3])
                    if dx * dx + dy * dy <= r2:
                        if to_leaf:
                            if nc == cand.shape[0]:
                                cand = _enlarge(cand, nc)
                            cand[nc] = leaf_ix[child[n, s]]
                            nc += 1
                        else:
                            stack[sp] = child[n, s]
                            sp += 1

        for e in range(off[li], off[li + 1]):
            qh = eh[e]
            if qh >= nh or qr[qh] < 0.0:
                continue
            need = k
            for j in range(nc):
                need += off[cand[j] + 1] - off[cand[j]]
            if need > src.shape[0]:
                cap = max(2 * src.shape[0], need)
                ns = np.empty(cap, dtype=np.int64)
                nd = np.empty(cap, dtype=np.int64)
                ns[:k] = src[:k]
                nd[:k] = dst[:k]
                src = ns
                dst = nd
            k0 = k
            k, nl = _join_point(lbox, off, ex, ey, eh, cand, nc, ex[e], ey[e], qr[qh], qh, src, dst, k)
            stats[0] += nl
            stats[1] += nl
            stats[2] += k - k0
    return src[:k], dst[:k], stats


@njit(cache=_CACHE)
def _scan_walk(xs, ys, hs, cx, cy, r, qh, src, dst, k):
    cap = src.shape[0]
    for j in range(xs.shape[0]):
        dx = xs[j] - cx
        dy = ys[j] - cy
        if math.sqrt(dx * dx + dy * dy) <= r:
            if k == cap:
                return -1
            src[k] = qh
            dst[k] = hs[j]
            k += 1
    return k


@njit(cache=_CACHE)
def scan_radius(xs, ys, hs, qx, qy, qr, qh):
    """Array-indexing baseline: every query compares against every stored node."""
    n = qx.shape[0]
    src = np.empty(max(16, 16 * n), dtype=np.int64)
    dst = np.empty_like(src)
    k = 0
    for i in range(n):
        while True:
            k2 = _scan_walk(xs, ys, hs, qx[i], qy[i], qr[i], qh[i], src, dst, k)
            if k2 >= 0:
                k = k2
                break
            src = _enlarge(src, k)
            dst = _enlarge(dst, k)
    return src[:k], dst[:k]


@njit(cache=_CACHE)
def _triangle_walk(T, ax, ay, bx, by, cx, cy, eps, out, k, stack, stats):
    child, box, count, level, parent, nfree, ekey, ehandle, efp, meta = T
    cap = out.shape[0]
    stack[0] = meta[ROOT]
    sp = 1
    k0 = k
    nv = 0
    nl = 0
    while sp > 0:
        sp -= 1
        n = stack[sp]
        nv += 1
        if level[n] == 0:
            nl += 1
            for s in range(count[n]):
                if point_in_triangle(box[n, s, 0], box[n, s, 1], ax, ay, bx, by, cx, cy):
                    if k == cap:
                        return -1
                    out[k] = child[n, s]
                    k += 1
        else:
            for s in range(count[n]):
                if tri_intersects_box(
                    ax, ay, bx, by, cx, cy,
                    box[n, s, 0] - eps, box[n, s, 1] - eps, box[n, s, 2] + eps, box[n, s, 3] + eps,
                ):
                    stack[sp] = child[n, s]
                    sp += 1
    stats[0] += nv
    stats[1] += nl
    stats[2] += k - k0
    return k


@njit(cache=_CACHE)
def query_triangle(T, ax, ay, bx, by, cx, cy, eps):
    stats = np.zeros(3, dtype=np.int64)
    out = np.empty(16, dtype=np.int64)
    if T[9][SIZE] == 0:
        return out[:0], stats
    stack = _new_stack(T)
    while True:
        k = _triangle_walk(T, ax, ay, bx, by, cx, cy, eps, out, 0, stack, stats)
        if k >= 0:
            return out[:k], stats
        out = _enlarge(out, 0)


@njit(cache=_CACHE)
def _segment_walk(T, px, py, qx, qy, hx, hy, out, k, stack, stats):
    child, box, count, level, parent, nfree, ekey, ehandle, efp, meta = T
    cap = out.shape[0]
    stack[0] = meta[ROOT]
    sp = 1
    k0 = k
    nv = 0
    nl = 0
    while sp > 0:
        sp -= 1
        n = stack[sp]
        nv += 1
        if level[n] == 0:
            nl += 1
            for s in range(count[n]):
                e = child[n, s]
                if seg_intersects_box(px, py, qx, qy, efp[e, 0], efp[e, 1], efp[e, 2], efp[e, 3]):
                    if k == cap:
                        return -1
                    out[k] = e
                    k += 1
        else:
            for s in range(count[n]):
                if seg_intersects_box(
                    px, py, qx, qy,
                    box[n, s, 0] - hx, box[n, s, 1] - hy, box[n, s, 2] + hx, box[n, s, 3] + hy,
                ):
                    stack[sp] = child[n, s]
                    sp += 1
    stats[0] += nv
    stats[1] += nl
    stats[2] += k - k0
    return k


@njit(cache=_CACHE)
def _segment_into(T, px, py, qx, qy, hx, hy, out, stack, stats):
    while True:
        k = _segment_walk(T, px, py, qx, qy, hx, hy, out, 0, stack, stats)
        if k >= 0:
            return out, k
        out = _enlarge(out, 0)


@njit(cache=_CACHE)
def query_segment(T, px, py, qx, qy, hx, hy):
    stats = np.zeros(3, dtype=np.int64)
    out = np.empty(16, dtype=np.int64)
    if T[9][SIZE] == 0:
        return out[:0], stats
    out, k = _segment_into(T, px, py, qx, qy, hx, hy, out, _new_stack(T), stats)
    return out[:k], stats


@njit(cache=_CACHE)
def blocked_batch(T, ax, ay, bx, by, hx, hy, blocker):
    """Per segment: does the footprint of any entry flagged in ``blocker``
    (indexed by handle) touch it."""
    ehandle = T[7]
    nq = ax.shape[0]
    res = np.zeros(nq, dtype=np.bool_)
    stats = np.zeros(3, dtype=np.int64)
    if T[9][SIZE] == 0:
        return res, stats
    stack = _new_stack(T)
    cand = np.empty(16, dtype=np.int64)
    for i in range(nq):
        cand, nc = _segment_into(T, ax[i], ay[i], bx[i], by[i], hx, hy, cand, stack, stats)
        for j in range(nc):
            h = ehandle[cand[j]]
            if h < blocker.shape[0] and blocker[h]:
                res[i] = True
                break
    return res, stats


@njit(cache=_CACHE)
def scan_blocked(ax, ay, bx, by, fp):
    """Array-indexing baseline for ``blocked_batch``: every segment against
    every blockage footprint."""
    nq = ax.shape[0]
    res = np.zeros(nq, dtype=np.bool_)
    for i in range(nq):
        for j in range(fp.shape[0]):
            if seg_intersects_box(ax[i], ay[i], bx[i], by[i], fp[j, 0], fp[j, 1], fp[j, 2], fp[j, 3]):
                res[i] = True
                break
    return res


@njit(cache=_CACHE)
def query_knn(T, cx, cy, k):
    """Best-first k nearest entries; ties resolved by handle, then entry id."""
    child, box, count, level, parent, nfree, ekey, ehandle, efp, meta = T
    out = np.empty(k, dtype=np.int64)
    stats = np.zeros(3, dtype=np.int64)
    if meta[SIZE] == 0:
        return out[:0], stats
    # (distance, is_entry, handle, id): nodes sort before entries at equal distance
    heap = [(0.0, 0, -1, meta[ROOT])]
    got = 0
    while len(heap) > 0 and got < k:
        d, is_entry, h, i = heapq.heappop(heap)
        if is_entry == 1:
            out[got] = i
            got += 1
            continue
        stats[0] += 1
        if level[i] == 0:
            stats[1] += 1
            for s in range(count[i]):
                e = child[i, s]
                heapq.heappush(heap, (dist(ekey[e, 0], ekey[e, 1], cx, cy), 1, ehandle[e], e))
        else:
            for s in range(count[i]):
                md = box_mindist(box[i, s, 0], box[i, s, 1], box[i, s, 2], box[i, s, 3], cx, cy)
                heapq.heappush(heap, (md, 0, -1, child[i, s]))
    stats[2] = got
    return out[:got], stats
