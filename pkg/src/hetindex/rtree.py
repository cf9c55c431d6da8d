"""Dynamic Guttman R-tree over point keys with quadratic split.

Leaves hold ``Entry`` pairs ``(key, handle)``: the point the element is
indexed at and an opaque integer handle the caller resolves back to its own
record. Each entry may also carry a footprint rectangle, which is what
segment queries test against.

The tree state is kept in flat numpy arrays and walked by compiled kernels
(see ``_kernels``); this class owns capacity management and converts between
geometry objects and raw coordinates.

Example
-------
>>> tree = RTree(max_entries=3)
>>> for i, (x, y) in enumerate([(0, 0), (3, 4), (10, 0)]):
...     tree.insert(Point(x, y), i)
>>> sorted(e.handle for e in tree.query_radius(Point(0, 0), 5.0)[0])
[0, 1]
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from . import _kernels as K
from .geometry import Point, Rect, Segment, Triangle

__all__ = ["Entry", "QueryStats", "RTree", "EntryNotFound"]

# slack added around node MBRs when pruning by triangle; keeps pruning
# conservative with respect to the exact leaf test
PRUNE_EPS = 1e-7


class EntryNotFound(LookupError):
    pass


class Entry(NamedTuple):
    key: Point
    handle: int


@dataclass
class QueryStats:
    nodes_visited: int = 0
    leaves_visited: int = 0
    candidates_returned: int = 0

    @classmethod
    def _from(cls, arr) -> "QueryStats":
        return cls(int(arr[0]), int(arr[1]), int(arr[2]))

    def __iadd__(self, other: "QueryStats") -> "QueryStats":
        self.nodes_visited += other.nodes_visited
        self.leaves_visited += other.leaves_visited
        self.candidates_returned += other.candidates_returned
        return self


class RTree:
    """R-tree with fanout ``max_entries`` (``M``) and minimum fill ``min_entries`` (``m``).

    ``m`` defaults to ``max(2, ceil(0.4 * M))``. Mutations need exclusive
    access; concurrent readers are fine once mutation has stopped.
    """

    def __init__(self, max_entries: int = 16, min_entries: int | None = None):
        if max_entries < 3:
            raise ValueError("max_entries must be >= 3")
        if min_entries is None:
            min_entries = max(2, math.ceil(0.4 * max_entries))
        # an overflowing node of M + 1 children must split into two legal halves
        if not 2 <= min_entries <= (max_entries + 1) // 2:
            raise ValueError(f"min_entries must lie in [2, {(max_entries + 1) // 2}]")
        self.M = max_entries
        self.m = min_entries
        self._alloc(node_cap=16, entry_cap=64)
        self._free_entries: list[int] = []
        self._entry_hw = 0
        # largest footprint half-extents seen; never shrinks on removal
        self._half_x = 0.0
        self._half_y = 0.0

    # ------------------------------------------------------------------ state

    def _alloc(self, node_cap, entry_cap):
        W = self.M + 1
        self._child = np.zeros((node_cap, W), dtype=np.int64)
        self._box = np.zeros((node_cap, W, 4))
        self._count = np.zeros(node_cap, dtype=np.int64)
        self._level = np.full(node_cap, -1, dtype=np.int64)
        self._parent = np.full(node_cap, -1, dtype=np.int64)
        self._nfree = np.zeros(node_cap, dtype=np.int64)
        self._ekey = np.zeros((entry_cap, 2))
        self._ehandle = np.full(entry_cap, -1, dtype=np.int64)
        self._efp = np.zeros((entry_cap, 4))
        self._meta = np.zeros(4, dtype=np.int64)
        # node 0 is an empty leaf root
        self._level[0] = 0
        self._meta[K.ROOT] = 0
        self._meta[K.NODE_HW] = 1
        self._pack()

    def _pack(self):
        self._T = (
            self._child, self._box, self._count, self._level, self._parent,
            self._nfree, self._ekey, self._ehandle, self._efp, self._meta,
        )

    def _reserve_nodes(self, extra):
        meta = self._meta
        cap = self._count.shape[0]
        if cap - meta[K.NODE_HW] + meta[K.NODE_FREE] >= extra:
            return
        new = max(2 * cap, int(meta[K.NODE_HW]) + extra + 16)

        def grow(a, fill):
            b = np.full((new,) + a.shape[1:], fill, dtype=a.dtype)
            b[:cap] = a
            return b

        self._child = grow(self._child, 0)
        self._box = grow(self._box, 0.0)
        self._count = grow(self._count, 0)
        self._level = grow(self._level, -1)
        self._parent = grow(self._parent, -1)
        self._nfree = grow(self._nfree, 0)
        self._pack()

    def _new_entry(self, x, y, handle, fp):
        if self._free_entries:
            e = self._free_entries.pop()
        else:
            e = self._entry_hw
            if e == self._ehandle.shape[0]:
                cap = 2 * e

                def grow(a, fill):
                    b = np.full((cap,) + a.shape[1:], fill, dtype=a.dtype)
                    b[:e] = a
                    return b

                self._ekey = grow(self._ekey, 0.0)
                self._ehandle = grow(self._ehandle, -1)
                self._efp = grow(self._efp, 0.0)
                self._pack()
            self._entry_hw += 1
        self._ekey[e, 0] = x
        self._ekey[e, 1] = y
        self._ehandle[e] = handle
        self._efp[e] = fp
        return e

    def _link(self, e):
        root = self._meta[K.ROOT]
        self._reserve_nodes(int(self._level[root]) + 2)
        K.insert_entry(self._T, e, self.m)

    # ------------------------------------------------------------- properties

    def __len__(self) -> int:
        return int(self._meta[K.SIZE])

    @property
    def size(self) -> int:
        return len(self)

    @property
    def height(self) -> int:
        """Number of levels, counting the leaves; 1 for an empty or single-leaf tree."""
        return int(self._level[self._meta[K.ROOT]]) + 1

    @property
    def max_half_extent(self) -> tuple[float, float]:
        return (self._half_x, self._half_y)

    def bounds(self) -> Rect | None:
        """MBR of all keys, or None for an empty tree."""
        if len(self) == 0:
            return None
        x0, y0, x1, y1 = K.node_mbr(self._box, self._count, self._meta[K.ROOT])
        return Rect.from_bounds(x0, y0, x1, y1)

    def _entry(self, e) -> Entry:
        return Entry(Point(float(self._ekey[e, 0]), float(self._ekey[e, 1])), int(self._ehandle[e]))

    def _entries(self, ids) -> list[Entry]:
        keys = self._ekey[ids].tolist()
        handles = self._ehandle[ids].tolist()
        return [Entry(Point(x, y), h) for (x, y), h in zip(keys, handles)]

    def __iter__(self) -> Iterator[Entry]:
        """All entries, depth first in slot order."""
        for leaf in self._leaves():
            for s in range(self._count[leaf]):
                yield self._entry(self._child[leaf, s])

    def _leaves(self):
        stack = [int(self._meta[K.ROOT])]
        while stack:
            n = stack.pop()
            if self._level[n] == 0:
                yield n
            else:
                stack.extend(int(c) for c in self._child[n, : self._count[n]][::-1])

    def leaf_order(self) -> np.ndarray:
        """Handles of all entries, leaf by leaf in depth-first order."""
        parts = [self._ehandle[self._child[leaf, : self._count[leaf]]] for leaf in self._leaves()]
        return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)

    # -------------------------------------------------------------- mutation

    def insert(self, key: Point, handle: int, footprint: Rect | None = None) -> None:
        """Add ``(key, handle)``; ``footprint`` defaults to the degenerate rect at ``key``."""
        x, y = float(key.x), float(key.y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError("key must be finite")
        if footprint is None:
            fp = (x, y, x, y)
        else:
            fp = footprint.bounds
            self._half_x = max(self._half_x, x - fp[0], fp[2] - x)
            self._half_y = max(self._half_y, y - fp[1], fp[3] - y)
        e = self._new_entry(x, y, int(handle), fp)
        self._link(e)

    def remove(self, key: Point, handle: int) -> None:
        """Remove the entry matching both ``key`` and ``handle``.

        Underfull nodes on the path are dissolved and their entries reinserted
        from the top.
        """
        leaf, slot = K.find_entry(self._T, float(key.x), float(key.y), int(handle))
        if leaf < 0:
            raise EntryNotFound(f"no entry {handle} at ({key.x}, {key.y})")
        e, orphans = K.remove_slot(self._T, leaf, slot, self.m)
        self._ehandle[e] = -1
        self._free_entries.append(int(e))
        for o in orphans:
            self._link(int(o))
        K.shorten_root(self._T)

    def clear(self) -> None:
        self.__init__(self.M, self.m)

    # --------------------------------------------------------------- queries

    def query_radius(self, center: Point, radius: float) -> tuple[list[Entry], QueryStats]:
        """Entries with ``dist(key, center) <= radius``."""
        if radius < 0:
            raise ValueError("radius must be >= 0")
        ids, st = K.query_radius(self._T, float(center.x), float(center.y), float(radius))
        return self._entries(ids), QueryStats._from(st)

    def query_knn(self, center: Point, k: int) -> list[Entry]:
        """The ``k`` nearest entries, nearest first; ties go to the smaller handle."""
        return self.query_knn_stats(center, k)[0]

    def query_knn_stats(self, center: Point, k: int) -> tuple[list[Entry], QueryStats]:
        if k < 1:
            raise ValueError("k must be >= 1")
        ids, st = K.query_knn(self._T, float(center.x), float(center.y), int(k))
        return self._entries(ids), QueryStats._from(st)

    def query_triangle(self, t: Triangle) -> tuple[list[Entry], QueryStats]:
        """Entries whose key lies inside or on ``t``."""
        ids, st = K.query_triangle(self._T, *map(float, t.coords), PRUNE_EPS)
        return self._entries(ids), QueryStats._from(st)

    def query_segment(self, s: Segment) -> list[Entry]:
        """Entries whose footprint rectangle touches ``s``."""
        ids, _ = K.query_segment(
            self._T, float(s.p.x), float(s.p.y), float(s.q.x), float(s.q.y),
            self._half_x + PRUNE_EPS, self._half_y + PRUNE_EPS,
        )
        return self._entries(ids)

    def footprint(self, key: Point, handle: int) -> Rect:
        leaf, slot = K.find_entry(self._T, float(key.x), float(key.y), int(handle))
        if leaf < 0:
            raise EntryNotFound(f"no entry {handle} at ({key.x}, {key.y})")
        return Rect.from_bounds(*self._efp[self._child[leaf, slot]].tolist())

    # ---------------------------------------------------------- diagnostics

    def structure(self):
        """Nested tuple of the tree shape: leaves as handle tuples. Used for
        determinism checks."""

        def walk(n):
            c = self._child[n, : self._count[n]]
            if self._level[n] == 0:
                return tuple(int(self._ehandle[e]) for e in c)
            return tuple(walk(int(x)) for x in c)

        return walk(int(self._meta[K.ROOT]))

    def validate(self) -> list[str]:
        """Describe every broken structural invariant; empty when the tree is sound."""
        problems: list[str] = []
        root = int(self._meta[K.ROOT])
        if self._parent[root] != -1:
            problems.append(f"root {root}: has parent {self._parent[root]}")
        root_level = int(self._level[root])
        if root_level < 0:
            return problems + [f"root {root}: node is freed"]
        if root_level > 0 and self._count[root] < 2:
            problems.append(f"root {root}: internal root has {self._count[root]} children")
        if self._count[root] > self.M:
            problems.append(f"root {root}: {self._count[root]} > M={self.M} children")

        seen_entries = 0
        seen_nodes = 0
        leaf_depths = set()
        stack = [(root, 0)]
        while stack:
            n, depth = stack.pop()
            seen_nodes += 1
            c = int(self._count[n])
            lvl = int(self._level[n])
            if n != root and not (self.m <= c <= self.M):
                problems.append(f"node {n}: {c} children outside [{self.m}, {self.M}]")
            if lvl != root_level - depth:
                problems.append(f"node {n}: level {lvl} at depth {depth}")
            if lvl == 0:
                leaf_depths.add(depth)
                for s in range(c):
                    e = int(self._child[n, s])
                    x, y = self._ekey[e]
                    if tuple(self._box[n, s]) != (x, y, x, y):
                        problems.append(f"leaf {n} slot {s}: box does not match key of entry {e}")
                    seen_entries += 1
                continue
            for s in range(c):
                ch = int(self._child[n, s])
                if self._parent[ch] != n:
                    problems.append(f"node {ch}: parent {self._parent[ch]} != {n}")
                if self._level[ch] < 0:
                    problems.append(f"node {n} slot {s}: points at freed node {ch}")
                    continue
                if self._count[ch] > 0:
                    tight = K.node_mbr(self._box, self._count, ch)
                    if tuple(self._box[n, s]) != tuple(tight):
                        problems.append(f"node {n} slot {s}: MBR of child {ch} not tight")
                stack.append((ch, depth + 1))
        if len(leaf_depths) > 1:
            problems.append(f"leaves at unequal depths {sorted(leaf_depths)}")
        if seen_entries != len(self):
            problems.append(f"size {len(self)} but {seen_entries} reachable entries")
        live = int(self._meta[K.NODE_HW] - self._meta[K.NODE_FREE])
        if live != seen_nodes:
            problems.append(f"{live} allocated nodes but {seen_nodes} reachable")
        return problems
