"""Heterogeneous network elements indexed on one R-tree.

Every element, whether a macro BS, small BS, UE or blockage, is a ``NetNode``
and goes into the same ``Container`` tree under its location. Queries return
tree entries; ``Container.resolve`` turns them back into nodes, optionally
keeping only one kind.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .geometry import Point, Rect, Segment
from .radio.antenna import AntennaPattern
from .rtree import Entry, QueryStats, RTree

__all__ = ["NodeKind", "TrxParams", "NetNode", "Container", "DuplicateNode", "UnknownNode"]


class NodeKind(str, enum.Enum):
    MACRO_BS = "MacroBS"
    SMALL_BS = "SmallBS"
    UE = "UE"
    BLOCKAGE = "Blockage"


class DuplicateNode(ValueError):
    pass


class UnknownNode(KeyError):
    pass


@dataclass(frozen=True)
class TrxParams:
    """Transceiver payload carried by every non-blockage node.

    Units: ``carrier_freq`` Hz, ``tx_power`` dBm, ``boresight`` radians,
    ``max_range`` meters.
    """

    carrier_freq: float
    tx_power: float
    antenna: AntennaPattern
    boresight: float = 0.0
    max_range: float = 200.0

    def __post_init__(self):
        if not self.carrier_freq > 0:
            raise ValueError("carrier_freq must be > 0")
        if not self.max_range > 0:
            raise ValueError("max_range must be > 0")
        if not math.isfinite(self.boresight):
            raise ValueError("boresight must be finite")


@dataclass(frozen=True)
class NetNode:
    """One network element.

    ``width`` and ``length`` are the footprint extents along x and y; the
    footprint rectangle is centered on ``loc``. ``height`` is kept as metadata
    only, all queries are planar.
    """

    id: int
    kind: NodeKind
    loc: Point
    width: float = 0.0
    length: float = 0.0
    height: float = 0.0
    trx: TrxParams | None = None

    def __post_init__(self):
        if isinstance(self.kind, str) and not isinstance(self.kind, NodeKind):
            object.__setattr__(self, "kind", NodeKind(self.kind))
        if not isinstance(self.id, (int, np.integer)) or self.id < 0:
            raise ValueError(f"node id must be a non-negative integer, got {self.id!r}")
        if min(self.width, self.length, self.height) < 0:
            raise ValueError(f"node {self.id}: negative footprint dimension")
        if (self.kind is NodeKind.BLOCKAGE) != (self.trx is None):
            need = "must not" if self.kind is NodeKind.BLOCKAGE else "must"
            raise ValueError(f"node {self.id}: {self.kind.value} {need} carry transceiver params")

    @property
    def footprint(self) -> Rect:
        return Rect.around(self.loc, self.width, self.length)


class Container:
    """Registry of nodes plus the single R-tree that indexes all of them.

    Parameters
    ----------
    max_entries : int
        Fanout ``M`` of the underlying tree.
    """

    def __init__(self, max_entries: int = 16):
        self.registry: dict[int, NetNode] = {}
        self.tree = RTree(max_entries)
        self._cols = None

    def __len__(self) -> int:
        return len(self.registry)

    def __contains__(self, node_id) -> bool:
        return node_id in self.registry

    def __iter__(self) -> Iterator[NetNode]:
        return iter(self.registry.values())

    def __getitem__(self, node_id) -> NetNode:
        try:
            return self.registry[node_id]
        except KeyError:
            raise UnknownNode(node_id) from None

    def nodes(self, kind: NodeKind | None = None) -> list[NetNode]:
        return [n for n in self.registry.values() if kind is None or n.kind is kind]

    def count(self, kind: NodeKind) -> int:
        return sum(1 for n in self.registry.values() if n.kind is kind)

    @property
    def has_blockages(self) -> bool:
        return any(n.kind is NodeKind.BLOCKAGE for n in self.registry.values())

    # -------------------------------------------------------------- mutation

    def add_node(self, node: NetNode) -> None:
        if node.id in self.registry:
            raise DuplicateNode(f"duplicate node id {node.id}")
        fp = node.footprint if (node.width or node.length) else None
        self.tree.insert(node.loc, node.id, fp)
        self.registry[node.id] = node
        self._cols = None

    def add_nodes(self, nodes: Iterable[NetNode]) -> None:
        for n in nodes:
            self.add_node(n)

    def remove_node(self, node_id: int) -> NetNode:
        node = self[node_id]
        self.tree.remove(node.loc, node.id)
        del self.registry[node_id]
        self._cols = None
        return node

    def move_node(self, node_id: int, new_loc: Point) -> NetNode:
        node = self.remove_node(node_id)
        moved = dataclasses.replace(node, loc=new_loc)
        self.add_node(moved)
        return moved

    def replace_trx(self, node_id: int, trx: TrxParams) -> NetNode:
        """Swap a node's transceiver parameters; the tree entry is untouched."""
        node = self[node_id]
        new = dataclasses.replace(node, trx=trx)
        self.registry[node_id] = new
        self._cols = None
        return new

    # --------------------------------------------------------------- queries

    def resolve(self, entries: Iterable[Entry], kind: NodeKind | None = None) -> list[NetNode]:
        """Nodes behind ``entries``, in order, keeping only ``kind`` if given."""
        out = []
        for e in entries:
            node = self.registry.get(e.handle)
            if node is None:
                raise RuntimeError(f"tree entry {e.handle} has no registry node")
            if kind is None or node.kind is kind:
                out.append(node)
        return out

    def query_radius(self, center: Point, radius: float) -> tuple[list[Entry], QueryStats]:
        return self.tree.query_radius(center, radius)

    def neighbors_within(self, node_id: int, radius: float, kind: NodeKind | None = None) -> list[NetNode]:
        """Nodes within ``radius`` of ``node_id``, excluding the node itself."""
        me = self[node_id]
        entries, _ = self.tree.query_radius(me.loc, radius)
        return [n for n in self.resolve(entries, kind) if n.id != node_id]

    def los_clear(self, a: Point, b: Point) -> bool:
        """True when no blockage footprint touches the segment a -> b."""
        if a == b:
            raise ValueError("los_clear needs two distinct points")
        hits = self.tree.query_segment(Segment(a, b))
        return not any(n.kind is NodeKind.BLOCKAGE for n in self.resolve(hits))

    # ---------------------------------------------------------- diagnostics

    def validate(self) -> list[str]:
        problems = self.tree.validate()
        if len(self.tree) != len(self.registry):
            problems.append(f"tree holds {len(self.tree)} entries, registry {len(self.registry)}")
        seen: dict[int, int] = {}
        for e in self.tree:
            seen[e.handle] = seen.get(e.handle, 0) + 1
            node = self.registry.get(e.handle)
            if node is None:
                problems.append(f"tree entry {e.handle} has no registry node")
            elif node.loc != e.key:
                problems.append(f"node {e.handle}: tree key {e.key} != location {node.loc}")
        for nid in self.registry:
            if seen.get(nid, 0) != 1:
                problems.append(f"node {nid}: {seen.get(nid, 0)} tree entries")
        return problems

    # --------------------------------------------------------------- columns

    def columns(self) -> "Columns":
        """Column snapshot of the nodes for the compiled link kernels; cached
        until the next mutation."""
        if self._cols is None:
            self._cols = Columns.build(self.registry.values(), self.tree.leaf_order())
        return self._cols


@dataclass
class Columns:
    """Struct-of-arrays view of a node set.

    ``all_*`` cover every node in id order (the array-indexing store). The
    remaining arrays cover small BSs only, in ``order`` (the container passes
    its tree's leaf order, which keeps spatial neighbours close in memory).
    ``col_of[h]`` is the small-BS column of handle ``h`` or -1, and
    ``by_id`` lists the columns in ascending id order.
    """

    all_id: np.ndarray
    all_x: np.ndarray
    all_y: np.ndarray
    sbs_id: np.ndarray
    x: np.ndarray
    y: np.ndarray
    boresight: np.ndarray
    beamwidth: np.ndarray
    max_range: np.ndarray
    tx_power: np.ndarray
    gmax_db: np.ndarray
    gmin_db: np.ndarray
    col_of: np.ndarray
    by_id: np.ndarray
    blocker: np.ndarray
    blockage_fp: np.ndarray

    @property
    def n_sbs(self) -> int:
        return self.sbs_id.shape[0]

    @classmethod
    def build(cls, nodes: Iterable[NetNode], order: Iterable[int] | None = None) -> "Columns":
        nodes = sorted(nodes, key=lambda n: n.id)
        if order is None:
            sbs = [n for n in nodes if n.kind is NodeKind.SMALL_BS]
        else:
            by = {n.id: n for n in nodes}
            sbs = [by[h] for h in order if by[h].kind is NodeKind.SMALL_BS]
        blk = [n for n in nodes if n.kind is NodeKind.BLOCKAGE]
        size = (nodes[-1].id + 1) if nodes else 0
        col_of = np.full(size, -1, dtype=np.int64)
        for i, n in enumerate(sbs):
            col_of[n.id] = i
        blocker = np.zeros(size, dtype=np.bool_)
        for n in blk:
            blocker[n.id] = True

        def arr(vals, dtype=np.float64):
            return np.array(list(vals), dtype=dtype)

        return cls(
            all_id=arr((n.id for n in nodes), np.int64),
            all_x=arr(n.loc.x for n in nodes),
            all_y=arr(n.loc.y for n in nodes),
            sbs_id=arr((n.id for n in sbs), np.int64),
            x=arr(n.loc.x for n in sbs),
            y=arr(n.loc.y for n in sbs),
            boresight=arr(n.trx.boresight for n in sbs),
            beamwidth=arr(n.trx.antenna.beamwidth for n in sbs),
            max_range=arr(n.trx.max_range for n in sbs),
            tx_power=arr(n.trx.tx_power for n in sbs),
            gmax_db=arr(10.0 * math.log10(n.trx.antenna.g_max) for n in sbs),
            gmin_db=arr(10.0 * math.log10(n.trx.antenna.g_min) for n in sbs),
            col_of=col_of,
            by_id=np.argsort(arr((n.id for n in sbs), np.int64), kind="stable"),
            blocker=blocker,
            blockage_fp=np.array([n.footprint.bounds for n in blk], dtype=np.float64).reshape(-1, 4),
        )
