"""Link budgets, sector polygons and all-links SNR/SINR.

Two methods compute the same link tables:

``array``
    nodes sit in an unordered store; every location search scans all of them.
``spatial``
    location searches go through the container's R-tree.

Both run compiled loops and share the per-link budget code, so they agree
bit for bit and differ only in how many candidates they look at.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from ..geometry import Point, Triangle, dist
from ..rtree import PRUNE_EPS, QueryStats
from .. import _kernels as TK
from . import _kernels as LK

__all__ = [
    "ChannelParams",
    "LinkMetric",
    "LinkTable",
    "METHODS",
    "pathloss_db",
    "fspl_db",
    "sector_triangle",
    "in_main_lobe",
    "directional_neighbors",
    "aim_at_nearest",
    "snr_all_links",
    "sinr_all_links",
]

SPEED_OF_LIGHT = 299_792_458.0
METHODS = ("array", "spatial")

# outward slack of the sector triangle; see sector_triangle
ANGLE_MARGIN = 1e-9
REACH_MARGIN = 1e-9


def fspl_db(d: float, freq: float) -> float:
    """Free-space path loss at distance ``d`` (m) and frequency ``freq`` (Hz)."""
    return 20.0 * math.log10(4.0 * math.pi * d * freq / SPEED_OF_LIGHT)


def noise_dbm(bandwidth: float, noise_figure: float) -> float:
    return -174.0 + 10.0 * math.log10(bandwidth) + noise_figure


@dataclass(frozen=True)
class ChannelParams:
    """Log-distance path loss with an additive NLOS penalty.

    Defaults: 28 GHz free-space reference loss at 1 m, exponent 2, thermal
    noise over 100 MHz with a 7 dB noise figure.
    """

    pathloss_exponent: float = 2.0
    reference_distance: float = 1.0
    reference_loss: float = fspl_db(1.0, 28e9)
    noise_power: float = noise_dbm(100e6, 7.0)
    nlos_penalty: float = 20.0

    def __post_init__(self):
        if not self.pathloss_exponent > 0:
            raise ValueError("pathloss_exponent must be > 0")
        if not self.reference_distance > 0:
            raise ValueError("reference_distance must be > 0")
        if not math.isfinite(self.noise_power) or not math.isfinite(self.reference_loss):
            raise ValueError("reference_loss and noise_power must be finite")

    @classmethod
    def from_radio(
        cls,
        carrier_freq: float = 28e9,
        bandwidth: float = 100e6,
        noise_figure: float = 7.0,
        pathloss_exponent: float = 2.0,
        reference_distance: float = 1.0,
        nlos_penalty: float = 20.0,
    ) -> "ChannelParams":
        return cls(
            pathloss_exponent=pathloss_exponent,
            reference_distance=reference_distance,
            reference_loss=fspl_db(reference_distance, carrier_freq),
            noise_power=noise_dbm(bandwidth, noise_figure),
            nlos_penalty=nlos_penalty,
        )

    @property
    def noise_mw(self) -> float:
        return 10.0 ** (self.noise_power / 10.0)


def pathloss_db(ch: ChannelParams, d: float, los: bool = True) -> float:
    """Path loss in dB; distances at or below d0 get the reference loss."""
    if d < 0:
        raise ValueError("distance must be >= 0")
    pl = ch.reference_loss
    if d > ch.reference_distance:
        pl += 10.0 * ch.pathloss_exponent * math.log10(d / ch.reference_distance)
    if not los:
        pl += ch.nlos_penalty
    return pl


# --------------------------------------------------------------------------
# sectors


def in_main_lobe(origin: Point, boresight: float, beamwidth: float, target: Point) -> bool:
    """Whether ``target`` is within half the beamwidth of the boresight ray.

    Evaluated as a dot-product test, the same form the compiled kernels use,
    so Python-side and kernel-side decisions agree. A target coincident with
    the origin counts as in the lobe.
    """
    dx = target.x - origin.x
    dy = target.y - origin.y
    d = math.sqrt(dx * dx + dy * dy)
    return dx * math.cos(boresight) + dy * math.sin(boresight) >= math.cos(0.5 * beamwidth) * d


def sector_triangle(origin: Point, boresight: float, beamwidth: float, r_max: float) -> Triangle | None:
    """Triangle circumscribing the circular sector of radius ``r_max``.

    The apex sits at ``origin`` and the legs run along boresight +- half the
    beamwidth with length ``r_max / cos(beamwidth / 2)``, so the far edge is
    tangent to the arc. Returns ``None`` for ``beamwidth >= pi``, where no
    triangle can cover the sector; callers then fall back to a radius query
    and an angle filter.

    The construction is widened by a hair (angle, reach, and an apex pulled
    back along -boresight) so rounding in the membership test can never drop
    a point of the exact sector.
    """
    if not beamwidth > 0:
        raise ValueError("beamwidth must be > 0")
    if not r_max > 0:
        raise ValueError("r_max must be > 0")
    half = 0.5 * beamwidth + ANGLE_MARGIN
    if beamwidth >= math.pi or half >= 0.5 * math.pi:
        return None
    ux, uy = math.cos(boresight), math.sin(boresight)
    pull = REACH_MARGIN * max(1.0, abs(origin.x), abs(origin.y), r_max)
    ax = origin.x - pull * ux
    ay = origin.y - pull * uy
    leg = (r_max * (1.0 + REACH_MARGIN) + 2.0 * pull) / math.cos(half)
    b = Point(ax + leg * math.cos(boresight + half), ay + leg * math.sin(boresight + half))
    c = Point(ax + leg * math.cos(boresight - half), ay + leg * math.sin(boresight - half))
    return Triangle(Point(ax, ay), b, c)


def _sector_arrays(cols):
    """Vectorized sector_triangle over every SBS column."""
    n = cols.n_sbs
    tri = np.zeros((n, 6))
    half = 0.5 * cols.beamwidth + ANGLE_MARGIN
    ok = (cols.beamwidth < math.pi) & (half < 0.5 * math.pi)
    ux, uy = np.cos(cols.boresight), np.sin(cols.boresight)
    pull = REACH_MARGIN * np.maximum.reduce([np.ones(n), np.abs(cols.x), np.abs(cols.y), cols.max_range])
    ax = cols.x - pull * ux
    ay = cols.y - pull * uy
    with np.errstate(divide="ignore", invalid="ignore"):
        leg = np.where(ok, (cols.max_range * (1.0 + REACH_MARGIN) + 2.0 * pull) / np.cos(np.where(ok, half, 0.0)), 0.0)
    tri[:, 0] = ax
    tri[:, 1] = ay
    tri[:, 2] = ax + leg * np.cos(cols.boresight + half)
    tri[:, 3] = ay + leg * np.sin(cols.boresight + half)
    tri[:, 4] = ax + leg * np.cos(cols.boresight - half)
    tri[:, 5] = ay + leg * np.sin(cols.boresight - half)
    return tri, ok


def directional_neighbors(c, tx_id: int, exact: bool = True):
    """Nodes in the main-lobe sector of ``tx_id`` (excluding itself).

    With ``exact=False`` this is the raw triangle query, which may include a
    sliver of points beyond the range arc. Wide beams (>= pi) use a radius
    query instead of the triangle, and are always refined.
    """
    tx = c[tx_id]
    if tx.trx is None:
        raise ValueError(f"node {tx_id} has no transceiver")
    trx = tx.trx
    tri = sector_triangle(tx.loc, trx.boresight, trx.antenna.beamwidth, trx.max_range)
    if tri is None:
        entries, _ = c.tree.query_radius(tx.loc, trx.max_range)
        exact = True
    else:
        entries, _ = c.tree.query_triangle(tri)
    out = []
    for n in c.resolve(entries):
        if n.id == tx_id:
            continue
        if exact and not (
            dist(tx.loc, n.loc) <= trx.max_range
            and in_main_lobe(tx.loc, trx.boresight, trx.antenna.beamwidth, n.loc)
        ):
            continue
        out.append(n)
    return out


def aim_at_nearest(c) -> None:
    """Point every small BS at its nearest other small BS (ties by id).

    An SBS with no other SBS keeps its boresight.
    """
    from ..network import NodeKind  # deferred: network imports this package

    cols = c.columns()
    col_of = cols.col_of
    T = c.tree._T
    ehandle = T[7]
    size = len(c.tree)
    updates = {}
    for node in c.nodes(NodeKind.SMALL_BS):
        k = 2
        target = None
        while target is None:
            ids, _ = TK.query_knn(T, node.loc.x, node.loc.y, min(k, size))
            for e in ids:
                h = ehandle[e]
                if h != node.id and h < col_of.shape[0] and col_of[h] >= 0:
                    target = h
                    break
            if target is None and k >= size:
                break
            k *= 4
        if target is not None:
            t = c[target].loc
            updates[node.id] = math.atan2(t.y - node.loc.y, t.x - node.loc.x)
    for nid, bore in updates.items():
        c.replace_trx(nid, dataclasses.replace(c[nid].trx, boresight=bore))


# --------------------------------------------------------------------------
# link tables


class LinkMetric(NamedTuple):
    tx_id: int
    rx_id: int
    distance: float
    snr: float
    sinr: float | None
    interferer_ids: tuple[int, ...]


class LinkTable(Sequence):
    """Column store of directed SBS links; indexing yields ``LinkMetric``.

    Rows come in whatever order the computing method produced them; use
    :meth:`sorted` for (tx_id, rx_id) order. ``sinr`` is ``None`` for SNR-only
    tables. ``stats`` aggregates tree visits (zero for the array method).
    """

    def __init__(self, tx, rx, distance, snr, sinr=None, interference_mw=None,
                 int_offsets=None, int_ids=None, stats=None, method=""):
        self.tx = tx
        self.rx = rx
        self.distance = distance
        self.snr = snr
        self.sinr = sinr
        self.interference_mw = interference_mw
        self.int_offsets = int_offsets
        self.int_ids = int_ids
        self.stats = stats or QueryStats()
        self.method = method

    def __len__(self) -> int:
        return int(self.tx.shape[0])

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        if i < 0:
            i += len(self)
        if not 0 <= i < len(self):
            raise IndexError(i)
        if self.sinr is None:
            sinr, ints = None, ()
        else:
            sinr = float(self.sinr[i])
            ints = tuple(int(v) for v in self.int_ids[self.int_offsets[i]:self.int_offsets[i + 1]])
        return LinkMetric(int(self.tx[i]), int(self.rx[i]), float(self.distance[i]), float(self.snr[i]), sinr, ints)

    def __iter__(self) -> Iterator[LinkMetric]:
        for i in range(len(self)):
            yield self[i]

    @property
    def num_interferers(self) -> np.ndarray | None:
        return None if self.int_offsets is None else np.diff(self.int_offsets)

    def sorted(self) -> "LinkTable":
        order = np.lexsort((self.rx, self.tx))
        if self.sinr is None:
            return LinkTable(self.tx[order], self.rx[order], self.distance[order], self.snr[order],
                             stats=self.stats, method=self.method)
        counts = np.diff(self.int_offsets)[order]
        offs = np.zeros(len(order) + 1, dtype=np.int64)
        np.cumsum(counts, out=offs[1:])
        if len(self.int_ids):
            idx = np.concatenate([np.arange(self.int_offsets[i], self.int_offsets[i + 1]) for i in order])
            ids = self.int_ids[idx.astype(np.int64)]
        else:
            ids = self.int_ids[:0]
        return LinkTable(self.tx[order], self.rx[order], self.distance[order], self.snr[order],
                         self.sinr[order], self.interference_mw[order], offs, ids, self.stats, self.method)

    def equals(self, other: "LinkTable") -> bool:
        """Same link set with bit-identical values and interferer lists."""
        a, b = self.sorted(), other.sorted()
        if len(a) != len(b):
            return False
        same = (
            np.array_equal(a.tx, b.tx)
            and np.array_equal(a.rx, b.rx)
            and np.array_equal(a.distance, b.distance)
            and np.array_equal(a.snr, b.snr)
        )
        if not same or (a.sinr is None) != (b.sinr is None):
            return False
        if a.sinr is None:
            return True
        return (
            np.array_equal(a.sinr, b.sinr)
            and np.array_equal(a.interference_mw, b.interference_mw)
            and np.array_equal(a.int_offsets, b.int_offsets)
            and np.array_equal(a.int_ids, b.int_ids)
        )

    def diff(self, other: "LinkTable", rel_tol: float = 0.0) -> list[str]:
        """Human-readable differences, for reporting when ``equals`` fails."""
        a = {(m.tx_id, m.rx_id): m for m in self.sorted()}
        b = {(m.tx_id, m.rx_id): m for m in other.sorted()}
        out = []
        for key in sorted(a.keys() ^ b.keys()):
            out.append(f"link {key} only in {'first' if key in a else 'second'}")
        for key in sorted(a.keys() & b.keys()):
            x, y = a[key], b[key]
            if x.interferer_ids != y.interferer_ids:
                out.append(f"link {key}: interferers {x.interferer_ids} vs {y.interferer_ids}")
            for name in ("distance", "snr", "sinr"):
                u, v = getattr(x, name), getattr(y, name)
                if u != v and not (u is not None and v is not None and math.isclose(u, v, rel_tol=rel_tol, abs_tol=0)):
                    out.append(f"link {key}: {name} {u!r} vs {v!r}")
        return out

    def to_csv(self, path) -> None:
        """``tx_id,rx_id,distance_m,snr_db,sinr_db,num_interferers`` in (tx, rx) order.
        The last two columns stay empty for SNR-only tables."""
        t = self.sorted()
        nint = t.num_interferers
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["tx_id", "rx_id", "distance_m", "snr_db", "sinr_db", "num_interferers"])
            for i in range(len(t)):
                sinr = "" if t.sinr is None else repr(float(t.sinr[i]))
                ni = "" if nint is None else int(nint[i])
                w.writerow([int(t.tx[i]), int(t.rx[i]), repr(float(t.distance[i])), repr(float(t.snr[i])), sinr, ni])


# --------------------------------------------------------------------------
# all-links computations


def _check_method(method: str) -> None:
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")


def _packed(cols):
    P = np.empty((cols.n_sbs, LK.NPACK))
    P[:, LK.PX] = cols.x
    P[:, LK.PY] = cols.y
    P[:, LK.PUX] = np.cos(cols.boresight)
    P[:, LK.PUY] = np.sin(cols.boresight)
    P[:, LK.PCOS] = np.cos(0.5 * cols.beamwidth)
    P[:, LK.PGMAX] = cols.gmax_db
    P[:, LK.PGMIN] = cols.gmin_db
    P[:, LK.PPTX] = cols.tx_power
    return P


def _links(c, cols, method):
    """Column pairs (t, r) with dist <= range of t, plus LOS flags (empty when
    the scenario has no blockages) and tree stats."""
    stats = np.zeros(3, dtype=np.int64)
    if method == "spatial":
        qr = np.full(cols.col_of.shape[0], -1.0)
        qr[cols.sbs_id] = cols.max_range
        sh, dh, st = TK.self_join_radius(c.tree._T, qr)
        stats += st
    else:
        sh, dh = TK.scan_radius(cols.all_x, cols.all_y, cols.all_id, cols.x, cols.y, cols.max_range, cols.sbs_id)
    src, dst = LK.map_pairs(sh, dh, cols.col_of)
    los = np.empty(0, dtype=np.bool_)
    if cols.blockage_fp.shape[0]:
        ax, ay, bx, by = cols.x[src], cols.y[src], cols.x[dst], cols.y[dst]
        if method == "spatial":
            hx, hy = c.tree.max_half_extent
            blocked, st = TK.blocked_batch(c.tree._T, ax, ay, bx, by, hx + PRUNE_EPS, hy + PRUNE_EPS, cols.blocker)
            stats += st
        else:
            blocked = TK.scan_blocked(ax, ay, bx, by, cols.blockage_fp)
        los = ~blocked
    return src, dst, los, stats


def _budget(ch, src, dst, los, P, linear):
    return LK.link_budget(
        src, dst, los, P, ch.reference_loss, 10.0 * ch.pathloss_exponent, ch.reference_distance, ch.nlos_penalty,
        linear,
    )


def snr_all_links(c, ch: ChannelParams | None = None, method: str = "spatial") -> LinkTable:
    """SNR of every directed SBS pair within the transmitter's range."""
    _check_method(method)
    ch = ch or ChannelParams()
    cols = c.columns()
    src, dst, los, stats = _links(c, cols, method)
    d, dbm, _ = _budget(ch, src, dst, los, _packed(cols), False)
    return LinkTable(cols.sbs_id[src], cols.sbs_id[dst], d, dbm - ch.noise_power,
                     stats=QueryStats._from(stats), method=method)


def sinr_all_links(c, ch: ChannelParams | None = None, method: str = "spatial") -> LinkTable:
    """SINR of every link, every other SBS transmitting on its boresight.

    Transmitter k interferes at receiver r when r lies in k's main-lobe
    sector and within k's range. The spatial method finds those pairs among
    the links already found by the radius stage, filtered through each
    transmitter's sector triangle; the array method rescans every
    transmitter for every link.
    """
    _check_method(method)
    ch = ch or ChannelParams()
    cols = c.columns()
    src, dst, los, stats = _links(c, cols, method)
    P = _packed(cols)
    d, dbm, mw = _budget(ch, src, dst, los, P, True)
    snr = dbm - ch.noise_power
    if method == "spatial":
        tri, has_tri = _sector_arrays(cols)
        covered = LK.covered_links(src, dst, P, tri, has_tri)
        sinr, imw, offs, ids = LK.sinr_spatial(src, dst, mw, covered, snr, ch.noise_mw, cols.sbs_id)
    else:
        sinr, imw, offs, ids = LK.sinr_array(
            src, dst, snr, P, cols.max_range, cols.by_id, ch.reference_loss, 10.0 * ch.pathloss_exponent, ch.reference_distance, ch.nlos_penalty,
            cols.blockage_fp, ch.noise_mw,
        )
    return LinkTable(cols.sbs_id[src], cols.sbs_id[dst], d, snr, sinr, imw, offs, cols.sbs_id[ids],
                     QueryStats._from(stats), method)
