"""Seeded deployments and their JSON forms.

Small BSs are a fixed-count uniform (binomial) process over a rectangle:
``n_sbs = round(density * area_km2)``. Macro BSs, UEs and blockages are
optional fixed counts drawn from the same generator afterwards, so adding
them never moves the SBSs.

Config JSON uses the field names of :class:`ScenarioConfig` with SI units,
except that angles are given in degrees (``beamwidth_deg``). Scenario JSON
stores angles in radians so that a save/load roundtrip is exact.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import Point
from .network import Container, NetNode, NodeKind, TrxParams
from .radio import AntennaPattern, ChannelParams, aim_at_nearest

__all__ = ["ScenarioConfig", "Scenario", "generate", "save", "load", "load_config", "DEFAULT_DENSITY"]

DEFAULT_DENSITY = 100.0  # SBS per km^2
FORMAT = "hetindex-scenario"
VERSION = 1


@dataclass(frozen=True)
class ScenarioConfig:
    area_width: float = 1000.0
    area_height: float = 1000.0
    sbs_density: float = DEFAULT_DENSITY
    ue_count: int = 0
    mbs_count: int = 0
    blockage_count: int = 0
    blockage_dims: tuple[float, float] = (20.0, 10.0)
    seed: int = 0
    carrier_freq: float = 28e9
    tx_power: float = 30.0
    beamwidth: float = math.radians(30.0)
    g_max: float = 10.0
    max_range: float = 200.0
    mbs_tx_power: float = 46.0
    ue_tx_power: float = 23.0
    pathloss_exponent: float = 2.0
    reference_distance: float = 1.0
    bandwidth: float = 100e6
    noise_figure: float = 7.0
    nlos_penalty: float = 20.0
    rtree_M: int = 16
    aim: bool = True

    def __post_init__(self):
        if not (self.area_width > 0 and self.area_height > 0):
            raise ValueError("area dimensions must be > 0")
        if not self.sbs_density >= 0:
            raise ValueError("sbs_density must be >= 0")
        for name in ("ue_count", "mbs_count", "blockage_count"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if len(self.blockage_dims) != 2 or min(self.blockage_dims) < 0:
            raise ValueError("blockage_dims must be two non-negative numbers")
        object.__setattr__(self, "blockage_dims", tuple(float(v) for v in self.blockage_dims))

    @classmethod
    def for_n(cls, n: int, density: float = DEFAULT_DENSITY, **kw) -> "ScenarioConfig":
        """Square area sized so that ``density`` yields exactly ``n`` SBSs."""
        if n <= 0:
            raise ValueError("n must be > 0")
        side = math.sqrt(n / density) * 1000.0
        cfg = cls(area_width=side, area_height=side, sbs_density=density, **kw)
        if cfg.n_sbs != n:  # rounding of the side; nudge the density instead
            cfg = dataclasses.replace(cfg, sbs_density=n / cfg.area_km2)
        return cfg

    @property
    def area_km2(self) -> float:
        return self.area_width * self.area_height / 1e6

    @property
    def n_sbs(self) -> int:
        return int(math.floor(self.sbs_density * self.area_km2 + 0.5))

    def channel(self) -> ChannelParams:
        return ChannelParams.from_radio(
            self.carrier_freq, self.bandwidth, self.noise_figure,
            self.pathloss_exponent, self.reference_distance, self.nlos_penalty,
        )

    def to_json_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["beamwidth_deg"] = math.degrees(d.pop("beamwidth"))
        d["blockage_dims"] = list(self.blockage_dims)
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "ScenarioConfig":
        d = dict(d)
        if "beamwidth" in d:
            raise ValueError("config angles are in degrees: use 'beamwidth_deg'")
        if "beamwidth_deg" in d:
            d["beamwidth"] = math.radians(float(d.pop("beamwidth_deg")))
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        if "blockage_dims" in d:
            d["blockage_dims"] = tuple(d["blockage_dims"])
        return cls(**d)


@dataclass
class Scenario:
    container: Container
    channel: ChannelParams = field(default_factory=ChannelParams)
    config: ScenarioConfig | None = None


def generate(cfg: ScenarioConfig) -> Scenario:
    rng = np.random.default_rng(cfg.seed)
    W, H = cfg.area_width, cfg.area_height
    c = Container(cfg.rtree_M)
    sbs_ant = AntennaPattern.normalized(cfg.beamwidth, cfg.g_max)
    omni = AntennaPattern.omni()
    sbs_trx = TrxParams(cfg.carrier_freq, cfg.tx_power, sbs_ant, 0.0, cfg.max_range)
    nid = 0

    def place(count):
        xs = rng.uniform(0.0, W, count)
        ys = rng.uniform(0.0, H, count)
        return xs, ys

    xs, ys = place(cfg.n_sbs)
    for x, y in zip(xs.tolist(), ys.tolist()):
        c.add_node(NetNode(nid, NodeKind.SMALL_BS, Point(x, y), trx=sbs_trx))
        nid += 1
    for kind, count, power in (
        (NodeKind.MACRO_BS, cfg.mbs_count, cfg.mbs_tx_power),
        (NodeKind.UE, cfg.ue_count, cfg.ue_tx_power),
    ):
        trx = TrxParams(cfg.carrier_freq, power, omni, 0.0, cfg.max_range)
        xs, ys = place(count)
        for x, y in zip(xs.tolist(), ys.tolist()):
            c.add_node(NetNode(nid, kind, Point(x, y), trx=trx))
            nid += 1
    bw, bl = cfg.blockage_dims
    xs, ys = place(cfg.blockage_count)
    for x, y in zip(xs.tolist(), ys.tolist()):
        c.add_node(NetNode(nid, NodeKind.BLOCKAGE, Point(x, y), width=bw, length=bl))
        nid += 1
    if cfg.aim:
        aim_at_nearest(c)
    return Scenario(c, cfg.channel(), cfg)


# --------------------------------------------------------------------------
# JSON


def _node_record(n: NetNode) -> dict:
    rec = {
        "id": int(n.id),
        "kind": n.kind.value,
        "x": n.loc.x,
        "y": n.loc.y,
        "width": n.width,
        "length": n.length,
        "height": n.height,
    }
    if n.trx is not None:
        a = n.trx.antenna
        rec["trx"] = {
            "carrier_freq": n.trx.carrier_freq,
            "tx_power": n.trx.tx_power,
            "boresight_rad": n.trx.boresight,
            "max_range": n.trx.max_range,
            "antenna": {"beamwidth_rad": a.beamwidth, "g_max": a.g_max, "g_min": a.g_min},
        }
    return rec


def _node_from(rec: dict) -> NetNode:
    trx = None
    t = rec.get("trx")
    if t is not None:
        a = t["antenna"]
        trx = TrxParams(
            float(t["carrier_freq"]),
            float(t["tx_power"]),
            AntennaPattern(float(a["beamwidth_rad"]), float(a["g_max"]), float(a["g_min"])),
            float(t.get("boresight_rad", 0.0)),
            float(t["max_range"]),
        )
    return NetNode(
        int(rec["id"]),
        NodeKind(rec["kind"]),
        Point(float(rec["x"]), float(rec["y"])),
        float(rec.get("width", 0.0)),
        float(rec.get("length", 0.0)),
        float(rec.get("height", 0.0)),
        trx,
    )


def to_json_dict(sc: Scenario) -> dict:
    return {
        "format": FORMAT,
        "version": VERSION,
        "rtree_M": sc.container.tree.M,
        "channel": dataclasses.asdict(sc.channel),
        "config": None if sc.config is None else sc.config.to_json_dict(),
        "nodes": [_node_record(n) for n in sorted(sc.container, key=lambda n: n.id)],
    }


def from_json_dict(d: dict) -> Scenario:
    if d.get("format") != FORMAT:
        raise ValueError("not a scenario file (missing format tag)")
    c = Container(int(d.get("rtree_M", 16)))
    for rec in d["nodes"]:
        c.add_node(_node_from(rec))
    ch = ChannelParams(**d["channel"]) if d.get("channel") else ChannelParams()
    cfg = ScenarioConfig.from_json_dict(d["config"]) if d.get("config") else None
    return Scenario(c, ch, cfg)


def save(sc: Scenario | Container, path) -> None:
    if isinstance(sc, Container):
        sc = Scenario(sc)
    Path(path).write_text(json.dumps(to_json_dict(sc), indent=1) + "\n", encoding="utf-8")


def load(path) -> Scenario:
    return from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def load_config(path) -> ScenarioConfig:
    return ScenarioConfig.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))
