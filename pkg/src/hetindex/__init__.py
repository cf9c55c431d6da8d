"""R-tree spatial indexing for directional heterogeneous network simulation.

Every network element sits on one R-tree; distance, sector and segment
queries drive all-links SNR/SINR computation, and a benchmark harness
compares that against plain array indexing.
"""

from .geometry import Point, Rect, Segment, Triangle
from .network import Container, NetNode, NodeKind, TrxParams
from .radio import AntennaPattern, ChannelParams, LinkMetric, LinkTable, sinr_all_links, snr_all_links
from .rtree import Entry, EntryNotFound, QueryStats, RTree
from .scenario import Scenario, ScenarioConfig, generate

__version__ = "0.1.0"

__all__ = [
    "AntennaPattern",
    "ChannelParams",
    "Container",
    "Entry",
    "EntryNotFound",
    "LinkMetric",
    "LinkTable",
    "NetNode",
    "NodeKind",
    "Point",
    "QueryStats",
    "RTree",
    "Rect",
    "Scenario",
    "ScenarioConfig",
    "Segment",
    "Triangle",
    "TrxParams",
    "generate",
    "sinr_all_links",
    "snr_all_links",
]
