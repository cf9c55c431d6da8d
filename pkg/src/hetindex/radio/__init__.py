"""Directional link-budget layer: antenna pattern, sectors and SNR/SINR."""

from .antenna import AntennaPattern
from .links import (
    METHODS,
    ChannelParams,
    LinkMetric,
    LinkTable,
    aim_at_nearest,
    directional_neighbors,
    fspl_db,
    in_main_lobe,
    pathloss_db,
    sector_triangle,
    sinr_all_links,
    snr_all_links,
)

__all__ = [
    "AntennaPattern",
    "ChannelParams",
    "LinkMetric",
    "LinkTable",
    "METHODS",
    "aim_at_nearest",
    "directional_neighbors",
    "fspl_db",
    "in_main_lobe",
    "pathloss_db",
    "sector_triangle",
    "sinr_all_links",
    "snr_all_links",
]
