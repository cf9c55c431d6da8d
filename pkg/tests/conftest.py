import math

import numpy as np
import pytest

from hetindex.geometry import Point
from hetindex.network import Container, NetNode, NodeKind, TrxParams
from hetindex.radio import AntennaPattern

SBS_ANT = AntennaPattern.normalized(math.radians(30.0), 10.0)


def sbs(i, x, y, boresight=0.0, max_range=200.0, antenna=SBS_ANT, power=30.0):
    return NetNode(i, NodeKind.SMALL_BS, Point(x, y), trx=TrxParams(28e9, power, antenna, boresight, max_range))


def blockage(i, x, y, w, l):
    return NetNode(i, NodeKind.BLOCKAGE, Point(x, y), width=w, length=l)


def brute_radius(points, c, r):
    return {i for i, (x, y) in enumerate(points) if math.hypot(x - c[0], y - c[1]) <= r}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def fig3_container():
    """One MBS, four SBSs, four UEs and one blockage."""
    c = Container(3)
    omni = AntennaPattern.omni()
    c.add_node(NetNode(0, NodeKind.MACRO_BS, Point(50, 50), trx=TrxParams(2e9, 46, omni, 0, 1000)))
    for i, (x, y) in enumerate([(20, 20), (80, 25), (25, 80), (75, 75)], start=1):
        c.add_node(sbs(i, x, y))
    for i, (x, y) in enumerate([(30, 40), (60, 30), (40, 65), (70, 55)], start=5):
        c.add_node(NetNode(i, NodeKind.UE, Point(x, y), trx=TrxParams(28e9, 23, omni, 0, 200)))
    c.add_node(blockage(9, 50, 20, 10, 6))
    return c
