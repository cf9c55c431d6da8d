"""A ten-node HetNet in one R-tree, and the four query types against it."""

import math

from hetindex import (
    AntennaPattern, Container, NetNode, NodeKind, Point, Segment, TrxParams,
)
from hetindex.radio import sector_triangle

omni = AntennaPattern.omni()
beam = AntennaPattern.normalized(math.radians(30), 10.0)

c = Container(max_entries=3)
c.add_node(NetNode(0, NodeKind.MACRO_BS, Point(50, 50), trx=TrxParams(2e9, 46, omni, 0, 1000)))
for i, (x, y) in enumerate([(20, 20), (80, 25), (25, 80), (75, 75)], start=1):
    c.add_node(NetNode(i, NodeKind.SMALL_BS, Point(x, y), trx=TrxParams(28e9, 30, beam)))
for i, (x, y) in enumerate([(30, 40), (60, 30), (40, 65), (70, 55)], start=5):
    c.add_node(NetNode(i, NodeKind.UE, Point(x, y), trx=TrxParams(28e9, 23, omni)))
c.add_node(NetNode(9, NodeKind.BLOCKAGE, Point(50, 20), width=10, length=6))

print(f"{len(c)} nodes, tree height {c.tree.height}")
print("tree shape:", c.tree.structure())

entries, stats = c.query_radius(Point(30, 30), 20)
print("within 20 m of (30, 30):", [n.id for n in c.resolve(entries)], stats)

print("3 nearest to (60, 60):", [e.handle for e in c.tree.query_knn(Point(60, 60), 3)])

tri = sector_triangle(Point(20, 20), math.radians(45), math.radians(30), 80)
entries, _ = c.tree.query_triangle(tri)
print("in SBS 1's 45 deg sector:", [n.id for n in c.resolve(entries) if n.id != 1])

# the blockage sits between SBS 1 and SBS 2
print("LOS 1 -> 2:", c.los_clear(c[1].loc, c[2].loc))
print("LOS 1 -> 3:", c.los_clear(c[1].loc, c[3].loc))
print("segment hits:", [e.handle for e in c.tree.query_segment(Segment(c[1].loc, c[2].loc))])
