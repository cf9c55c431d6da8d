"""Planar geometry primitives and closed-shape predicates.

Coordinates are meters in 64-bit floats, angles are radians. Every
intersection test treats shapes as closed: touching boundaries intersect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "Point",
    "Rect",
    "Triangle",
    "Segment",
    "dist",
    "rect_union",
    "rect_area",
    "rect_enlargement",
    "rect_intersects",
    "rect_contains_point",
    "point_in_triangle",
    "tri_intersects_rect",
    "seg_intersects_rect",
    "angle_offset",
    "wrap_angle",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, slots=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True, slots=True)
class Rect:
    """Axis-aligned rectangle; ``min == max`` is a point's MBR."""

    min: Point
    max: Point

    def __post_init__(self):
        if self.min.x > self.max.x or self.min.y > self.max.y:
            raise ValueError(f"inverted rect {self.min} .. {self.max}")

    @classmethod
    def from_bounds(cls, x0: float, y0: float, x1: float, y1: float) -> "Rect":
        return cls(Point(x0, y0), Point(x1, y1))

    @classmethod
    def around(cls, center: Point, width: float, length: float) -> "Rect":
        """Rect of extent ``width`` along x and ``length`` along y centered on ``center``."""
        hw = 0.5 * width
        hl = 0.5 * length
        return cls(Point(center.x - hw, center.y - hl), Point(center.x + hw, center.y + hl))

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (self.min.x, self.min.y, self.max.x, self.max.y)

    @property
    def area(self) -> float:
        return rect_area(self)


@dataclass(frozen=True, slots=True)
class Triangle:
    a: Point
    b: Point
    c: Point

    @property
    def area(self) -> float:
        a, b, c = self.a, self.b, self.c
        return 0.5 * abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x))

    @property
    def coords(self) -> tuple[float, float, float, float, float, float]:
        return (self.a.x, self.a.y, self.b.x, self.b.y, self.c.x, self.c.y)


@dataclass(frozen=True, slots=True)
class Segment:
    p: Point
    q: Point


def dist(p: Point, q: Point) -> float:
    dx = p.x - q.x
    dy = p.y - q.y
    return math.sqrt(dx * dx + dy * dy)


def rect_union(a: Rect, b: Rect) -> Rect:
    return Rect(
        Point(min(a.min.x, b.min.x), min(a.min.y, b.min.y)),
        Point(max(a.max.x, b.max.x), max(a.max.y, b.max.y)),
    )


def rect_area(r: Rect) -> float:
    return (r.max.x - r.min.x) * (r.max.y - r.min.y)


def rect_enlargement(a: Rect, b: Rect) -> float:
    """Area added to ``a`` by growing it to also cover ``b``."""
    return rect_area(rect_union(a, b)) - rect_area(a)


def rect_intersects(a: Rect, b: Rect) -> bool:
    return (
        a.min.x <= b.max.x
        and b.min.x <= a.max.x
        and a.min.y <= b.max.y
        and b.min.y <= a.max.y
    )


def rect_contains_point(r: Rect, p: Point) -> bool:
    return r.min.x <= p.x <= r.max.x and r.min.y <= p.y <= r.max.y


def _cross(ox, oy, ax, ay, px, py):
    return (ax - ox) * (py - oy) - (ay - oy) * (px - ox)


def point_in_triangle(p: Point, t: Triangle) -> bool:
    """Closed membership test. Zero-area triangles act as their hull segment."""
    ax, ay, bx, by, cx, cy = t.coords
    d1 = _cross(ax, ay, bx, by, p.x, p.y)
    d2 = _cross(bx, by, cx, cy, p.x, p.y)
    d3 = _cross(cx, cy, ax, ay, p.x, p.y)
    neg = d1 < 0 or d2 < 0 or d3 < 0
    pos = d1 > 0 or d2 > 0 or d3 > 0
    if neg and pos:
        return False
    return min(ax, bx, cx) <= p.x <= max(ax, bx, cx) and min(ay, by, cy) <= p.y <= max(ay, by, cy)


def _separated_on(nx, ny, tri_pts, corners):
    tp = [nx * x + ny * y for x, y in tri_pts]
    rp = [nx * x + ny * y for x, y in corners]
    return max(tp) < min(rp) or min(tp) > max(rp)


def tri_intersects_rect(t: Triangle, r: Rect) -> bool:
    """Separating-axis test between a closed triangle and a closed rectangle.

    Candidate axes are the two rectangle normals and the three edge normals of
    the triangle; for a zero-area triangle the edge normals collapse onto the
    normal of its supporting line, which is still a complete axis set.
    """
    pts = [(t.a.x, t.a.y), (t.b.x, t.b.y), (t.c.x, t.c.y)]
    x0, y0, x1, y1 = r.bounds
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    if max(xs) < x0 or min(xs) > x1 or max(ys) < y0 or min(ys) > y1:
        return False
    corners = [(x0, y0), (x1, y0), (x0, y1), (x1, y1)]
    for i in range(3):
        px, py = pts[i]
        qx, qy = pts[(i + 1) % 3]
        if _separated_on(py - qy, qx - px, pts, corners):
            return False
    return True


def seg_intersects_rect(s: Segment, r: Rect) -> bool:
    """Liang-Barsky clip of a closed segment against a closed rectangle."""
    px, py = s.p.x, s.p.y
    dx = s.q.x - px
    dy = s.q.y - py
    t0, t1 = 0.0, 1.0
    for p, q in ((-dx, px - r.min.x), (dx, r.max.x - px), (-dy, py - r.min.y), (dy, r.max.y - py)):
        if p == 0.0:
            if q < 0.0:
                return False
            continue
        t = q / p
        if p < 0.0:
            if t > t1:
                return False
            t0 = max(t0, t)
        else:
            if t < t0:
                return False
            t1 = min(t1, t)
    return True


def wrap_angle(a: float) -> float:
    """Map an angle to [-pi, pi)."""
    return (a + math.pi) % TWO_PI - math.pi


def angle_offset(origin: Point, boresight: float, target: Point) -> float:
    """Absolute angle between ``boresight`` and the ray origin->target, in [0, pi]."""
    if origin.x == target.x and origin.y == target.y:
        raise ValueError("angle_offset undefined for target == origin")
    az = math.atan2(target.y - origin.y, target.x - origin.x)
    return abs(wrap_angle(az - boresight))
