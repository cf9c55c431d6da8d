import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetindex.geometry import (
    Point,
    Rect,
    Segment,
    Triangle,
    angle_offset,
    dist,
    point_in_triangle,
    rect_contains_point,
    rect_enlargement,
    rect_intersects,
    rect_union,
    seg_intersects_rect,
    tri_intersects_rect,
    wrap_angle,
)

coord = st.floats(-1e4, 1e4, allow_nan=False)
pt = st.builds(Point, coord, coord)


@st.composite
def rects(draw):
    x0, x1 = sorted((draw(coord), draw(coord)))
    y0, y1 = sorted((draw(coord), draw(coord)))
    return Rect.from_bounds(x0, y0, x1, y1)


def test_point_rejects_nan():
    with pytest.raises(ValueError):
        Point(float("nan"), 0.0)
    with pytest.raises(ValueError):
        Point(0.0, math.inf)


def test_rect_rejects_inverted():
    with pytest.raises(ValueError):
        Rect.from_bounds(1, 0, 0, 1)
    r = Rect(Point(2, 3), Point(2, 3))
    assert r.area == 0.0


def test_dist_examples():
    assert dist(Point(0, 0), Point(0, 0)) == 0.0
    assert dist(Point(0, 0), Point(3, 4)) == 5.0
    # sqrt(2^2 + 3^2)
    assert dist(Point(1.5, -2), Point(-0.5, 1)) == pytest.approx(3.605551275463989, rel=1e-15)


@given(pt, pt, pt)
def test_dist_triangle_inequality(a, b, c):
    assert dist(a, c) <= (dist(a, b) + dist(b, c)) * (1 + 1e-9) + 1e-12
    assert dist(a, b) == dist(b, a) >= 0


def test_union_examples():
    r = Rect.from_bounds(0, 0, 1, 1)
    assert rect_union(r, r) == r
    assert rect_union(r, Rect.from_bounds(2, 2, 3, 3)) == Rect.from_bounds(0, 0, 3, 3)


@given(rects(), rects(), rects())
def test_union_properties(a, b, c):
    u = rect_union(a, b)
    assert u.bounds == (
        min(a.min.x, b.min.x), min(a.min.y, b.min.y), max(a.max.x, b.max.x), max(a.max.y, b.max.y)
    )
    assert rect_union(a, b) == rect_union(b, a)
    assert rect_union(rect_union(a, b), c) == rect_union(a, rect_union(b, c))
    for r in (a, b):
        assert rect_contains_point(u, r.min) and rect_contains_point(u, r.max)


def test_enlargement_examples():
    a = Rect.from_bounds(0, 0, 1, 1)
    assert rect_enlargement(a, Rect.from_bounds(0.2, 0.2, 0.5, 0.9)) == 0.0
    assert rect_enlargement(a, Rect.from_bounds(1, 0, 2, 1)) == 1.0


@given(rects(), rects())
def test_enlargement_matches_area_oracle(a, b):
    w = max(a.max.x, b.max.x) - min(a.min.x, b.min.x)
    h = max(a.max.y, b.max.y) - min(a.min.y, b.min.y)
    want = w * h - (a.max.x - a.min.x) * (a.max.y - a.min.y)
    assert rect_enlargement(a, b) == pytest.approx(want, rel=1e-12, abs=1e-6)
    assert rect_enlargement(a, b) >= -1e-6


def test_intersects_closed_edges():
    a = Rect.from_bounds(0, 0, 1, 1)
    assert rect_intersects(a, Rect.from_bounds(1, 1, 2, 2))
    assert not rect_intersects(a, Rect.from_bounds(1.0000001, 0, 2, 1))


@given(rects(), rects())
def test_intersects_symmetric(a, b):
    assert rect_intersects(a, b) == rect_intersects(b, a)


def test_point_in_triangle_closed_and_degenerate():
    t = Triangle(Point(0, 0), Point(4, 0), Point(0, 4))
    assert point_in_triangle(Point(2, 2), t)  # on the hypotenuse
    assert point_in_triangle(Point(0, 0), t)
    assert not point_in_triangle(Point(2.01, 2), t)
    sliver = Triangle(Point(0, 0), Point(2, 2), Point(4, 4))
    assert point_in_triangle(Point(3, 3), sliver)
    assert not point_in_triangle(Point(5, 5), sliver)
    assert not point_in_triangle(Point(3, 3.001), sliver)


def test_tri_rect_examples():
    t = Triangle(Point(0, 0), Point(10, 0), Point(0, 10))
    assert tri_intersects_rect(t, Rect.from_bounds(1, 1, 2, 2))
    assert not tri_intersects_rect(t, Rect.from_bounds(11, 0, 12, 1))
    # rect beyond the hypotenuse but inside the bbox: only the edge axis separates
    assert not tri_intersects_rect(t, Rect.from_bounds(6, 6, 9, 9))
    assert tri_intersects_rect(t, Rect.from_bounds(5, 5, 9, 9))  # corner touches the hypotenuse
    # triangle inside a rect
    assert tri_intersects_rect(t, Rect.from_bounds(-1, -1, 20, 20))


def _mc_oracle(t, r, k=40):
    """Dense sampling of both shapes: true when some sample of one lies in the other."""
    x0, y0, x1, y1 = r.bounds
    gx = np.linspace(x0, x1, k)
    gy = np.linspace(y0, y1, k)
    for x in gx:
        for y in gy:
            if point_in_triangle(Point(x, y), t):
                return True
    u = np.linspace(0, 1, k)
    (ax, ay), (bx, by), (cx, cy) = (tuple(t.a), tuple(t.b), tuple(t.c))
    for s in u:
        for w in u[: k - int(s * (k - 1))]:
            px = ax + s * (bx - ax) + w * (cx - ax)
            py = ay + s * (by - ay) + w * (cy - ay)
            if x0 <= px <= x1 and y0 <= py <= y1:
                return True
    return False


def _gap(t, r):
    """Distance between the closed shapes, by dense boundary sampling."""
    x0, y0, x1, y1 = r.bounds
    pts = []
    for p, q in ((t.a, t.b), (t.b, t.c), (t.c, t.a)):
        for s in np.linspace(0, 1, 400):
            pts.append((p.x + s * (q.x - p.x), p.y + s * (q.y - p.y)))
    pts = np.array(pts)
    dx = np.maximum.reduce([x0 - pts[:, 0], np.zeros(len(pts)), pts[:, 0] - x1])
    dy = np.maximum.reduce([y0 - pts[:, 1], np.zeros(len(pts)), pts[:, 1] - y1])
    return float(np.min(np.hypot(dx, dy)))


def test_tri_rect_agrees_with_sampling_oracle(rng):
    mismatches = 0
    for _ in range(1000):
        v = rng.uniform(0, 100, 6)
        t = Triangle(Point(v[0], v[1]), Point(v[2], v[3]), Point(v[4], v[5]))
        cx, cy = rng.uniform(0, 100, 2)
        w, h = rng.uniform(0.5, 30, 2)
        r = Rect.from_bounds(cx, cy, cx + w, cy + h)
        got = tri_intersects_rect(t, r)
        want = _mc_oracle(t, r)
        if got != want:
            # sampling can only miss thin overlaps; a true miss by SAT is never allowed
            assert got and not want, (t, r)
            assert _gap(t, r) < 1.0, (t, r)
            mismatches += 1
    assert mismatches < 30


@given(
    st.lists(st.floats(-50, 50, allow_nan=False), min_size=6, max_size=6),
    rects(),
)
@settings(max_examples=300)
def test_tri_rect_corner_vertex_property(v, r):
    t = Triangle(Point(v[0], v[1]), Point(v[2], v[3]), Point(v[4], v[5]))
    x0, y0, x1, y1 = r.bounds
    corners = [Point(x0, y0), Point(x1, y0), Point(x0, y1), Point(x1, y1)]
    if any(point_in_triangle(c, t) for c in corners) or any(rect_contains_point(r, p) for p in (t.a, t.b, t.c)):
        assert tri_intersects_rect(t, r)


def test_segment_rect():
    r = Rect.from_bounds(0, 0, 2, 2)
    assert seg_intersects_rect(Segment(Point(-1, 1), Point(3, 1)), r)
    assert seg_intersects_rect(Segment(Point(-1, -1), Point(0, 0)), r)  # touches a corner
    assert not seg_intersects_rect(Segment(Point(-1, 3), Point(3, 2.5)), r)
    assert seg_intersects_rect(Segment(Point(1, 1), Point(1, 1)), r)
    assert not seg_intersects_rect(Segment(Point(3, 3), Point(3, 3)), r)
    assert seg_intersects_rect(Segment(Point(2, -5), Point(2, 5)), r)  # along an edge


def test_segment_rect_matches_sampling(rng):
    for _ in range(500):
        p = Point(*rng.uniform(0, 10, 2))
        q = Point(*rng.uniform(0, 10, 2))
        x0, y0 = rng.uniform(0, 8, 2)
        r = Rect.from_bounds(x0, y0, x0 + rng.uniform(0.1, 3), y0 + rng.uniform(0.1, 3))
        s = np.linspace(0, 1, 4001)
        xs = p.x + s * (q.x - p.x)
        ys = p.y + s * (q.y - p.y)
        sampled = bool(np.any((xs >= r.min.x) & (xs <= r.max.x) & (ys >= r.min.y) & (ys <= r.max.y)))
        got = seg_intersects_rect(Segment(p, q), r)
        if sampled:
            assert got
        elif got:
            # a grazing hit the samples stepped over
            step = math.hypot(q.x - p.x, q.y - p.y) / 4000
            ex = Rect.from_bounds(r.min.x - step, r.min.y - step, r.max.x + step, r.max.y + step)
            assert seg_intersects_rect(Segment(p, q), ex)


def test_angle_offset_examples():
    o = Point(0, 0)
    assert angle_offset(o, 0.0, Point(1, 0)) == 0.0
    assert angle_offset(o, 0.0, Point(0, 1)) == pytest.approx(math.pi / 2)
    assert angle_offset(o, 3 * math.pi / 2, Point(0, -1)) == pytest.approx(0.0, abs=1e-15)
    assert angle_offset(o, 0.0, Point(-1, 0)) == pytest.approx(math.pi)
    with pytest.raises(ValueError):
        angle_offset(o, 0.0, o)


@given(pt, st.floats(-10, 10), pt, st.integers(-5, 5))
def test_angle_offset_range_and_periodicity(o, b, t, k):
    if o == t:
        return
    a = angle_offset(o, b, t)
    assert 0.0 <= a <= math.pi
    assert angle_offset(o, b + 2 * math.pi * k, t) == pytest.approx(a, abs=1e-9)


@given(st.floats(-1e3, 1e3))
def test_wrap_angle_range(a):
    w = wrap_angle(a)
    assert -math.pi <= w < math.pi
    assert math.cos(w) == pytest.approx(math.cos(a), abs=1e-9)
