import math

import numpy as np
import pytest

from vemcut.quadrature import (
    ear_clip,
    gauss01,
    map_rule_to_triangle,
    polygon_rule,
    triangle_rule,
)


def ref_triangle_moment(a, b):
    """Exact integral of x^a y^b over the triangle (0,0),(1,0),(0,1)."""
    return math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)


@pytest.mark.parametrize("degree", [1, 2, 3, 4, 5, 6, 8])
def test_triangle_rule_exactness(degree):
    pts, wts = triangle_rule(degree)
    area = 0.5
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            approx = area * np.sum(wts * pts[:, 0] ** a * pts[:, 1] ** b)
            assert approx == pytest.approx(ref_triangle_moment(a, b), abs=1e-14)


def test_rule_weights_sum_to_one():
    for degree in (1, 2, 4, 5, 7):
        _, wts = triangle_rule(degree)
        assert np.sum(wts) == pytest.approx(1.0, abs=1e-13)


def test_gauss01_polynomial():
    x, w = gauss01(4)
    assert np.sum(w * x**7) == pytest.approx(1.0 / 8.0, abs=1e-14)


def test_map_rule_scales_weights():
    tri = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 3.0]])
    pts, wts = triangle_rule(2)
    phys, pw = map_rule_to_triangle(tri, pts, wts)
    assert pw.sum() == pytest.approx(3.0, abs=1e-13)
    assert phys[:, 0].max() <= 2.0


def test_ear_clip_convex_and_hanging_nodes():
    square = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    tris = ear_clip(square)
    assert len(tris) == 2
    # hanging node on a straight edge (collinear vertex)
    ring = np.array([[0, 0], [1, 0], [1, 0.4], [1, 1], [0, 1]], dtype=float)
    tris = ear_clip(ring)
    assert len(tris) == 3
    total = 0.0
    for i, j, k in tris:
        a, b, c = ring[i], ring[j], ring[k]
        total += 0.5 * abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    assert total == pytest.approx(1.0, abs=1e-13)


def test_ear_clip_nonconvex():
    lshape = np.array([[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]], dtype=float)
    tris = ear_clip(lshape)
    total = 0.0
    for i, j, k in tris:
        a, b, c = lshape[i], lshape[j], lshape[k]
        total += 0.5 * abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    assert total == pytest.approx(3.0, abs=1e-13)


def test_polygon_rule_integrates_polynomials(polygon_family):
    for poly in polygon_family:
        pts, wts = polygon_rule(poly.vertices, 4)
        assert wts.sum() == pytest.approx(poly.area, rel=1e-12)
        # linear exactness against the shoelace centroid
        cx = np.sum(wts * pts[:, 0]) / poly.area
        assert cx == pytest.approx(poly.centroid[0], rel=1e-10, abs=1e-12)
