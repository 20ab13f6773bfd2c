import numpy as np
import pytest

from vemcut.geometry import Polygon


def star_polygon(rng, n, nonconvex=False):
    """Random simple polygon, star-shaped with respect to the origin.

    Angle gaps stay below pi so the origin is strictly inside and the
    angle-sorted loop is simple and counterclockwise.
    """
    gaps = rng.uniform(0.5, 1.0, n)
    ang = 2 * np.pi * np.cumsum(gaps) / gaps.sum() + rng.uniform(0, 2 * np.pi)
    if nonconvex:
        rad = rng.uniform(0.25, 1.0, n)
    else:
        rad = np.full(n, 1.0) * rng.uniform(0.5, 1.0)
    return Polygon(np.column_stack([rad * np.cos(ang), rad * np.sin(ang)]))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_square():
    return Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])


@pytest.fixture
def polygon_family(rng):
    """Mixed family of convex and nonconvex test polygons."""
    polys = [
        Polygon([(0, 0), (1, 0), (1, 1), (0, 1)]),
        Polygon([(0, 0), (1, 0), (1, 0.1), (0, 0.1)]),
        Polygon([(0, 0), (1, 0), (1, 0.6), (0, 0.2)]),
        Polygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]),
        Polygon([(np.cos(a), np.sin(a)) for a in np.linspace(0, 2 * np.pi, 7)[:-1]]),
    ]
    for k in range(8):
        polys.append(star_polygon(rng, int(rng.integers(4, 9)), nonconvex=bool(k % 2)))
    return polys
