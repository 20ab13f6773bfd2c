"""Quadrature rules and polygon sub-triangulation.

Triangle rules are given on the reference triangle (0,0), (1,0), (0,1)
with weights normalized to sum to 1; mapping to a physical triangle
multiplies the weights by its area.
"""
from __future__ import annotations

import numpy as np

from .errors import DegenerateElement

# Symmetric rules, stored as (barycentric point groups, weight) per orbit.
# Orbit (a, a, 1-2a) expands to its three permutations; (1/3, 1/3, 1/3) to one.
_SYMMETRIC_RULES = {
    1: [((1.0 / 3.0, 1.0 / 3.0), 1.0)],
    2: [((1.0 / 6.0, 1.0 / 6.0), 1.0 / 3.0)],
    4: [
        ((0.445948490915965, 0.445948490915965), 0.223381589678011),
        ((0.091576213509771, 0.091576213509771), 0.109951743655322),
    ],
    5: [
        ((1.0 / 3.0, 1.0 / 3.0), 0.225),
        ((0.470142064105115, 0.470142064105115), 0.132394152788506),
        ((0.101286507323456, 0.101286507323456), 0.125939180544827),
    ],
}


def gauss01(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _expand_orbit(a: float, b: float) -> list[tuple[float, float]]:
    c = 1.0 - a - b
    pts = {(a, b), (b, c), (c, a), (b, a), (c, b), (a, c)}
    return sorted(pts)


def _duffy_rule(degree: int) -> tuple[np.ndarray, np.ndarray]:
    # Collapsed tensor Gauss; the Jacobian raises the u-degree by one,
    # so degree+2 points per direction are more than exact.
    m = degree + 2
    u, wu = gauss01(m)
    v, wv = gauss01(m)
    U, V = np.meshgrid(u, v, indexing="ij")
    W = np.outer(wu, wv) * U
    x = U * (1.0 - V)
    y = U * V
    pts = np.column_stack([x.ravel(), y.ravel()])
    wts = 2.0 * W.ravel()  # normalize: reference area is 1/2
    return pts, wts


def triangle_rule(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Points (m, 2) on the reference triangle and weights summing to 1.

    Degrees 1, 2, 4, 5 use standard symmetric rules; degree 3 is served by
    the degree-4 rule; anything higher falls back to a collapsed tensor
    rule that is exact well past the requested degree.
    """
    if degree < 1:
        raise ValueError("quadrature degree must be >= 1")
    if degree == 3:
        degree = 4
    if degree in _SYMMETRIC_RULES:
        pts: list[tuple[float, float]] = []
        wts: list[float] = []
        for (a_coord, b_coord), w in _SYMMETRIC_RULES[degree]:
            orbit = (
                [(a_coord, b_coord)]
                if abs(a_coord - 1.0 / 3.0) < 1e-14 and abs(b_coord - 1.0 / 3.0) < 1e-14
                else _expand_orbit(a_coord, b_coord)
            )
            pts.extend(orbit)
            wts.extend([w] * len(orbit))
        return np.asarray(pts), np.asarray(wts)
    return _duffy_rule(degree)


def map_rule_to_triangle(tri: np.ndarray, pts: np.ndarray, wts: np.ndarray):
    """Map a reference rule to the physical triangle `tri` (3, 2)."""
    a, b, c = tri
    phys = a + np.outer(pts[:, 0], b - a) + np.outer(pts[:, 1], c - a)
    area = 0.5 * abs(
        (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    )
    return phys, wts * area


def ear_clip(verts: np.ndarray) -> list[tuple[int, int, int]]:
    """Triangulate a simple CCW polygon by ear clipping.

    Collinear vertices (hanging nodes on straight edges) are clipped as
    zero-area ears, which is harmless for quadrature purposes.
    """
    n = len(verts)
    if n < 3:
        raise DegenerateElement("polygon with fewer than 3 vertices")
    idx = list(range(n))
    scale = float(np.max(np.abs(verts)) + 1.0)
    eps = 1e-14 * scale * scale
    tris: list[tuple[int, int, int]] = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 4 * n * n:
            raise DegenerateElement("ear clipping failed to terminate")
        clipped = False
        m = len(idx)
        for k in range(m):
            i0, i1, i2 = idx[(k - 1) % m], idx[k], idx[(k + 1) % m]
            a, b, c = verts[i0], verts[i1], verts[i2]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if cross < -eps:
                continue  # reflex corner, not an ear
            if cross > eps and _any_point_touches(
                verts, [j for j in idx if j not in (i0, i1, i2)], a, b, c, eps
            ):
                continue
            # collinear corners (cross within eps) are zero-area ears and
            # always safe to remove: the covered region is unchanged
            tris.append((i0, i1, i2))
            idx.pop(k)
            clipped = True
            break
        if not clipped:
            raise DegenerateElement("no ear found; polygon may be invalid")
    tris.append((idx[0], idx[1], idx[2]))
    return tris


def _any_point_touches(verts, others, a, b, c, eps) -> bool:
    """Any point inside or on the closed triangle (a, b, c)?

    Points exactly on the candidate diagonal must block the ear, else a
    reflex vertex sitting on it would end up outside the triangulation.
    """
    for j in others:
        p = verts[j]
        d1 = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        d2 = (c[0] - b[0]) * (p[1] - b[1]) - (c[1] - b[1]) * (p[0] - b[0])
        d3 = (a[0] - c[0]) * (p[1] - c[1]) - (a[1] - c[1]) * (p[0] - c[0])
        if d1 >= -eps and d2 >= -eps and d3 >= -eps:
            return True
    return False


def polygon_rule(verts: np.ndarray, degree: int):
    """Quadrature points and weights over a simple CCW polygon.

    The polygon is ear-clipped and a symmetric triangle rule of the given
    degree is mapped onto each triangle; weights sum to the polygon area.
    """
    ref_pts, ref_wts = triangle_rule(degree)
    tris = ear_clip(verts)
    pts = []
    wts = []
    for i, j, k in tris:
        p, w = map_rule_to_triangle(verts[[i, j, k]], ref_pts, ref_wts)
        pts.append(p)
        wts.append(w)
    return np.vstack(pts), np.concatenate(wts)
