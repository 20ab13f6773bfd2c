"""Computational-geometry kernel for polygonal elements.

Provides the polygon type with its cached measures, convex hulls, the
per-edge strip depth and inward triangle height, and the mesh shape
checks built on them:

* every edge must support an inward triangle of height at least
  ``gamma`` times the edge length (with the ratio capped at 1, since a
  taller triangle can always be rescaled);
* the number of edges per element is bounded;
* the number of elements whose convex hull meets a given element is
  bounded.

Elements passing the first two checks are called isotropic; for those
the area is pinned between ``gamma * h^2 / (2 n^2)`` and ``pi * h^2``
where ``h`` is the diameter and ``n`` the edge count.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import core
from ._pycore import _segments_cross
from .errors import DegenerateElement, ValidationError


class Point2(NamedTuple):
    x: float
    y: float


class Polygon:
    """Simple polygon given by a CCW vertex loop.

    Validation enforces finite coordinates, positive (CCW) signed area,
    no coincident consecutive vertices, no properly crossing boundary
    edges, and non-degeneracy of the area relative to the diameter.
    Vertices may sit on straight sections of the boundary (hanging
    nodes); such collinear vertices are legal.
    """

    __slots__ = ("vertices", "area", "diameter", "_convex")

    def __init__(self, vertices, validate: bool = True):
        v = np.array(vertices, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ValidationError("polygon needs an (n, 2) vertex array with n >= 3")
        if not np.all(np.isfinite(v)):
            raise ValidationError("polygon has non-finite coordinates")
        self.vertices = v
        signed = 0.5 * float(
            np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1])
        )
        diff = v[:, None, :] - v[None, :, :]
        self.diameter = float(np.sqrt((diff * diff).sum(axis=2).max()))
        self.area = signed
        self._convex: Optional[bool] = None
        if validate:
            self._validate(signed)

    def _validate(self, signed: float) -> None:
        v = self.vertices
        if signed <= 0.0:
            raise ValidationError("polygon vertices must be ordered counterclockwise")
        d = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(d[:, 0], d[:, 1])
        if lengths.min() <= 1e-12 * self.diameter:
            raise ValidationError("consecutive polygon vertices coincide")
        if signed < 1e-14 * self.diameter**2:
            raise DegenerateElement("polygon area is degenerate relative to its diameter")
        if self._has_crossing():
            raise ValidationError("polygon boundary crosses itself")

    def _has_crossing(self) -> bool:
        v = self.vertices
        n = len(v)
        a = v
        b = np.roll(v, -1, axis=0)
        eps = 1e-12 * self.diameter**2
        for i in range(n):
            # skip the edge itself and the two adjacent edges
            others = [j for j in range(n) if j not in (i, (i - 1) % n, (i + 1) % n)]
            if not others:
                continue
            crosses = _segments_cross(
                a[i][None, :], b[i][None, :], a[others], b[others], eps
            )
            if crosses.any():
                return True
        return False

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def edges(self) -> np.ndarray:
        n = len(self.vertices)
        return np.column_stack([np.arange(n), (np.arange(n) + 1) % n])

    @property
    def edge_vectors(self) -> np.ndarray:
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    @property
    def edge_lengths(self) -> np.ndarray:
        d = self.edge_vectors
        return np.hypot(d[:, 0], d[:, 1])

    @property
    def edge_tangents(self) -> np.ndarray:
        return self.edge_vectors / self.edge_lengths[:, None]

    @property
    def edge_normals(self) -> np.ndarray:
        """Outward unit normals (CCW loop: tangent rotated by -90 deg)."""
        t = self.edge_tangents
        return np.column_stack([t[:, 1], -t[:, 0]])

    @property
    def centroid(self) -> np.ndarray:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cross = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        return (v + w).T @ cross / (6.0 * self.area)

    @property
    def is_convex(self) -> bool:
        if self._convex is None:
            d = self.edge_vectors
            cross = d[:, 0] * np.roll(d[:, 1], -1) - d[:, 1] * np.roll(d[:, 0], -1)
            self._convex = bool(np.all(cross >= -1e-12 * self.diameter**2))
        return self._convex

    def contains(self, points, tol: Optional[float] = None) -> np.ndarray:
        """Closed membership: inside or within tol of the boundary."""
        if tol is None:
            tol = 1e-12 * self.diameter
        return core.points_in_polygon(self.vertices, points, tol)

    def __repr__(self) -> str:
        return f"Polygon(n={self.n}, area={self.area:.6g}, diameter={self.diameter:.6g})"


def polygon_measures(p: Polygon) -> tuple[float, float]:
    """Shoelace area and max pairwise vertex distance."""
    return p.area, p.diameter


def convex_hull(p: Polygon) -> Polygon:
    """Convex hull of the polygon's vertices (monotone chain), CCW."""
    pts = p.vertices[np.lexsort((p.vertices[:, 1], p.vertices[:, 0]))]
    pts = np.unique(pts, axis=0)
    if len(pts) < 3:
        raise DegenerateElement("hull collapsed to fewer than 3 points")

    def half(points):
        chain: list[np.ndarray] = []
        for q in points:
            while len(chain) >= 2:
                o, a = chain[-2], chain[-1]
                if (a[0] - o[0]) * (q[1] - o[1]) - (a[1] - o[1]) * (q[0] - o[0]) <= 0:
                    chain.pop()
                else:
                    break
            chain.append(q)
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    return Polygon(hull)


@dataclass
class EdgeGeometry:
    """Per-edge strip depth and supported inward triangle height.

    ``strip_depth`` is the deepest the element reaches over the open
    strip spanned by the edge; ``height`` is the tallest triangle with
    the edge as base that fits inside the element within that strip.
    ``ratio`` is height over edge length.  ``height_is_lower_bound`` is
    set when the apex-sweep bisection had to settle below the strip
    depth: the value is then certified feasible but may undershoot the
    true supremum by the sweep resolution.
    """

    edge_index: int
    length: float
    strip_depth: float
    height: float
    ratio: float
    normal: np.ndarray
    tangent: np.ndarray
    height_is_lower_bound: bool = False


def _edge_local(p: Polygon, edge_index: int):
    """Vertices in the frame of edge i: x along the edge, y inward."""
    v = p.vertices
    n = len(v)
    a = v[edge_index]
    b = v[(edge_index + 1) % n]
    t = b - a
    h_e = float(np.hypot(*t))
    t = t / h_e
    n_in = np.array([-t[1], t[0]])
    local = (v - a) @ np.column_stack([t, n_in])
    return local, h_e, t, n_in


def _clip_halfplane(poly: np.ndarray, axis: int, bound: float, keep_below: bool) -> np.ndarray:
    """Sutherland-Hodgman clip against x[axis] <= bound (or >= bound)."""
    out: list[np.ndarray] = []
    n = len(poly)
    for i in range(n):
        cur, nxt = poly[i], poly[(i + 1) % n]
        c_in = cur[axis] <= bound if keep_below else cur[axis] >= bound
        n_in = nxt[axis] <= bound if keep_below else nxt[axis] >= bound
        if c_in:
            out.append(cur)
        if c_in != n_in:
            s = (bound - cur[axis]) / (nxt[axis] - cur[axis])
            out.append(cur + s * (nxt - cur))
    return np.array(out) if out else np.empty((0, 2))


def strip_depth(p: Polygon, edge_index: int) -> float:
    """Depth of the element over the open strip spanned by edge i."""
    local, h_e, _, _ = _edge_local(p, edge_index)
    eps = 1e-12 * p.diameter
    clipped = _clip_halfplane(local, 0, eps, keep_below=False)
    if len(clipped):
        clipped = _clip_halfplane(clipped, 0, h_e - eps, keep_below=True)
    if not len(clipped):
        raise DegenerateElement("empty strip over an edge")
    return float(clipped[:, 1].max())


def edge_heights(
    p: Polygon,
    edge_index: int,
    tol: float = 1e-9,
    method: str = "auto",
    n_apex: int = 64,
) -> EdgeGeometry:
    """Strip depth and inward triangle height for one edge.

    ``tol`` is relative to the polygon diameter and bounds the bisection
    width on the height.  ``method``: "auto" uses the exact vertex-based
    value on convex polygons and the apex-sweep bisection otherwise;
    "search" forces the generic path; "convex" forces the shortcut (it
    is only exact on convex polygons).
    """
    local, h_e, t, n_in = _edge_local(p, edge_index)
    delta = strip_depth(p, edge_index)
    tol_abs = tol * p.diameter

    use_convex = method == "convex" or (method == "auto" and p.is_convex)
    if use_convex:
        # for a convex element any point of the clipped strip is a valid
        # apex, so the height equals the strip depth
        ell = delta
        flagged = False
    else:
        xs = np.unique(
            np.clip(
                np.concatenate([np.linspace(0.0, h_e, n_apex), local[:, 0]]),
                0.0,
                h_e,
            )
        )
        # membership slack sits between roundoff and the bisection width
        in_tol = 1e-10 * p.diameter

        def feasible(ell_try: float) -> bool:
            return core.apex_feasible(local, h_e, ell_try, xs, in_tol)

        if feasible(delta):
            ell, flagged = delta, False
        else:
            hi = delta
            lo = delta / 2.0
            while lo > tol_abs and not feasible(lo):
                hi = lo
                lo /= 2.0
            if lo <= tol_abs and not feasible(lo):
                outward = np.array([t[1], -t[0]])
                return EdgeGeometry(
                    edge_index, h_e, delta, tol_abs, tol_abs / h_e, outward, t.copy(), True
                )
            while hi - lo > tol_abs:
                mid = 0.5 * (lo + hi)
                if feasible(mid):
                    lo = mid
                else:
                    hi = mid
            ell, flagged = lo, True
    outward = np.array([t[1], -t[0]])
    return EdgeGeometry(
        edge_index, h_e, delta, ell, ell / h_e, outward, t.copy(), flagged
    )


@dataclass
class ElementReport:
    """Shape diagnostics for one element."""

    edge_geometries: list[EdgeGeometry]
    n_edges: int
    gamma_min: float
    isotropic: bool
    area_bounds_ok: bool
    n_conv: Optional[int] = None


def check_assumptions(
    p: Polygon,
    gamma: float,
    max_edges: int = 8,
    tol: float = 1e-9,
    slack: float = 1e-9,
) -> ElementReport:
    """Isotropy verdict for one element.

    The element passes when it has at most ``max_edges`` edges and every
    edge supports an inward triangle of height at least ``gamma`` times
    its length (ratios above 1 count as 1: the triangle can always be
    shrunk).  For passing elements the area must sit between
    ``gamma_min * h^2 / (2 n^2)`` and ``pi * h^2``.
    """
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    geoms = [edge_heights(p, i, tol=tol) for i in range(p.n)]
    gamma_min = min(min(g.ratio, 1.0) for g in geoms)
    isotropic = p.n <= max_edges and gamma_min >= gamma - slack
    h2 = p.diameter**2
    lower = gamma_min * h2 / (2.0 * p.n**2)
    area_ok = lower * (1.0 - 1e-12) <= p.area <= np.pi * h2 * (1.0 + 1e-12)
    return ElementReport(geoms, p.n, gamma_min, isotropic, area_ok)


def _segment_gap(a0, a1, b0, b1) -> float:
    """Distance between two segments (0 when they cross or touch)."""
    eps = 0.0
    if _segments_cross(a0[None], a1[None], b0[None], b1[None], eps)[0, 0]:
        return 0.0

    def pt_seg(p, q0, q1):
        d = q1 - q0
        denom = float(d @ d)
        t = 0.0 if denom == 0.0 else float(np.clip((p - q0) @ d / denom, 0.0, 1.0))
        return float(np.hypot(*(p - (q0 + t * d))))

    return min(
        pt_seg(a0, b0, b1), pt_seg(a1, b0, b1), pt_seg(b0, a0, a1), pt_seg(b1, a0, a1)
    )


def polygons_touch(a: Polygon, b: Polygon, tol: float) -> bool:
    """Do the closed regions of two simple polygons intersect?

    True when a vertex of one lies in the other or when any pair of
    boundary edges comes within ``tol``.  Complete for simple polygons:
    disjoint boundaries with no mutual containment means no overlap.
    """
    if a.contains(b.vertices, tol).any() or b.contains(a.vertices, tol).any():
        return True
    va, vb = a.vertices, b.vertices
    na, nb = len(va), len(vb)
    for i in range(na):
        a0, a1 = va[i], va[(i + 1) % na]
        for j in range(nb):
            if _segment_gap(a0, a1, vb[j], vb[(j + 1) % nb]) <= tol:
                return True
    return False


def mesh_conv_counts(mesh) -> np.ndarray:
    """For each element, the number of elements (itself included) whose
    convex hull meets it; a bounding-box prefilter keeps this near-linear
    on structured meshes."""
    n = mesh.n_cells
    polys = [mesh.cell_polygon(i) for i in range(n)]
    hulls = [p if p.is_convex else convex_hull(p) for p in polys]
    boxes = np.array([[p.vertices.min(axis=0), p.vertices.max(axis=0)] for p in polys])
    hboxes = np.array([[h.vertices.min(axis=0), h.vertices.max(axis=0)] for h in hulls])
    tol = 1e-12 * max(p.diameter for p in polys)
    counts = np.zeros(n, dtype=int)
    for i in range(n):
        lo_i, hi_i = boxes[i]
        for j in range(n):
            lo_j, hi_j = hboxes[j]
            if np.any(lo_i > hi_j + tol) or np.any(lo_j > hi_i + tol):
                continue
            if polygons_touch(polys[i], hulls[j], tol):
                counts[i] += 1
    return counts
