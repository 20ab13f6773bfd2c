"""Mesh generation and file I/O on the unit-square domain.

Three families: uniform square grids, grids cut by one straight line
(each crossed square splits into two conforming cells, so triangles,
trapezoids, and pentagons of arbitrarily high aspect ratio appear), and
short-edge grids (an extra vertex on every interior vertical edge, so
cells gain one edge that can be made arbitrarily short while the shape
check still passes).

The file format is JSON:
{"version": 1, "vertices": [[x, y], ...], "cells": [[i, ...], ...],
 "boundary_vertices": [i, ...]}
with coordinates written in shortest round-trip decimal form.
"""
from __future__ import annotations

import json
import warnings
from typing import NamedTuple, Optional

import numpy as np

from .errors import ParseError, ValidationError
from .geometry import Polygon

MESH_FORMAT_VERSION = 1


class CutLine(NamedTuple):
    """Infinite line through two distinct points, used to slice a grid."""

    point_a: tuple[float, float]
    point_b: tuple[float, float]


class Mesh:
    """Polygonal partition of the domain: vertex table plus CCW cell loops."""

    def __init__(
        self,
        vertices,
        cells,
        boundary_vertices,
        notes: Optional[list[str]] = None,
        validate: bool = True,
        fix_orientation: bool = False,
    ):
        self.vertices = np.asarray(vertices, dtype=np.float64)
        self.cells = [list(map(int, c)) for c in cells]
        self.boundary_vertices = np.asarray(sorted(set(map(int, boundary_vertices))), dtype=int)
        self.notes: list[str] = list(notes) if notes else []
        self.reversed_cells: list[int] = []
        self._polys: dict[int, Polygon] = {}
        self._h: Optional[float] = None
        if validate:
            self.validate(fix_orientation=fix_orientation)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    def cell_polygon(self, i: int) -> Polygon:
        poly = self._polys.get(i)
        if poly is None:
            poly = Polygon(self.vertices[self.cells[i]])
            self._polys[i] = poly
        return poly

    @property
    def h(self) -> float:
        if self._h is None:
            self._h = max(self.cell_polygon(i).diameter for i in range(self.n_cells))
        return self._h

    def cell_areas(self) -> np.ndarray:
        return np.array([self.cell_polygon(i).area for i in range(self.n_cells)])

    @property
    def interior_vertices(self) -> np.ndarray:
        mask = np.ones(self.n_vertices, dtype=bool)
        mask[self.boundary_vertices] = False
        return np.nonzero(mask)[0]

    def validate(self, fix_orientation: bool = False) -> None:
        if not np.all(np.isfinite(self.vertices)):
            raise ValidationError("mesh has non-finite vertex coordinates")
        for ci, cell in enumerate(self.cells):
            if len(cell) < 3:
                raise ValidationError(f"cell {ci} has fewer than 3 vertices")
            if min(cell) < 0 or max(cell) >= self.n_vertices:
                raise ValidationError(f"cell {ci} references a missing vertex")
            v = self.vertices[cell]
            signed = 0.5 * float(
                np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1])
            )
            if signed < 0:
                if not fix_orientation:
                    raise ValidationError(f"cell {ci} is clockwise")
                self.cells[ci] = cell[::-1]
                self.reversed_cells.append(ci)
            try:
                self.cell_polygon(ci)
            except ValidationError as exc:
                raise ValidationError(f"cell {ci}: {exc}") from exc
        if self.reversed_cells:
            warnings.warn(
                f"reversed {len(self.reversed_cells)} clockwise cell(s) on ingestion",
                stacklevel=2,
            )
        seen: set[tuple[int, int]] = set()
        for ci, cell in enumerate(self.cells):
            m = len(cell)
            for k in range(m):
                edge = (cell[k], cell[(k + 1) % m])
                if edge in seen:
                    raise ValidationError(
                        f"directed edge {edge} appears twice; mesh is non-conforming"
                    )
                seen.add(edge)

    def check_tiling(self, expected_area: float, rtol: float = 1e-10) -> None:
        total = float(self.cell_areas().sum())
        if abs(total - expected_area) > rtol * expected_area:
            raise ValidationError(
                f"cells cover area {total!r}, expected {expected_area!r}"
            )


def _grid_arrays(n: int):
    xs = np.linspace(0.0, 1.0, n + 1)
    X, Y = np.meshgrid(xs, xs, indexing="xy")
    verts = np.column_stack([X.ravel(), Y.ravel()])

    def vid(i, j):
        return j * (n + 1) + i

    return verts, vid


def _boundary_ids(verts: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    on = (
        (np.abs(verts[:, 0]) <= tol)
        | (np.abs(verts[:, 0] - 1.0) <= tol)
        | (np.abs(verts[:, 1]) <= tol)
        | (np.abs(verts[:, 1] - 1.0) <= tol)
    )
    return np.nonzero(on)[0]


def square_grid(n: int) -> Mesh:
    """Uniform n x n grid of squares on the unit square."""
    if n < 1:
        raise ValueError("n must be >= 1")
    verts, vid = _grid_arrays(n)
    cells = [
        [vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)]
        for j in range(n)
        for i in range(n)
    ]
    mesh = Mesh(verts, cells, _boundary_ids(verts))
    mesh.check_tiling(1.0)
    return mesh


def short_edge_grid(n: int, fraction: float) -> Mesh:
    """Square grid with an extra vertex on every interior vertical edge.

    The vertex sits at relative position ``fraction`` above the lower
    end, so each such edge splits into pieces of length fraction/n and
    (1-fraction)/n while inward heights stay at the full cell width.
    """
    if not 0.0 < fraction <= 0.5:
        raise ValueError("fraction must lie in (0, 0.5]")
    if n < 1:
        raise ValueError("n must be >= 1")
    verts, vid = _grid_arrays(n)
    extra: dict[tuple[int, int], int] = {}
    vlist = [verts]
    next_id = len(verts)
    for i in range(1, n):
        for j in range(n):
            vlist.append(np.array([[i / n, (j + fraction) / n]]))
            extra[(i, j)] = next_id
            next_id += 1
    verts = np.vstack(vlist)

    cells = []
    for j in range(n):
        for i in range(n):
            ring = [vid(i, j), vid(i + 1, j)]
            if (i + 1, j) in extra:  # right edge, walking upward
                ring.append(extra[(i + 1, j)])
            ring += [vid(i + 1, j + 1), vid(i, j + 1)]
            if (i, j) in extra:  # left edge, walking downward
                ring.append(extra[(i, j)])
            cells.append(ring)
    mesh = Mesh(verts, cells, _boundary_ids(verts))
    mesh.check_tiling(1.0)
    return mesh


def _line_side(line: CutLine, pts: np.ndarray) -> np.ndarray:
    """Signed distance (up to scale) of points from the cut line."""
    a = np.asarray(line.point_a, dtype=float)
    b = np.asarray(line.point_b, dtype=float)
    d = b - a
    norm = float(np.hypot(*d))
    if norm == 0.0:
        raise ValueError("cut line endpoints coincide")
    d = d / norm
    rel = np.atleast_2d(pts) - a
    return d[0] * rel[:, 1] - d[1] * rel[:, 0]


def cut_grid(n: int, line: CutLine, snap_tol: float = 1e-9) -> Mesh:
    """Uniform grid sliced by one straight line.

    Every square the line passes through splits into two cells sharing
    the chord; cut points land on grid edges as new vertices shared by
    both neighbors, so the mesh stays conforming (cells not split can
    still gain a vertex on their boundary).  Intersection points within
    ``snap_tol / n`` of a grid vertex snap onto it.  Thin cells are kept
    as they are; only the snap tolerance guards against zero-area
    slivers.  A line coincident with a grid line leaves the grid uncut
    and records a notice.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    base = square_grid(n)
    a = np.asarray(line.point_a, dtype=float)
    b = np.asarray(line.point_b, dtype=float)
    d = b - a
    s = 1.0 / n
    snap_abs = snap_tol * s

    # coincidence with a grid line (grid lines are axis-aligned)
    for axis in (0, 1):
        if abs(d[1 - axis]) <= 1e-15 * np.hypot(*d):
            coord = a[1 - axis]
            k = round(coord * n)
            if 0 <= k <= n and abs(coord - k * s) <= snap_abs:
                mesh = square_grid(n)
                mesh.notes.append("cut line coincides with a grid line; grid left uncut")
                return mesh

    verts = list(map(np.ndarray.copy, base.vertices))
    nv = n + 1

    def vid(i, j):
        return j * nv + i

    side = _line_side(line, base.vertices)
    on_line = np.abs(side) <= snap_abs

    # intersection vertex on each grid edge interior (if any)
    edge_point: dict[tuple[int, int], int] = {}

    def visit_edge(v0: int, v1: int) -> None:
        s0, s1 = side[v0], side[v1]
        if on_line[v0] or on_line[v1]:
            return  # endpoint already counts as a cut point
        if s0 * s1 >= 0.0:
            return
        t = s0 / (s0 - s1)
        p = base.vertices[v0] + t * (base.vertices[v1] - base.vertices[v0])
        key = (v0, v1) if v0 < v1 else (v1, v0)
        edge_point[key] = len(verts)
        verts.append(p)

    for j in range(n + 1):
        for i in range(n):
            visit_edge(vid(i, j), vid(i + 1, j))
    for j in range(n):
        for i in range(n + 1):
            visit_edge(vid(i, j), vid(i, j + 1))

    def cut_id(v0: int, v1: int) -> Optional[int]:
        key = (v0, v1) if v0 < v1 else (v1, v0)
        return edge_point.get(key)

    cells = []
    for j in range(n):
        for i in range(n):
            corners = [vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)]
            ring: list[int] = []
            for k in range(4):
                c0, c1 = corners[k], corners[(k + 1) % 4]
                ring.append(c0)
                mid = cut_id(c0, c1)
                if mid is not None:
                    ring.append(mid)
            cut_pos = [
                p
                for p, v in enumerate(ring)
                if (v >= len(base.vertices)) or on_line[v]
            ]
            if len(cut_pos) == 2:
                pa, pb = cut_pos
                qa = np.asarray(verts[ring[pa]])
                qb = np.asarray(verts[ring[pb]])
                mid = 0.5 * (qa + qb)
                x0, y0 = i * s, j * s
                # midpoint strictly inside the cell; a midpoint on the
                # boundary means the chord runs along a side (no split)
                interior = (
                    x0 + snap_abs < mid[0] < x0 + s - snap_abs
                    and y0 + snap_abs < mid[1] < y0 + s - snap_abs
                )
                chord_len = float(np.hypot(*(qb - qa)))
                if interior and chord_len > snap_abs:
                    loop1 = ring[pa : pb + 1]
                    loop2 = ring[pb:] + ring[: pa + 1]
                    if len(loop1) >= 3 and len(loop2) >= 3:
                        cells.append(loop1)
                        cells.append(loop2)
                        continue
            cells.append(ring)

    verts_arr = np.vstack([np.atleast_2d(v) for v in verts])
    mesh = Mesh(verts_arr, cells, _boundary_ids(verts_arr))
    mesh.check_tiling(1.0)
    return mesh


def write_mesh(path, mesh: Mesh) -> None:
    payload = {
        "version": MESH_FORMAT_VERSION,
        "vertices": [[float(x), float(y)] for x, y in mesh.vertices],
        "cells": [list(map(int, c)) for c in mesh.cells],
        "boundary_vertices": [int(i) for i in mesh.boundary_vertices],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def read_mesh(path) -> Mesh:
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(payload, dict):
        raise ParseError(f"{path}: top-level JSON object expected")
    for key in ("version", "vertices", "cells", "boundary_vertices"):
        if key not in payload:
            raise ParseError(f"{path}: missing field {key!r}")
    if payload["version"] != MESH_FORMAT_VERSION:
        raise ParseError(f"{path}: unsupported format version {payload['version']!r}")
    try:
        vertices = np.asarray(payload["vertices"], dtype=np.float64)
        if vertices.ndim != 2 or vertices.shape[1] != 2:
            raise ParseError(f"{path}: 'vertices' must be a list of [x, y] pairs")
        cells = [list(map(int, c)) for c in payload["cells"]]
        boundary = list(map(int, payload["boundary_vertices"]))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return Mesh(vertices, cells, boundary, validate=True, fix_orientation=True)
