"""Pure numpy implementation of the per-element hot kernels.

This is the fallback twin of the compiled module `_speedups`; the two
must stay interchangeable.  See `core` for the selection logic.

Kernel contract (verts is an (n, 2) float64 CCW vertex loop):

* element_arrays(verts) -> (area, diameter, grads, consts, vertex_values)
  grads[i] is the constant gradient of the projected basis function i,
  consts[i] its additive constant, and vertex_values[j, i] its value at
  vertex j.  The projection is the H1-seminorm-orthogonal projection
  onto affine functions, pinned by a zero boundary-integral mismatch;
  both boundary integrals are edge-wise trapezoid sums, exact because
  traces are affine per edge.
* stab_matrix(verts, vertex_values, kind) -> (n, n) stabilization acting
  on raw vertex dofs, with the (I - projection) slice built in.
  kind: 0 endpoint-difference, 1 scaled edge L2, 2 vertex values,
  3 tangential derivative.
* apex_feasible(local_verts, h_e, ell, xs, tol) -> bool: does a triangle
  with base [0, h_e] x {0} and apex (x, ell) for some x in xs fit inside
  the polygon given in edge-local coordinates?
"""
from __future__ import annotations

import numpy as np

STAB_BROKEN_HALF = 0
STAB_L2_EDGE = 1
STAB_DOF = 2
STAB_TANGENTIAL = 3


def element_arrays(verts: np.ndarray):
    verts = np.asarray(verts, dtype=np.float64)
    n = len(verts)
    d = np.roll(verts, -1, axis=0) - verts  # edge vectors
    h = np.hypot(d[:, 0], d[:, 1])
    area = 0.5 * float(
        np.sum(verts[:, 0] * np.roll(verts[:, 1], -1) - np.roll(verts[:, 0], -1) * verts[:, 1])
    )
    diff = verts[:, None, :] - verts[None, :, :]
    diameter = float(np.sqrt((diff * diff).sum(axis=2).max()))

    # h_e * outward normal of each edge (CCW loop: rotate tangent by -90deg)
    hn = np.column_stack([d[:, 1], -d[:, 0]])
    grads = (hn + np.roll(hn, 1, axis=0)) / (2.0 * area)

    perim = float(h.sum())
    midpoints = verts + 0.5 * d
    edge_moment = (h[:, None] * midpoints).sum(axis=0)
    bint = 0.5 * (h + np.roll(h, 1))  # boundary integral of each basis trace
    consts = (bint - grads @ edge_moment) / perim

    vertex_values = verts @ grads.T + consts[None, :]
    return area, diameter, grads, consts, vertex_values


def consistency_matrix(area: float, grads: np.ndarray) -> np.ndarray:
    return area * (grads @ grads.T)


def stab_matrix(verts: np.ndarray, vertex_values: np.ndarray, kind: int) -> np.ndarray:
    verts = np.asarray(verts, dtype=np.float64)
    n = len(verts)
    w = np.eye(n) - vertex_values  # sliced basis values at vertices
    if kind == STAB_DOF:
        return w.T @ w
    dvec = np.roll(verts, -1, axis=0) - verts
    h = np.hypot(dvec[:, 0], dvec[:, 1])
    dw = np.roll(w, -1, axis=0) - w  # per-edge endpoint differences
    if kind == STAB_BROKEN_HALF:
        return dw.T @ dw
    if kind == STAB_TANGENTIAL:
        return dw.T @ (dw / h[:, None])
    if kind == STAB_L2_EDGE:
        # edge mass scaled by 1/h_e; the edge length cancels
        wa, wb = w, np.roll(w, -1, axis=0)
        s = (2.0 * wa.T @ wa + wa.T @ wb + wb.T @ wa + 2.0 * wb.T @ wb) / 6.0
        return 0.5 * (s + s.T)
    raise ValueError(f"unknown stabilization kind {kind}")


def points_in_polygon(verts: np.ndarray, pts: np.ndarray, tol: float) -> np.ndarray:
    """Closed membership test: inside or within tol of the boundary."""
    verts = np.asarray(verts, dtype=np.float64)
    pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
    a = verts
    b = np.roll(verts, -1, axis=0)
    px = pts[:, 0][:, None]
    py = pts[:, 1][:, None]
    ax, ay = a[:, 0][None, :], a[:, 1][None, :]
    bx, by = b[:, 0][None, :], b[:, 1][None, :]

    # crossing-number parity on edges (half-open in y to avoid double counts)
    cond = (ay <= py) != (by <= py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xin = ax + (py - ay) * (bx - ax) / (by - ay)
    crossings = np.where(cond & (px < xin), 1, 0).sum(axis=1)
    inside = (crossings % 2) == 1

    # distance to boundary for the closed test
    ex = bx - ax
    ey = by - ay
    ee = ex * ex + ey * ey
    t = np.clip(((px - ax) * ex + (py - ay) * ey) / ee, 0.0, 1.0)
    dx = px - (ax + t * ex)
    dy = py - (ay + t * ey)
    dist = np.sqrt((dx * dx + dy * dy).min(axis=1))
    return inside | (dist <= tol)


def _segments_cross(p0, p1, q0, q1, eps) -> np.ndarray:
    """Vectorized strict (proper) segment crossing test.

    p0, p1: (m, 2) arrays; q0, q1: (k, 2) arrays; result (m, k) bool.
    Touching at endpoints or collinear overlap does not count; any
    orientation within eps of zero is treated as a touch, so eps must
    scale like coordinates squared.
    """
    p0 = np.atleast_2d(p0)[:, None, :]
    p1 = np.atleast_2d(p1)[:, None, :]
    q0 = np.atleast_2d(q0)[None, :, :]
    q1 = np.atleast_2d(q1)[None, :, :]

    def sign(a, b, c):
        o = (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (
            b[..., 1] - a[..., 1]
        ) * (c[..., 0] - a[..., 0])
        return np.where(o > eps, 1, 0) - np.where(o < -eps, 1, 0)

    s1 = sign(p0, p1, q0)
    s2 = sign(p0, p1, q1)
    s3 = sign(q0, q1, p0)
    s4 = sign(q0, q1, p1)
    return (s1 * s2 < 0) & (s3 * s4 < 0)


def apex_feasible(local_verts: np.ndarray, h_e: float, ell: float, xs: np.ndarray, tol: float) -> bool:
    local_verts = np.asarray(local_verts, dtype=np.float64)
    xs = np.asarray(xs, dtype=np.float64)
    base_a = np.array([0.0, 0.0])
    base_b = np.array([h_e, 0.0])
    apexes = np.column_stack([xs, np.full(len(xs), ell)])

    # interior probes: apex, side midpoints, centroid
    probes = np.concatenate(
        [
            apexes,
            0.5 * (apexes + base_a),
            0.5 * (apexes + base_b),
            (apexes + base_a + base_b) / 3.0,
        ]
    )
    ok = points_in_polygon(local_verts, probes, tol).reshape(4, len(xs)).all(axis=0)
    if not ok.any():
        return False

    q0 = local_verts
    q1 = np.roll(local_verts, -1, axis=0)
    scale = max(h_e, ell, float(np.abs(local_verts).max()))
    eps = 1e-11 * scale * scale
    left = _segments_cross(np.broadcast_to(base_a, apexes.shape), apexes, q0, q1, eps)
    right = _segments_cross(np.broadcast_to(base_b, apexes.shape), apexes, q0, q1, eps)
    clean = ~(left.any(axis=1) | right.any(axis=1))
    return bool((ok & clean).any())
