"""Numerical verification of trace and Poincare-type inequalities.

Each inequality compares two functionals of a function v.  The supremum
of the ratio over a polynomial sample space is computed through a
generalized eigenproblem on Gram matrices (with the denominator's null
space, typically the constants, deflated away), cross-checked by seeded
random sampling.  Where an inequality carries an explicit constant the
verdict compares against it; where only uniform boundedness is claimed,
the test sweeps a geometric family (strips of thickness h, h/2, ...,
h/128), asserts a frozen regression bound, and records the observed
ratios.

Gram matrices are exact: Legendre-product bases keep them well
conditioned, domains are integrated with rules exact past twice the
polynomial degree, and edge 1/2-seminorms use the divided-difference
form of the difference quotient, which is itself a polynomial.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from . import halfnorm
from .geometry import Polygon
from .quadrature import _duffy_rule, gauss01, map_rule_to_triangle, ear_clip

P = np.polynomial.polynomial


@dataclass
class InequalityResult:
    """Outcome of one inequality check."""

    name: str
    max_ratio: float
    bound: float
    satisfied: bool
    n_samples: int
    params: dict = field(default_factory=dict)


def _result(name, max_ratio, bound, n_samples, **params) -> InequalityResult:
    ok = bool(max_ratio <= bound * (1.0 + 1e-8))
    extra = params.pop("extra_ok", True)
    return InequalityResult(name, float(max_ratio), float(bound), ok and extra, n_samples, params)


# ---------------------------------------------------------------------------
# polynomial spaces with exact Gram matrices


def _leg_coeffs(k: int) -> np.ndarray:
    c = np.zeros(k + 1)
    c[k] = 1.0
    return np.polynomial.legendre.leg2poly(c)


class PolySpace:
    """Total-degree polynomial space on a 2-D domain.

    Basis functions are products of Legendre polynomials in coordinates
    centered and scaled per axis to roughly [-1, 1] (anisotropic scaling
    keeps Gram matrices well conditioned on thin domains); each is
    stored as a monomial coefficient matrix in those local coordinates.
    """

    def __init__(self, pts: np.ndarray, wts: np.ndarray, degree: int,
                 center: np.ndarray, scale):
        self.pts = pts
        self.wts = wts
        self.degree = degree
        self.center = np.asarray(center, dtype=float)
        self.scale = np.broadcast_to(np.asarray(scale, dtype=float), (2,)).copy()
        self.exps = [(a, b) for total in range(degree + 1) for a in range(total + 1)
                     for b in [total - a]]
        self.coeff_mats = []
        for a, b in self.exps:
            ca = _leg_coeffs(a)
            cb = _leg_coeffs(b)
            mat = np.zeros((degree + 1, degree + 1))
            mat[: len(ca), : len(cb)] = np.outer(ca, cb)
            self.coeff_mats.append(mat)
        self.nb = len(self.coeff_mats)
        self._local = (self.pts - self.center) / self.scale
        self._vals = np.column_stack(
            [P.polyval2d(self._local[:, 0], self._local[:, 1], m) for m in self.coeff_mats]
        )
        gx = []
        gy = []
        for m in self.coeff_mats:
            gx.append(P.polyval2d(self._local[:, 0], self._local[:, 1], P.polyder(m, axis=0)))
            gy.append(P.polyval2d(self._local[:, 0], self._local[:, 1], P.polyder(m, axis=1)))
        self._gx = np.column_stack(gx) / self.scale[0]
        self._gy = np.column_stack(gy) / self.scale[1]

    def mass(self) -> np.ndarray:
        return (self._vals * self.wts[:, None]).T @ self._vals

    def stiffness(self) -> np.ndarray:
        return (self._gx * self.wts[:, None]).T @ self._gx + (
            self._gy * self.wts[:, None]
        ).T @ self._gy

    def moments(self) -> np.ndarray:
        return self.wts @ self._vals

    def trace_coeffs(self, p0, p1) -> np.ndarray:
        """1-D ascending coefficients of each basis trace on segment
        p0 -> p1, in the unit parametrization."""
        p0 = (np.asarray(p0, dtype=float) - self.center) / self.scale
        p1 = (np.asarray(p1, dtype=float) - self.center) / self.scale
        u = np.array([p0[0], p1[0] - p0[0]])
        w = np.array([p0[1], p1[1] - p0[1]])
        upows = [np.array([1.0])]
        wpows = [np.array([1.0])]
        for _ in range(self.degree):
            upows.append(P.polymul(upows[-1], u))
            wpows.append(P.polymul(wpows[-1], w))
        out = np.zeros((self.nb, self.degree + 1))
        for idx, mat in enumerate(self.coeff_mats):
            acc = np.zeros(self.degree + 1)
            for a in range(mat.shape[0]):
                for b in range(mat.shape[1]):
                    c = mat[a, b]
                    if c != 0.0:
                        piece = c * P.polymul(upows[a], wpows[b])
                        acc[: len(piece)] += piece
            out[idx] = acc
        return out


def rect_space(x0, x1, y0, y1, degree) -> PolySpace:
    gx, wx = gauss01(degree + 1)
    gy, wy = gauss01(degree + 1)
    X, Y = np.meshgrid(x0 + (x1 - x0) * gx, y0 + (y1 - y0) * gy, indexing="ij")
    W = np.outer(wx * (x1 - x0), wy * (y1 - y0))
    pts = np.column_stack([X.ravel(), Y.ravel()])
    center = np.array([(x0 + x1) / 2.0, (y0 + y1) / 2.0])
    scale = np.array([(x1 - x0) / 2.0, (y1 - y0) / 2.0])
    return PolySpace(pts, W.ravel(), degree, center, scale)


def polygon_space(verts: np.ndarray, degree: int) -> PolySpace:
    verts = np.asarray(verts, dtype=float)
    ref_pts, ref_wts = _duffy_rule(2 * degree)
    pts = []
    wts = []
    for i, j, k in ear_clip(verts):
        p, w = map_rule_to_triangle(verts[[i, j, k]], ref_pts, ref_wts)
        pts.append(p)
        wts.append(w)
    pts = np.vstack(pts)
    wts = np.concatenate(wts)
    center = 0.5 * (verts.max(axis=0) + verts.min(axis=0))
    scale = np.maximum(0.5 * (verts.max(axis=0) - verts.min(axis=0)), 1e-30)
    return PolySpace(pts, wts, degree, center, scale)


def edge_half_gram(space: PolySpace, p0, p1, n_quad: int = 24) -> np.ndarray:
    coeffs = space.trace_coeffs(p0, p1)
    s, w = gauss01(n_quad)
    q = np.stack([halfnorm._diffquot_values(c, s, s) for c in coeffs])
    qw = q * w[None, :, None] * w[None, None, :]
    return np.einsum("iab,jab->ij", qw, q)


def edge_mass_gram(space: PolySpace, p0, p1, n_quad: int = 24) -> np.ndarray:
    coeffs = space.trace_coeffs(p0, p1)
    s, w = gauss01(n_quad)
    length = float(np.linalg.norm(np.asarray(p1, dtype=float) - np.asarray(p0)))
    vals = np.column_stack([P.polyval(s, c) for c in coeffs])
    return length * (vals * w[:, None]).T @ vals


def edge_moments(space: PolySpace, p0, p1, n_quad: int = 24) -> np.ndarray:
    coeffs = space.trace_coeffs(p0, p1)
    s, w = gauss01(n_quad)
    length = float(np.linalg.norm(np.asarray(p1, dtype=float) - np.asarray(p0)))
    vals = np.column_stack([P.polyval(s, c) for c in coeffs])
    return length * (w @ vals)


# ---------------------------------------------------------------------------
# Rayleigh machinery


def max_rayleigh(num: np.ndarray, den: np.ndarray, drop_tol: float = 1e-10) -> float:
    """sqrt of the largest generalized eigenvalue of (num, den) on the
    positive subspace of den (its null directions are deflated away)."""
    evals, vecs = scipy.linalg.eigh(0.5 * (den + den.T))
    keep = evals > drop_tol * evals.max()
    white = vecs[:, keep] / np.sqrt(evals[keep])
    reduced = white.T @ (0.5 * (num + num.T)) @ white
    lam = scipy.linalg.eigvalsh(reduced)
    return math.sqrt(max(float(lam[-1]), 0.0))


def sample_max_ratio(num, den, n_samples, rng, drop_tol: float = 1e-10) -> float:
    evals, vecs = scipy.linalg.eigh(0.5 * (den + den.T))
    keep = evals > drop_tol * evals.max()
    white = vecs[:, keep] / np.sqrt(evals[keep])
    best = 0.0
    for _ in range(n_samples):
        y = rng.standard_normal(white.shape[1])
        x = white @ y
        val = float(x @ num @ x) / float(y @ y)
        best = max(best, val)
    return math.sqrt(max(best, 0.0))


def _restrict(mats, constraint: np.ndarray):
    """Restrict quadratic forms to the null space of one linear functional."""
    q = scipy.linalg.null_space(np.atleast_2d(constraint))
    return [q.T @ m @ q for m in mats], q


# ---------------------------------------------------------------------------
# trace inequalities


def trace_reference(n_samples: int = 1000, degree: int = 6, seed: int = 42) -> InequalityResult:
    """Edge 1/2-seminorm against the H1-seminorm on the right triangle
    (0,0), (1,0), (1,1) with the hypotenuse as the edge; constant 2.

    The classical constant 2 is stated for the pair-averaged seminorm
    (half the ordered double integral): under that convention the
    degree-6 sup comes out near 1.87. Under the ordered-pair convention
    used by the stabilization identity elsewhere in this package every
    value is exactly sqrt(2) larger, the affine subfamily already
    attains 2.0 (take v = x + y), and the sup is near 2.65; that value
    is reported alongside.  The verdict is keyed to the convention under
    which the quoted constant holds.
    """
    tri = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
    space = polygon_space(tri, degree)
    num = edge_half_gram(space, tri[0], tri[2])
    den = space.stiffness()
    ratio = max_rayleigh(num, den)
    rng = np.random.default_rng(seed)
    sampled = sample_max_ratio(num, den, n_samples, rng)
    ordered = max(ratio, sampled)
    paired = ordered / math.sqrt(2.0)
    return _result(
        "trace_reference", paired, 2.0, n_samples,
        eigen_ratio_ordered=ratio, sampled_ratio_ordered=sampled, degree=degree,
        ratio_ordered_pairs=ordered,
        normalization="pair-averaged (ordered-pair value is sqrt(2) larger)",
    )


def _base_triangle(h: float, ell: float) -> np.ndarray:
    return np.array([[0.0, 0.0], [h, 0.0], [0.5 * h, ell]])


def trace_scaled(
    heights: Optional[list[float]] = None,
    h: float = 1.0,
    degree: int = 6,
    n_samples: int = 200,
    seed: int = 42,
) -> InequalityResult:
    """Edge 1/2-seminorm on the base of a triangle of height ell,
    against C * sqrt(h/ell + ell/h) times the H1-seminorm, with
    C = 2*sqrt(2) from the reference-triangle mapping chain."""
    if heights is None:
        heights = [h * 2.0**-k for k in range(8)]
    c_ref = 2.0 * math.sqrt(2.0)
    rng = np.random.default_rng(seed)
    ratios = []
    margins = []
    for ell in heights:
        tri = _base_triangle(h, ell)
        space = polygon_space(tri, degree)
        num = edge_half_gram(space, tri[0], tri[1])
        den = space.stiffness()
        ratio = max(max_rayleigh(num, den), sample_max_ratio(num, den, n_samples, rng))
        bound = c_ref * math.sqrt(h / ell + ell / h)
        ratios.append(ratio)
        margins.append(ratio / bound)
    return _result(
        "trace_scaled", max(margins), 1.0, n_samples,
        heights=list(heights), ratios=ratios, reference_constant=c_ref,
    )


def trace_l2(
    heights: Optional[list[float]] = None,
    h: float = 1.0,
    degree: int = 5,
    n_samples: int = 200,
    seed: int = 42,
    bound: float = 2.0,
) -> InequalityResult:
    """Edge L2 norm against l^-1/2 ||v|| + (l^1/2 + l^-1/2 h) ||grad v||
    on the inward triangle; asserts one uniform constant over the
    thinning family (the bound is a frozen regression constant)."""
    if heights is None:
        heights = [h * 2.0**-k for k in range(8)]
    rng = np.random.default_rng(seed)
    ratios = []
    sampled = []
    for ell in heights:
        tri = _base_triangle(h, ell)
        space = polygon_space(tri, degree)
        num = edge_mass_gram(space, tri[0], tri[1])
        mass = space.mass()
        stiff = space.stiffness()
        wgrad = (math.sqrt(ell) + h / math.sqrt(ell)) ** 2
        relax = mass / ell + wgrad * stiff
        ratios.append(max_rayleigh(num, relax))
        # true composite-denominator ratio on random samples
        best = 0.0
        for _ in range(n_samples):
            x = rng.standard_normal(space.nb)
            a = math.sqrt(max(float(x @ mass @ x), 0.0) / ell)
            b = math.sqrt(wgrad * max(float(x @ stiff @ x), 0.0))
            if a + b > 0:
                best = max(best, math.sqrt(max(float(x @ num @ x), 0.0)) / (a + b))
        sampled.append(best)
    spread = max(ratios) / min(ratios)
    return _result(
        "trace_l2", max(ratios), bound, n_samples,
        heights=list(heights), ratios=ratios, sampled=sampled, spread=spread,
    )


# ---------------------------------------------------------------------------
# Poincare-type inequalities


def _centered_mass(space: PolySpace, region_moments: np.ndarray, region_area: float) -> np.ndarray:
    """Gram of ||v - mean_region(v)||^2 over the space's own domain."""
    m_dom = space.moments()
    mass = space.mass()
    m_reg = region_moments / region_area
    dom_area = float(space.wts.sum())
    return (
        mass
        - np.outer(m_dom, m_reg)
        - np.outer(m_reg, m_dom)
        + dom_area * np.outer(m_reg, m_reg)
    )


def poincare_convex_mean(degree: int = 6, n_samples: int = 1000, seed: int = 42) -> InequalityResult:
    """Mean-zero Poincare constant on the unit square: at most
    diameter/pi; the sharp value 1/pi comes from the first nonzero
    Neumann eigenvalue pi^2."""
    space = rect_space(0.0, 1.0, 0.0, 1.0, degree)
    num = _centered_mass(space, space.moments(), 1.0)
    den = space.stiffness()
    ratio = max_rayleigh(num, den)
    rng = np.random.default_rng(seed)
    sampled = sample_max_ratio(num, den, n_samples, rng)
    h_s = math.sqrt(2.0)
    return _result(
        "poincare_convex_mean", max(ratio, sampled), h_s / math.pi, n_samples,
        eigen_ratio=ratio, neumann_oracle=1.0 / math.pi,
        oracle_rel_err=abs(ratio - 1.0 / math.pi) * math.pi,
    )


def poincare_subset_mean(
    degree: int = 6, n_samples: int = 500, seed: int = 42, side: float = 0.5
) -> InequalityResult:
    """Average over a sub-square instead of the whole square; constant
    (1 + sqrt(|S|/|w|)) * h_S / pi."""
    space = rect_space(0.0, 1.0, 0.0, 1.0, degree)
    sub = rect_space(0.0, side, 0.0, side, degree)
    sub_moms = _cross_moments(space, sub)
    num = _centered_mass(space, sub_moms, side * side)
    den = space.stiffness()
    ratio = max(max_rayleigh(num, den),
                sample_max_ratio(num, den, n_samples, np.random.default_rng(seed)))
    bound = (1.0 + 1.0 / side) * math.sqrt(2.0) / math.pi
    return _result("poincare_subset_mean", ratio, bound, n_samples, side=side)


def _cross_moments(space: PolySpace, region: PolySpace) -> np.ndarray:
    """Integrals of the space's basis over another domain's rule."""
    local = (region.pts - space.center) / space.scale
    vals = np.column_stack(
        [P.polyval2d(local[:, 0], local[:, 1], m) for m in space.coeff_mats]
    )
    return region.wts @ vals


class EdgeSpace:
    """1-D Legendre polynomial space on a segment of given length."""

    def __init__(self, length: float, degree: int):
        self.length = float(length)
        self.degree = degree
        self.coeffs = []
        for k in range(degree + 1):
            full = np.zeros(degree + 1)
            c = _leg_coeffs(k)
            full[: len(c)] = c
            self.coeffs.append(full)
        self.nb = len(self.coeffs)

    def mass(self, n_quad: int = 24) -> np.ndarray:
        s, w = gauss01(n_quad)
        vals = np.column_stack([P.polyval(s, c) for c in self.coeffs])
        return self.length * (vals * w[:, None]).T @ vals

    def half_gram(self, n_quad: int = 24) -> np.ndarray:
        s, w = gauss01(n_quad)
        q = np.stack([halfnorm._diffquot_values(c, s, s) for c in self.coeffs])
        qw = q * w[None, :, None] * w[None, None, :]
        return np.einsum("iab,jab->ij", qw, q)

    def moments(self, n_quad: int = 24) -> np.ndarray:
        s, w = gauss01(n_quad)
        vals = np.column_stack([P.polyval(s, c) for c in self.coeffs])
        return self.length * (w @ vals)


def poincare_boundary_mean(
    degree: int = 6, n_samples: int = 500, seed: int = 42,
    lengths: tuple = (0.5, 1.0, 2.0),
) -> InequalityResult:
    """Mean-zero trace on a straight edge: L2 norm at most
    sqrt(edge length) times the edge 1/2-seminorm (constant 1)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    per_length = []
    for length in lengths:
        es = EdgeSpace(length, degree)
        mass = es.mass()
        half = es.half_gram()
        (mass_r, half_r), _ = _restrict([mass, half], es.moments())
        ratio = max(max_rayleigh(mass_r, half_r),
                    sample_max_ratio(mass_r, half_r, n_samples, rng))
        per_length.append(ratio / math.sqrt(length))
        worst = max(worst, ratio / math.sqrt(length))
    return _result(
        "poincare_boundary_mean", worst, 1.0, n_samples, lengths=list(lengths),
        normalized_ratios=per_length,
    )


# ---------------------------------------------------------------------------
# piecewise-polynomial boundary traces


def _test_polygons() -> list[Polygon]:
    pentagon = Polygon(
        [(math.cos(a), math.sin(a)) for a in np.linspace(0, 2 * math.pi, 6)[:-1]]
    )
    hexagon = Polygon([(0, 0), (1.3, 0.1), (1.9, 0.8), (1.2, 1.4), (0.4, 1.3), (-0.2, 0.6)])
    square = Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    return [square, pentagon, hexagon]


class BoundaryTraceSpace:
    """Continuous piecewise-degree-p trace space on a polygon boundary.

    Dofs: one value per vertex plus p-1 bubble coefficients per edge.
    trace_maps[k] sends a dof vector to ascending 1-D coefficients of
    the trace on edge k in its unit parametrization.
    """

    def __init__(self, poly: Polygon, p: int):
        self.poly = poly
        self.p = p
        n = poly.n
        self.n_dofs = n + n * (p - 1)
        self.trace_maps = []
        bubbles = []
        for q in range(2, p + 1):
            # t^(q-2) * t * (1-t): vanishes at both ends
            bub = P.polymul(np.array([0.0, 1.0]) , np.array([1.0, -1.0]))
            for _ in range(q - 2):
                bub = P.polymul(bub, np.array([0.0, 1.0]))
            bubbles.append(bub)
        for k in range(n):
            m = np.zeros((p + 1, self.n_dofs))
            a, b = k, (k + 1) % n
            m[0, a] += 1.0
            m[1, a] += -1.0
            m[1, b] += 1.0
            for j, bub in enumerate(bubbles):
                col = n + k * (p - 1) + j
                m[: len(bub), col] = bub
            self.trace_maps.append(m)

    def edge_lengths(self) -> np.ndarray:
        return self.poly.edge_lengths

    def broken_half_gram(self, n_quad: int = 24) -> np.ndarray:
        s, w = gauss01(n_quad)
        total = np.zeros((self.n_dofs, self.n_dofs))
        for m in self.trace_maps:
            q = np.stack([halfnorm._diffquot_values(c, s, s) for c in m.T])
            qw = q * w[None, :, None] * w[None, None, :]
            total += np.einsum("iab,jab->ij", qw, q)
        return total

    def edge_mass(self, k: int, n_quad: int = 24) -> np.ndarray:
        s, w = gauss01(n_quad)
        vals = np.column_stack([P.polyval(s, c) for c in self.trace_maps[k].T])
        return float(self.edge_lengths()[k]) * (vals * w[:, None]).T @ vals

    def mean_functional(self, n_quad: int = 24) -> np.ndarray:
        s, w = gauss01(n_quad)
        out = np.zeros(self.n_dofs)
        for k, m in enumerate(self.trace_maps):
            vals = np.column_stack([P.polyval(s, c) for c in m.T])
            out += float(self.edge_lengths()[k]) * (w @ vals)
        return out

    def max_abs_at_vertices(self, dofs: np.ndarray) -> float:
        return float(np.abs(dofs[: self.poly.n]).max())


def poincare_broken_half(
    p: int = 1, n_quad: int = 24, n_samples: int = 1000, seed: int = 42,
    bound: Optional[float] = None,
) -> InequalityResult:
    """Edge L2 norm of a mean-zero piecewise-degree-p boundary trace
    against sqrt(edge count) * sqrt(edge length) times the broken
    1/2-seminorm.  For p = 1 the walking-path proof gives the constant
    exactly 1; for higher p only boundedness is claimed and the bound is
    a frozen regression constant."""
    if bound is None:
        bound = 1.0 if p == 1 else 1.5
    rng = np.random.default_rng(seed)
    worst = 0.0
    per_poly = []
    n_total = 0
    for poly in _test_polygons():
        ts = BoundaryTraceSpace(poly, p)
        dhalf = ts.broken_half_gram(n_quad)
        mean = ts.mean_functional()
        n = poly.n
        poly_worst = 0.0
        for k in range(n):
            num = ts.edge_mass(k, n_quad)
            den = n * float(ts.edge_lengths()[k]) * dhalf
            (num_r, den_r), _ = _restrict([num, den], mean)
            ratio = max(max_rayleigh(num_r, den_r),
                        sample_max_ratio(num_r, den_r, n_samples // max(n, 1), rng))
            poly_worst = max(poly_worst, ratio)
            n_total += n_samples // max(n, 1)
        per_poly.append(poly_worst)
        worst = max(worst, poly_worst)
    return _result(
        "poincare_broken_half_p%d" % p, worst, bound, n_total, p=p, per_polygon=per_poly,
    )


def sup_half_equivalence(
    n_samples: int = 1000, seed: int = 42,
    low_bound: float = 0.1, high_bound: float = 1.2,
) -> InequalityResult:
    """For mean-zero piecewise-affine boundary traces the sup norm and
    the broken 1/2-seminorm are equivalent; reports the observed ratio
    interval over random samples (bounds are frozen regression values)."""
    rng = np.random.default_rng(seed)
    lo, hi = math.inf, 0.0
    for poly in _test_polygons():
        ts = BoundaryTraceSpace(poly, 1)
        dhalf = ts.broken_half_gram()
        mean = ts.mean_functional()
        q = scipy.linalg.null_space(np.atleast_2d(mean))
        for _ in range(n_samples // 3):
            dofs = q @ rng.standard_normal(q.shape[1])
            denom = math.sqrt(max(float(dofs @ dhalf @ dofs), 0.0))
            if denom < 1e-14:
                continue
            r = ts.max_abs_at_vertices(dofs) / denom
            lo = min(lo, r)
            hi = max(hi, r)
    extra_ok = lo >= low_bound
    return _result(
        "sup_half_equivalence", hi, high_bound, n_samples,
        min_ratio=lo, min_bound=low_bound, extra_ok=extra_ok,
    )


def poincare_edge_mean(
    heights: Optional[list[float]] = None,
    degree: int = 5,
    n_samples: int = 200,
    seed: int = 42,
    bound: float = 1.0,
) -> InequalityResult:
    """Mean-zero-on-an-edge Poincare inequality on the inward trapezoid:
    ||v - mean_e(v)|| over (l h)^1/2 |v|_{1/2,e} + l ||grad v||, swept
    over thinning trapezoids (frozen regression bound)."""
    if heights is None:
        heights = [2.0**-k for k in range(8)]
    rng = np.random.default_rng(seed)
    ratios = []
    for ell in heights:
        trap = np.array([[0.0, 0.0], [1.0, 0.0], [0.75, ell], [0.25, ell]])
        space = polygon_space(trap, degree)
        mass = space.mass()
        stiff = space.stiffness()
        half = edge_half_gram(space, trap[0], trap[1])
        e_mom = edge_moments(space, trap[0], trap[1])
        num = _centered_mass(space, e_mom, 1.0)  # edge length is 1
        relax = ell * 1.0 * half + ell * ell * stiff
        ratios.append(max_rayleigh(num, relax))
    spread = max(ratios) / min(ratios)
    return _result(
        "poincare_edge_mean", max(ratios), bound, n_samples,
        heights=list(heights), ratios=ratios, spread=spread,
    )


def poincare_aniso_cut(
    heights: Optional[list[float]] = None,
    degree: int = 6,
    n_samples: int = 200,
    seed: int = 42,
    bound: float = 0.5,
    max_spread: float = 2.0,
) -> InequalityResult:
    """Poincare inequality with the average taken over a thin horizontal
    strip of the unit square: ||v - mean_K(v)||_S over h_S ||grad v||_S
    must stay bounded independently of the strip thickness."""
    if heights is None:
        heights = [2.0**-k for k in range(8)]
    h_s = math.sqrt(2.0)
    space = rect_space(0.0, 1.0, 0.0, 1.0, degree)
    den = h_s * h_s * space.stiffness()
    rng = np.random.default_rng(seed)
    ratios = []
    for ell in heights:
        strip = rect_space(0.0, 1.0, 0.0, ell, degree)
        moms = _cross_moments(space, strip)
        num = _centered_mass(space, moms, ell)
        ratio = max(max_rayleigh(num, den),
                    sample_max_ratio(num, den, n_samples, rng))
        ratios.append(ratio)
    spread = max(ratios) / min(ratios)
    return _result(
        "poincare_aniso_cut", max(ratios), bound, n_samples,
        heights=list(heights), ratios=ratios, spread=spread,
        extra_ok=spread < max_spread, max_spread=max_spread,
    )


# ---------------------------------------------------------------------------
# suite driver

def _broken_half_p2(**kwargs) -> InequalityResult:
    return poincare_broken_half(p=2, **kwargs)


SUITE = {
    "trace_reference": trace_reference,
    "trace_scaled": trace_scaled,
    "trace_l2": trace_l2,
    "convex_mean": poincare_convex_mean,
    "subset_mean": poincare_subset_mean,
    "boundary_mean": poincare_boundary_mean,
    "broken_half": poincare_broken_half,
    "broken_half_p2": _broken_half_p2,
    "inf_half_equiv": sup_half_equivalence,
    "edge_mean": poincare_edge_mean,
    "aniso_cut": poincare_aniso_cut,
}


def run_suite(names=None, n_samples: int = 1000, seed: int = 42) -> list[InequalityResult]:
    if names is None or names == "all":
        names = list(SUITE)
    out = []
    for name in names:
        if name not in SUITE:
            raise ValueError(f"unknown inequality check {name!r}")
        kwargs = {"seed": seed}
        if name in ("trace_scaled", "trace_l2", "edge_mean", "aniso_cut"):
            kwargs["n_samples"] = min(n_samples, 200)
        else:
            kwargs["n_samples"] = n_samples
        out.append(SUITE[name](**kwargs))
    return out


def report_json(results: list[InequalityResult], config: Optional[dict] = None) -> str:
    payload = {
        "config": config or {},
        "results": [
            {
                "name": r.name,
                "max_ratio": r.max_ratio,
                "bound": r.bound,
                "satisfied": r.satisfied,
                "n_samples": r.n_samples,
                "params": _jsonable(r.params),
            }
            for r in results
        ],
        "all_satisfied": all(r.satisfied for r in results),
    }
    return json.dumps(payload, indent=1)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj
