"""Error norms, the discrete error identity, and convergence studies.

The true error in the discrete energy norm is not computable (the exact
solution is not a mesh function), so the reported errors are

* e_H1_pi: broken H1 distance between the exact gradient and the
  elementwise projected discrete gradient (piecewise constant here),
* e_tnorm: energy norm of the difference between the nodal interpolant
  and the discrete solution (fully computable; the endpoint-difference
  stabilization is fixed for this norm regardless of how the system was
  stabilized),
* e_stab: the stabilization part of e_tnorm,
* e_L2_pi: L2 distance to the projected discrete solution (diagnostic).

`error_equation_check` verifies, probe by probe, the identity that
expresses the stabilized bilinear form applied to (solution minus
interpolant) through three computable residual terms; it holds for any
stabilization choice and vanishes up to quadrature and solver roundoff
for polynomial exact solutions.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .meshgen import CutLine, Mesh, cut_grid, short_edge_grid, square_grid
from .quadrature import gauss01
from .system import MeshKernels, solve_poisson
from .vem import StabKind


@dataclass
class ManufacturedSolution:
    """Analytic solution with gradient and matching right-hand side."""

    name: str
    u: Callable[[np.ndarray], np.ndarray]
    grad_u: Callable[[np.ndarray], np.ndarray]
    f: Callable[[np.ndarray], np.ndarray]


def _affine():
    return ManufacturedSolution(
        "affine",
        lambda p: p[:, 0] + 2.0 * p[:, 1],
        lambda p: np.column_stack([np.ones(len(p)), 2.0 * np.ones(len(p))]),
        lambda p: np.zeros(len(p)),
    )


def _saddle():
    return ManufacturedSolution(
        "saddle",
        lambda p: p[:, 0] ** 2 - p[:, 1] ** 2,
        lambda p: np.column_stack([2.0 * p[:, 0], -2.0 * p[:, 1]]),
        lambda p: np.zeros(len(p)),
    )


def _parab():
    return ManufacturedSolution(
        "parab",
        lambda p: p[:, 0] ** 2 + p[:, 1] ** 2,
        lambda p: 2.0 * p,
        lambda p: np.full(len(p), -4.0),
    )


def _sinsin():
    pi = np.pi
    return ManufacturedSolution(
        "sinsin",
        lambda p: np.sin(pi * p[:, 0]) * np.sin(pi * p[:, 1]),
        lambda p: pi
        * np.column_stack(
            [
                np.cos(pi * p[:, 0]) * np.sin(pi * p[:, 1]),
                np.sin(pi * p[:, 0]) * np.cos(pi * p[:, 1]),
            ]
        ),
        lambda p: 2.0 * pi * pi * np.sin(pi * p[:, 0]) * np.sin(pi * p[:, 1]),
    )


SOLUTIONS: dict[str, ManufacturedSolution] = {
    s.name: s for s in (_affine(), _saddle(), _parab(), _sinsin())
}


def verify_laplacian(
    sol: ManufacturedSolution,
    n_points: int = 100,
    seed: int = 0,
    step: float = 1e-5,
    rtol: float = 1e-5,
) -> float:
    """Max relative mismatch of -laplacian(u) against f by central differences."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.2, 0.8, size=(n_points, 2))
    ex = np.array([step, 0.0])
    ey = np.array([0.0, step])
    lap = (
        sol.u(pts + ex) + sol.u(pts - ex) + sol.u(pts + ey) + sol.u(pts - ey) - 4.0 * sol.u(pts)
    ) / step**2
    fv = sol.f(pts)
    scale = np.maximum(np.abs(fv), 1.0)
    err = float(np.max(np.abs(-lap - fv) / scale))
    if err > rtol:
        raise ValueError(f"{sol.name}: -laplacian(u) differs from f by {err:.2e}")
    return err


def interpolate(mesh: Mesh, sol: ManufacturedSolution) -> np.ndarray:
    return np.asarray(sol.u(mesh.vertices), dtype=float)


def energy_norm(mesh: Mesh, w: np.ndarray, kernels: Optional[MeshKernels] = None) -> float:
    """Mesh-dependent norm induced by the stabilized bilinear form,
    with the endpoint-difference stabilization fixed."""
    grad_sq, stab_sq = energy_norm_parts(mesh, w, kernels)
    return math.sqrt(max(grad_sq + stab_sq, 0.0))


def energy_norm_parts(
    mesh: Mesh, w: np.ndarray, kernels: Optional[MeshKernels] = None
) -> tuple[float, float]:
    if kernels is None:
        kernels = MeshKernels(mesh)
    stabs = kernels.stability(StabKind.BROKEN_HALF)
    grad_sq = 0.0
    stab_sq = 0.0
    for ci in range(mesh.n_cells):
        wk = w[kernels.cell_ids[ci]]
        grad_sq += float(wk @ kernels.consistency[ci] @ wk)
        stab_sq += float(wk @ stabs[ci] @ wk)
    return grad_sq, stab_sq


def stab_seminorm(mesh: Mesh, w: np.ndarray, kernels: Optional[MeshKernels] = None) -> float:
    """Endpoint-difference seminorm of the projection remainder of w."""
    return math.sqrt(max(energy_norm_parts(mesh, w, kernels)[1], 0.0))


@dataclass
class ErrorReport:
    n: int
    h: float
    dofs: int
    e_h1_proj: float
    e_energy: float
    e_stab: float
    e_l2_proj: float


def pi_errors(
    mesh: Mesh,
    u_h: np.ndarray,
    exact: ManufacturedSolution,
    quad_degree: int = 4,
    kernels: Optional[MeshKernels] = None,
    n: int = 0,
) -> ErrorReport:
    """Projected-solution errors plus the discrete energy error against
    the nodal interpolant."""
    if kernels is None:
        kernels = MeshKernels(mesh)
    rules = kernels.rules(quad_degree)
    all_pts = np.vstack([r[0] for r in rules])
    gu = np.asarray(exact.grad_u(all_pts), dtype=float)
    uu = np.asarray(exact.u(all_pts), dtype=float)
    offsets = np.cumsum([0] + [len(r[0]) for r in rules])

    h1_sq = 0.0
    l2_sq = 0.0
    for ci in range(mesh.n_cells):
        ids = kernels.cell_ids[ci]
        proj = kernels.projectors[ci]
        gh = proj.grad(u_h[ids])
        ch = float(proj.constants @ u_h[ids])
        pts, wts = rules[ci]
        sl = slice(offsets[ci], offsets[ci + 1])
        dg = gu[sl] - gh
        h1_sq += float(wts @ (dg[:, 0] ** 2 + dg[:, 1] ** 2))
        dv = uu[sl] - (pts @ gh + ch)
        l2_sq += float(wts @ (dv * dv))

    w = interpolate(mesh, exact) - u_h
    grad_sq, stab_sq = energy_norm_parts(mesh, w, kernels)
    dofs = len(mesh.interior_vertices)
    return ErrorReport(
        n,
        mesh.h,
        dofs,
        math.sqrt(max(h1_sq, 0.0)),
        math.sqrt(max(grad_sq + stab_sq, 0.0)),
        math.sqrt(max(stab_sq, 0.0)),
        math.sqrt(max(l2_sq, 0.0)),
    )


def _cell_edge_gauss(poly, n_gauss: int):
    """Gauss points per edge, scaled weights, and edge hat data."""
    t, wt = gauss01(n_gauss)
    verts = poly.vertices
    m = len(verts)
    out = []
    for k in range(m):
        a = verts[k]
        b = verts[(k + 1) % m]
        pts = a + np.outer(t, b - a)
        h_e = float(np.hypot(*(b - a)))
        normal = poly.edge_normals[k]
        out.append((k, (k + 1) % m, pts, wt * h_e, t, normal))
    return out


def error_equation_check(
    mesh: Mesh,
    exact: ManufacturedSolution,
    kind: StabKind = StabKind.BROKEN_HALF,
    n_probes: int = 20,
    seed: int = 42,
    quad_degree: int = 4,
    n_edge_gauss: int = 4,
    kernels: Optional[MeshKernels] = None,
    solver_tol: float = 1e-12,
) -> float:
    """Max relative residual of the discrete error identity over random
    interior probe functions.

    The identity equates the stabilized form applied to (discrete
    solution minus nodal interpolant) with three computable terms: the
    projected interpolation mismatch, the stabilization of the sliced
    interpolant, and an edge flux of the projection error of the exact
    solution.  The exact-solution projection gradient is taken as the
    cell mean of the exact gradient by quadrature.
    """
    if kernels is None:
        kernels = MeshKernels(mesh)
    u_h, _, system = solve_poisson(
        mesh, exact.f, exact.u, kind, quad_degree, tol=solver_tol, kernels=kernels
    )
    u_i = interpolate(mesh, exact)
    nv = mesh.n_vertices

    lhs = system.full_matrix @ (u_h - u_i)

    rules = kernels.rules(quad_degree)
    stabs = kernels.stability(kind)
    t1 = np.zeros(nv)
    t2 = np.zeros(nv)
    t3 = np.zeros(nv)
    for ci in range(mesh.n_cells):
        ids = kernels.cell_ids[ci]
        poly = kernels.polygons[ci]
        proj = kernels.projectors[ci]
        pts, wts = rules[ci]
        area = poly.area
        g_exact = (wts @ np.asarray(exact.grad_u(pts), dtype=float)) / area
        g_interp = proj.grad(u_i[ids])
        np.add.at(t1, ids, proj.gradients @ (area * (g_exact - g_interp)))
        np.add.at(t2, ids, stabs[ci] @ u_i[ids])
        for ka, kb, epts, ewts, tloc, normal in _cell_edge_gauss(poly, n_edge_gauss):
            flux = (np.asarray(exact.grad_u(epts), dtype=float) - g_exact) @ normal
            fw = flux * ewts
            # trace of (v - projected v): hats on the edge endpoints
            # minus the affine projection of every cell basis function
            pi_vals = epts @ proj.gradients.T + proj.constants[None, :]
            contrib = -pi_vals.T @ fw
            contrib[ka] += float((1.0 - tloc) @ fw)
            contrib[kb] += float(tloc @ fw)
            np.add.at(t3, ids, contrib)

    defect = lhs - (t1 - t2 + t3)

    rng = np.random.default_rng(seed)
    interior = mesh.interior_vertices
    worst = 0.0
    for _ in range(n_probes):
        v = np.zeros(nv)
        v[interior] = rng.standard_normal(len(interior))
        denom = energy_norm(mesh, v, kernels)
        worst = max(worst, abs(float(defect @ v)) / denom)
    return worst


@dataclass
class RateTable:
    """Errors over a refinement ladder plus observed orders."""

    rows: list[ErrorReport]
    family: str = ""
    solution: str = ""
    stab: str = ""

    _COLUMNS = ("e_h1_proj", "e_energy", "e_stab", "e_l2_proj")

    def rates(self) -> dict[str, list[float]]:
        out: dict[str, list[float]] = {}
        for col in self._COLUMNS:
            vals = [getattr(r, col) for r in self.rows]
            out[col] = [
                math.log2(vals[k] / vals[k + 1]) if vals[k + 1] > 0 else math.nan
                for k in range(len(vals) - 1)
            ]
        return out

    def to_csv(self, config: Optional[dict] = None) -> str:
        buf = io.StringIO()
        if config:
            for key in sorted(config):
                buf.write(f"# {key}={config[key]}\n")
        writer = csv.writer(buf)
        writer.writerow(
            ["n", "h", "dofs", "e_H1_pi", "rate_H1", "e_tnorm", "rate_tnorm", "e_stab", "e_L2_pi"]
        )
        rates = self.rates()
        for k, r in enumerate(self.rows):
            rate_h1 = "" if k == 0 else f"{rates['e_h1_proj'][k - 1]:.6f}"
            rate_en = "" if k == 0 else f"{rates['e_energy'][k - 1]:.6f}"
            writer.writerow(
                [
                    r.n,
                    repr(r.h),
                    r.dofs,
                    repr(r.e_h1_proj),
                    rate_h1,
                    repr(r.e_energy),
                    rate_en,
                    repr(r.e_stab),
                    repr(r.e_l2_proj),
                ]
            )
        return buf.getvalue()

    def to_json(self, config: Optional[dict] = None) -> str:
        payload = {
            "config": config or {},
            "rows": [
                {
                    "n": r.n,
                    "h": r.h,
                    "dofs": r.dofs,
                    "e_H1_pi": r.e_h1_proj,
                    "e_tnorm": r.e_energy,
                    "e_stab": r.e_stab,
                    "e_L2_pi": r.e_l2_proj,
                }
                for r in self.rows
            ],
            "rates": {
                "e_H1_pi": self.rates()["e_h1_proj"],
                "e_tnorm": self.rates()["e_energy"],
            },
        }
        return json.dumps(payload, indent=1)


def build_family_mesh(
    family: str,
    n: int,
    cut_line: Optional[CutLine] = None,
    fraction: float = 0.01,
) -> Mesh:
    if family == "uniform":
        return square_grid(n)
    if family == "cut":
        if cut_line is None:
            raise ValueError("cut family needs a cut line")
        return cut_grid(n, cut_line)
    if family == "short_edge":
        return short_edge_grid(n, fraction)
    raise ValueError(f"unknown mesh family {family!r}")


def convergence_study(
    family: str,
    ns: Sequence[int],
    exact: ManufacturedSolution,
    kind: StabKind = StabKind.BROKEN_HALF,
    quad_degree: int = 4,
    cut_line: Optional[CutLine] = None,
    fraction: float = 0.01,
    solver_tol: float = 1e-12,
) -> RateTable:
    """Errors over an h-halving ladder of one mesh family.

    For the cut family the same physical line is reused at every level,
    so cell aspect ratios grow without bound under refinement.
    """
    ns = list(ns)
    for a, b in zip(ns, ns[1:]):
        if b != 2 * a:
            raise ValueError("refinement levels must double n")
    rows = []
    for n in ns:
        mesh = build_family_mesh(family, n, cut_line, fraction)
        kernels = MeshKernels(mesh)
        u_h, _, _ = solve_poisson(
            mesh, exact.f, exact.u, kind, quad_degree, tol=solver_tol, kernels=kernels
        )
        rows.append(pi_errors(mesh, u_h, exact, quad_degree, kernels, n=n))
    return RateTable(rows, family, exact.name, kind.value)


def default_levels(lo: int = 8, hi: int = 128) -> list[int]:
    out = [lo]
    while out[-1] < hi:
        out.append(out[-1] * 2)
    return out
