"""Global assembly, Dirichlet elimination, and the linear solve.

Assembly scatters the element consistency and stabilization matrices in
element-index order (deterministic).  Dirichlet data is eliminated
symmetrically with a lifting of the boundary values into the right-hand
side.  The solve is a Jacobi-preconditioned conjugate gradient; a dense
oracle lives in the tests.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from .errors import SolverStalled, VemcutError
from .meshgen import Mesh
from .quadrature import polygon_rule
from .vem import (
    StabKind,
    build_projector,
    consistency_matrix,
    stabilization_matrix,
)


@dataclass
class DofMap:
    """Split of mesh vertices into interior unknowns and boundary slots."""

    interior: np.ndarray
    boundary: np.ndarray
    index: np.ndarray  # vertex id -> interior dof index, or -1

    @classmethod
    def from_mesh(cls, mesh: Mesh) -> "DofMap":
        interior = mesh.interior_vertices
        index = np.full(mesh.n_vertices, -1, dtype=int)
        index[interior] = np.arange(len(interior))
        return cls(interior, mesh.boundary_vertices.copy(), index)

    @property
    def n_interior(self) -> int:
        return len(self.interior)


class MeshKernels:
    """Per-cell polygons, projectors, and matrices, built once per mesh.

    Everything downstream (assembly, norms, error integration) shares
    this cache; stabilization matrices are memoized per kind and
    quadrature rules per degree.
    """

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        self.polygons = []
        for ci in range(mesh.n_cells):
            try:
                self.polygons.append(mesh.cell_polygon(ci))
            except VemcutError as exc:
                raise type(exc)(f"element {ci}: {exc}") from exc
        self.cell_ids = [np.asarray(c, dtype=int) for c in mesh.cells]
        self.projectors = [build_projector(p) for p in self.polygons]
        self.consistency = [
            consistency_matrix(p, pr) for p, pr in zip(self.polygons, self.projectors)
        ]
        self._stabs: dict[StabKind, list[np.ndarray]] = {}
        self._rules: dict[int, list[tuple[np.ndarray, np.ndarray]]] = {}

    def stability(self, kind: StabKind) -> list[np.ndarray]:
        mats = self._stabs.get(kind)
        if mats is None:
            mats = [
                stabilization_matrix(p, pr, kind)
                for p, pr in zip(self.polygons, self.projectors)
            ]
            self._stabs[kind] = mats
        return mats

    def rules(self, degree: int) -> list[tuple[np.ndarray, np.ndarray]]:
        cached = self._rules.get(degree)
        if cached is None:
            cached = []
            for ci, p in enumerate(self.polygons):
                try:
                    cached.append(polygon_rule(p.vertices, degree))
                except VemcutError as exc:
                    raise type(exc)(f"element {ci}: {exc}") from exc
            self._rules[degree] = cached
        return cached


@dataclass
class SolveReport:
    iterations: int
    residual: float
    wall_time: float


@dataclass
class SparseSystem:
    """Assembled discrete problem, before and after boundary elimination."""

    matrix: sp.csr_matrix  # interior block
    rhs: np.ndarray
    dofmap: DofMap
    boundary_values: np.ndarray
    full_matrix: sp.csr_matrix  # all vertices, no boundary conditions
    kind: StabKind
    solution: Optional[np.ndarray] = None


def _evaluate_boundary(mesh: Mesh, g) -> np.ndarray:
    ids = mesh.boundary_vertices
    if g is None:
        return np.zeros(len(ids))
    if callable(g):
        return np.asarray(g(mesh.vertices[ids]), dtype=float)
    g = np.asarray(g, dtype=float)
    if len(g) == mesh.n_vertices:
        return g[ids]
    if len(g) == len(ids):
        return g
    raise ValueError("boundary data has the wrong length")


def assemble(
    mesh: Mesh,
    f: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    g=None,
    kind: StabKind = StabKind.BROKEN_HALF,
    quad_degree: int = 4,
    kernels: Optional[MeshKernels] = None,
) -> SparseSystem:
    """Assemble the stabilized Poisson system with Dirichlet data g."""
    if kernels is None:
        kernels = MeshKernels(mesh)
    stabs = kernels.stability(kind)

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    data: list[np.ndarray] = []
    b = np.zeros(mesh.n_vertices)

    if f is not None:
        rules = kernels.rules(quad_degree)
        all_pts = np.vstack([r[0] for r in rules])
        fvals = np.asarray(f(all_pts), dtype=float)
        offsets = np.cumsum([0] + [len(r[0]) for r in rules])

    for ci in range(mesh.n_cells):
        ids = kernels.cell_ids[ci]
        m = len(ids)
        local = kernels.consistency[ci] + stabs[ci]
        rows.append(np.repeat(ids, m))
        cols.append(np.tile(ids, m))
        data.append(local.ravel())
        if f is not None:
            pts, wts = kernels.rules(quad_degree)[ci]
            fw = fvals[offsets[ci] : offsets[ci + 1]] * wts
            proj = kernels.projectors[ci]
            basis_vals = pts @ proj.gradients.T + proj.constants[None, :]
            np.add.at(b, ids, basis_vals.T @ fw)

    n = mesh.n_vertices
    full = sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    ).tocsr()

    dofmap = DofMap.from_mesh(mesh)
    gb = _evaluate_boundary(mesh, g)
    interior = dofmap.interior
    boundary = dofmap.boundary
    a_ii = full[interior][:, interior].tocsr()
    if len(boundary):
        a_ib = full[interior][:, boundary]
        rhs = b[interior] - a_ib @ gb
    else:
        rhs = b[interior]
    return SparseSystem(a_ii, rhs, dofmap, gb, full, kind)


def cg_jacobi(
    a: sp.spmatrix,
    b: np.ndarray,
    tol: float = 1e-12,
    max_iter: Optional[int] = None,
) -> tuple[np.ndarray, int, float]:
    """Conjugate gradient with diagonal preconditioning.

    Deterministic; stops at relative residual <= tol, raises
    SolverStalled (carrying the best iterate) otherwise.
    """
    n = len(b)
    if n == 0:
        return np.zeros(0), 0, 0.0
    if max_iter is None:
        max_iter = 10 * n + 100
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return np.zeros(n), 0, 0.0
    diag = a.diagonal()
    if np.any(diag <= 0):
        raise SolverStalled("matrix diagonal is not positive", residual=np.inf)
    minv = 1.0 / diag
    x = np.zeros(n)
    r = b.copy()
    z = minv * r
    p = z.copy()
    rz = float(r @ z)
    best_x, best_res = x.copy(), 1.0
    for k in range(1, max_iter + 1):
        ap = a @ p
        pap = float(p @ ap)
        if pap <= 0.0:
            raise SolverStalled(
                "conjugate gradient breakdown (matrix not positive definite)",
                iterate=best_x,
                residual=best_res,
                iterations=k,
            )
        alpha = rz / pap
        x += alpha * p
        r -= alpha * ap
        res = float(np.linalg.norm(r)) / bnorm
        if res < best_res:
            best_res = res
            best_x = x.copy()
        if res <= tol:
            return x, k, res
        z = minv * r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise SolverStalled(
        f"no convergence in {max_iter} iterations (residual {best_res:.3e})",
        iterate=best_x,
        residual=best_res,
        iterations=max_iter,
    )


def solve(
    system: SparseSystem,
    tol: float = 1e-12,
    max_iter: Optional[int] = None,
) -> tuple[np.ndarray, SolveReport]:
    """Solve the eliminated system; returns the full nodal vector."""
    t0 = time.perf_counter()
    xi, iters, res = cg_jacobi(system.matrix, system.rhs, tol, max_iter)
    u = np.zeros(system.full_matrix.shape[0])
    u[system.dofmap.interior] = xi
    u[system.dofmap.boundary] = system.boundary_values
    system.solution = u
    return u, SolveReport(iters, res, time.perf_counter() - t0)


def solve_poisson(
    mesh: Mesh,
    f=None,
    g=None,
    kind: StabKind = StabKind.BROKEN_HALF,
    quad_degree: int = 4,
    tol: float = 1e-12,
    max_iter: Optional[int] = None,
    kernels: Optional[MeshKernels] = None,
) -> tuple[np.ndarray, SolveReport, SparseSystem]:
    system = assemble(mesh, f, g, kind, quad_degree, kernels)
    u, report = solve(system, tol, max_iter)
    return u, report, system
