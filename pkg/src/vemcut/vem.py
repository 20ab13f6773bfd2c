"""Element-local virtual element kernels.

The local space on a polygon consists of harmonic functions with affine
traces on each edge, identified by their vertex values.  Everything
computable reduces to the elliptic projection onto affine functions:
its gradient is the boundary integral of the trace times the outward
normal divided by the area, and the additive constant is pinned so that
the projection error has zero boundary integral.  Both integrals are
exact edge-wise trapezoid sums because traces are affine per edge.

Four stabilizations of the projection remainder are offered; all act on
raw vertex dofs with the slice (identity minus projection) built in and
all vanish on data sampled from affine functions.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from . import core, halfnorm
from .geometry import Polygon
from .quadrature import polygon_rule


class StabKind(Enum):
    """Stabilization variants for the projection remainder."""

    BROKEN_HALF = "half"  # per-edge squared endpoint differences
    L2_EDGE = "l2"  # edge L2 products weighted by 1/edge length
    DOF = "dof"  # plain vertex-value products
    TANGENTIAL = "tangential"  # edge tangential-derivative products

    @classmethod
    def parse(cls, name: str) -> "StabKind":
        for kind in cls:
            if kind.value == name or kind.name.lower() == name.lower():
                return kind
        raise ValueError(f"unknown stabilization {name!r}")

    @property
    def code(self) -> int:
        return {
            StabKind.BROKEN_HALF: core.STAB_BROKEN_HALF,
            StabKind.L2_EDGE: core.STAB_L2_EDGE,
            StabKind.DOF: core.STAB_DOF,
            StabKind.TANGENTIAL: core.STAB_TANGENTIAL,
        }[self]


@dataclass
class Projector:
    """Affine projections of the local basis functions.

    gradients[i] is the (constant) gradient of the projected basis
    function i, constants[i] its additive constant, and
    vertex_values[j, i] its value at vertex j.
    """

    gradients: np.ndarray
    constants: np.ndarray
    vertex_values: np.ndarray

    def grad(self, dofs: np.ndarray) -> np.ndarray:
        """Gradient of the projected function with the given vertex dofs."""
        return self.gradients.T @ dofs

    def evaluate(self, dofs: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Projected function values at arbitrary points."""
        g = self.grad(dofs)
        c = float(self.constants @ dofs)
        pts = np.atleast_2d(points)
        return pts @ g + c


@dataclass
class LocalSystem:
    """Per-element matrices and load for the stabilized bilinear form."""

    consistency: np.ndarray
    stability: np.ndarray
    load: np.ndarray
    projector: Projector
    vertex_ids: Optional[np.ndarray] = None


def build_projector(p: Polygon) -> Projector:
    _, _, grads, consts, values = core.element_arrays(p.vertices)
    return Projector(np.asarray(grads), np.asarray(consts), np.asarray(values))


def stabilization_matrix(p: Polygon, proj: Projector, kind: StabKind) -> np.ndarray:
    return np.asarray(core.stab_matrix(p.vertices, proj.vertex_values, kind.code))


def consistency_matrix(p: Polygon, proj: Projector) -> np.ndarray:
    return np.asarray(core.consistency_matrix(p.area, proj.gradients))


def local_load(
    p: Polygon,
    f: Callable[[np.ndarray], np.ndarray],
    proj: Projector,
    quad_degree: int = 4,
    rule: Optional[tuple[np.ndarray, np.ndarray]] = None,
) -> np.ndarray:
    """Load vector (f, projected basis) via sub-triangulation quadrature."""
    pts, wts = rule if rule is not None else polygon_rule(p.vertices, quad_degree)
    fv = np.asarray(f(pts), dtype=float) * wts
    basis_vals = pts @ proj.gradients.T + proj.constants[None, :]
    return basis_vals.T @ fv


def local_system(
    p: Polygon,
    f: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    quad_degree: int = 4,
    kind: StabKind = StabKind.BROKEN_HALF,
) -> LocalSystem:
    """Consistency and stabilization matrices plus the load vector."""
    if quad_degree < 2:
        raise ValueError("quad_degree must be >= 2")
    proj = build_projector(p)
    cons = consistency_matrix(p, proj)
    stab = stabilization_matrix(p, proj, kind)
    if f is None:
        load = np.zeros(p.n)
    else:
        load = local_load(p, f, proj, quad_degree)
    return LocalSystem(cons, stab, load, proj)


def half_seminorm_edge(
    endpoint_values: Optional[tuple[float, float]] = None,
    coeffs=None,
    n_quad: int = 16,
) -> float:
    """1/2-seminorm of a single-edge trace.

    Affine traces (given by their two endpoint values) return the
    absolute endpoint difference exactly.  Polynomial traces (ascending
    coefficients in the unit edge parametrization) are integrated with
    an n_quad x n_quad tensor Gauss rule; the difference quotient in the
    integrand is expanded as a polynomial, so the diagonal needs no
    special treatment and the rule is exact for traces of degree below
    n_quad.
    """
    if (endpoint_values is None) == (coeffs is None):
        raise ValueError("give exactly one of endpoint_values or coeffs")
    if endpoint_values is not None:
        va, vb = endpoint_values
        return abs(vb - va)
    return float(np.sqrt(halfnorm.half_sq_poly(coeffs, n_quad)))
